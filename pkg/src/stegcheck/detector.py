"""Inconsistency detection with double embedding and label-free error prediction.

Two detectors are trained on a labeled set `A` (half cover, half stego) and on
`B`, the images of `A` embedded once more:

- `f_A` separates covers `C_A` from stego images `S_A`;
- `f_B` separates stego images `S_B` from double-stego images `D_B`.

On a test image `a` and its re-embedded version `b`, a reliable pair of detectors has
to agree with itself. Two filters flag the pairs that don't:

- F1: if `f_A(a) = S_A`, then `f_B(b)` must be `D_B`, otherwise `f_B(b)` must be `S_B`;
- F2: `f_B(a)` must be `S_B` and `f_A(b)` must be `S_A`.

An image flagged by either filter is inconsistent. The number of inconsistencies `INC`
over `n` test images predicts the error of `f_A` as `INC / (2n)`, which is only
meaningful for a set of images analysed together. An image whose four predictions are
all wrong in the same direction is not flagged.
"""
import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from .constants import (
    CLASS_C_A,
    CLASS_D_B,
    CLASS_S_A,
    CLASS_S_B,
    DETECTOR_CONFIG_NAME,
    F_A_MODEL_NAME,
    F_B_MODEL_NAME,
    LABEL_COVER,
    LABEL_DOUBLE_STEGO,
    LABEL_STEGO,
    LABELS,
    REPORT_HEADER,
    SINGLE_IMAGE_NOTE,
    VERDICT_HEADER,
)
from .embedding import EmbedConfig, embed
from .ensemble import (
    EcConfig,
    EnsembleModel,
    labels_to_binary,
    load_model,
    predict_batch,
    save_model,
    train_ensemble,
)
from .features import FeatureConfig, extract_features_batch
from .image_core import ImageGray
from .utils import (
    EmptyDatasetError,
    FingerprintMismatchError,
    LabelLengthError,
    ModelFormatError,
    UnlabeledDatasetError,
    derive_seed,
    fingerprint,
    logging,
    make_generator,
    tqdm,
    validate_stegcheck_args,
)


logger = logging.get_logger(__name__)

F_A_CLASSES = (CLASS_C_A, CLASS_S_A)
F_B_CLASSES = (CLASS_S_B, CLASS_D_B)


@dataclass(frozen=True)
class DatasetPair:
    """Parallel image sets `A` and `B`, where `B[i]` is `A[i]` embedded once more.

    Args:
        a (`List[ImageGray]`):
            The `A` set.
        b (`List[ImageGray]`):
            The `B` set, same length as `a`.
        labels (`List[str]`, *optional*):
            `COVER` or `STEGO` for every image of `a`. `None` for unlabeled test sets.
        embed_cfg ([`EmbedConfig`]):
            Embedding used to build `b` from `a`.
        names (`List[str]`, *optional*):
            A name per image (file name, corpus index), used in verdict files.
        origin (`List[ImageGray]`, *optional*):
            For training pairs, the cover each image of `a` comes from.
    """

    a: List[ImageGray]
    b: List[ImageGray]
    labels: Optional[List[str]]
    embed_cfg: EmbedConfig
    names: Optional[List[str]] = None
    origin: Optional[List[ImageGray]] = None

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise LabelLengthError(
                f"A and B must have the same size, got {len(self.a)} and {len(self.b)}."
            )
        if self.labels is not None:
            if len(self.labels) != len(self.a):
                raise LabelLengthError(
                    f"Got {len(self.labels)} labels for {len(self.a)} images."
                )
            unknown = set(self.labels) - set(LABELS)
            if unknown:
                raise ValueError(f"Unknown labels {sorted(unknown)}.")
        for name in ("names", "origin"):
            value = getattr(self, name)
            if value is not None and len(value) != len(self.a):
                raise LabelLengthError(
                    f"Got {len(value)} {name} for {len(self.a)} images."
                )

    def __len__(self) -> int:
        return len(self.a)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @property
    def b_labels(self) -> Optional[List[str]]:
        """Labels of `B`: `STEGO` for covers of `A`, `DOUBLE_STEGO` for stego images."""
        if self.labels is None:
            return None
        return [
            LABEL_DOUBLE_STEGO if label == LABEL_STEGO else LABEL_STEGO
            for label in self.labels
        ]


@dataclass(frozen=True)
class DetectorModels:
    """The two trained detectors and the configuration they depend on."""

    f_a: EnsembleModel
    f_b: EnsembleModel
    feature_cfg: FeatureConfig
    embed_cfg: EmbedConfig

    def __post_init__(self):
        if self.f_a.dim != self.f_b.dim:
            raise ValueError(
                f"f_A and f_B must share their feature dimension, got {self.f_a.dim}"
                f" and {self.f_b.dim}."
            )

    @property
    def feature_fingerprint(self) -> str:
        return fingerprint(self.feature_cfg)


@dataclass(frozen=True)
class ImageVerdict:
    """The four predictions on a test pair `(a_i, b_i)` and the filters they trigger."""

    index: int
    pred_A_of_a: str
    pred_B_of_b: str
    pred_B_of_a: str
    pred_A_of_b: str
    f1_flag: bool
    f2_flag: bool
    name: Optional[str] = None

    def __post_init__(self):
        for attribute, allowed in (
            ("pred_A_of_a", F_A_CLASSES),
            ("pred_B_of_b", F_B_CLASSES),
            ("pred_B_of_a", F_B_CLASSES),
            ("pred_A_of_b", F_A_CLASSES),
        ):
            if getattr(self, attribute) not in allowed:
                raise ValueError(
                    f"{attribute} must be one of {allowed}, got"
                    f" {getattr(self, attribute)!r}."
                )

    @property
    def inconsistent(self) -> bool:
        return self.f1_flag or self.f2_flag


@dataclass(frozen=True)
class DetectionReport:
    """Inconsistency counts, predicted error and, when labels are known, real error.

    `filtered_*` metrics are computed over consistent images only.
    """

    n: int
    inc: int
    inc_c: int
    inc_s: int
    err_pred: float
    tp: Optional[int] = None
    tn: Optional[int] = None
    fp: Optional[int] = None
    fn: Optional[int] = None
    err: Optional[float] = None
    filtered_tp: Optional[int] = None
    filtered_tn: Optional[int] = None
    filtered_fp: Optional[int] = None
    filtered_fn: Optional[int] = None
    filtered_err: Optional[float] = None
    note: Optional[str] = None

    @property
    def has_labels(self) -> bool:
        return self.tp is not None

    def as_row(self) -> List[str]:
        """Cells in `REPORT_HEADER` order, label-dependent ones empty when unknown."""
        values = [
            self.n,
            self.tp,
            self.tn,
            self.fp,
            self.fn,
            self.err,
            self.err_pred,
            self.inc,
            self.inc_c,
            self.inc_s,
            self.filtered_err,
            self.filtered_tp,
            self.filtered_tn,
            self.filtered_fp,
            self.filtered_fn,
        ]
        return [_format_cell(value) for value in values]


def _format_cell(value: Union[int, float, None]) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


@validate_stegcheck_args
def build_train_pair(
    covers: Sequence[ImageGray],
    cfg: EmbedConfig,
    seed: int,
    names: Optional[Sequence[str]] = None,
) -> DatasetPair:
    """Build the balanced, labeled training pair.

    Covers are shuffled with `derive_seed(seed, "train-split")`. The first half stays
    cover, the second half is embedded once with `derive_seed(seed, "embed", "train-a",
    i)`. With an odd number of covers the last shuffled cover is dropped. Every `A[i]`
    is then embedded again with `derive_seed(seed, "embed", "train-b", i)` to form `B`.

    Raises:
        [`~utils.EmptyDatasetError`]: fewer than 2 covers.
    """
    if len(covers) < 2:
        raise EmptyDatasetError(f"At least 2 covers are needed, got {len(covers)}.")
    if names is not None and len(names) != len(covers):
        raise LabelLengthError(f"Got {len(names)} names for {len(covers)} covers.")
    order = make_generator(derive_seed(seed, "train-split")).permutation(len(covers))
    half = len(covers) // 2
    if len(covers) % 2:
        logger.warning(
            f"Odd number of training covers ({len(covers)}): one cover is left out to"
            " keep the training set balanced."
        )
    cover_part, stego_part = order[:half], order[half : 2 * half]

    a, labels, origin = [], [], []
    for i in cover_part:
        a.append(covers[i])
        labels.append(LABEL_COVER)
        origin.append(covers[i])
    for j, i in enumerate(tqdm(stego_part, desc="embed train A", unit="img")):
        a.append(embed(covers[i], cfg, derive_seed(seed, "embed", "train-a", j)))
        labels.append(LABEL_STEGO)
        origin.append(covers[i])
    b = [
        embed(img, cfg, derive_seed(seed, "embed", "train-b", i))
        for i, img in enumerate(tqdm(a, desc="embed train B", unit="img"))
    ]
    pair_names = None
    if names is not None:
        pair_names = [names[i] for i in np.concatenate([cover_part, stego_part])]
    logger.info(f"Training pair built: {half} covers and {half} stego images.")
    return DatasetPair(a, b, labels, cfg, names=pair_names, origin=origin)


@validate_stegcheck_args
def build_test_pair(
    images: Sequence[ImageGray],
    cfg: EmbedConfig,
    seed: int,
    names: Optional[Sequence[str]] = None,
) -> DatasetPair:
    """Build an unlabeled test pair: `A` in input order, `B[i]` embedded with
    `derive_seed(seed, "embed", "test-b", i)`.

    Raises:
        [`~utils.EmptyDatasetError`]: no image.
    """
    if len(images) < 1:
        raise EmptyDatasetError("At least one test image is needed.")
    b = [
        embed(img, cfg, derive_seed(seed, "embed", "test-b", i))
        for i, img in enumerate(tqdm(images, desc="embed test B", unit="img"))
    ]
    return DatasetPair(
        list(images), b, None, cfg, names=list(names) if names is not None else None
    )


def _detector_ec_cfg(ec_cfg: EcConfig, role: str) -> EcConfig:
    return replace(ec_cfg, seed=derive_seed(ec_cfg.seed, role))


def train_detectors(
    pair: DatasetPair, feat_cfg: FeatureConfig, ec_cfg: EcConfig
) -> DetectorModels:
    """Train `f_A` on `A` (`C_A` vs `S_A`) and `f_B` on `B` (`S_B` vs `D_B`).

    `B[i]` is `D_B` exactly when `A[i]` is `STEGO`.

    Each detector draws its subspaces and bootstrap samples from its own seed,
    `derive_seed(ec_cfg.seed, "f_A")` and `derive_seed(ec_cfg.seed, "f_B")`.

    Raises:
        [`~utils.UnlabeledDatasetError`]: the pair has no labels.
    """
    if pair.labels is None:
        raise UnlabeledDatasetError("Detectors can only be trained on a labeled pair.")
    n_stego = sum(label == LABEL_STEGO for label in pair.labels)
    if 2 * n_stego != len(pair):
        logger.warning(
            f"Training pair is unbalanced ({len(pair) - n_stego} covers, {n_stego}"
            " stego images)."
        )
    y = labels_to_binary(pair.labels, LABEL_STEGO)
    features_a = extract_features_batch(pair.a, feat_cfg, desc="features train A")
    features_b = extract_features_batch(pair.b, feat_cfg, desc="features train B")
    f_a = train_ensemble(
        features_a, y, _detector_ec_cfg(ec_cfg, "f_A"), classes=F_A_CLASSES
    )
    f_b = train_ensemble(
        features_b, y, _detector_ec_cfg(ec_cfg, "f_B"), classes=F_B_CLASSES
    )
    logger.info("Detectors f_A and f_B trained.")
    return DetectorModels(f_a, f_b, feat_cfg, pair.embed_cfg)


def filter_f1(pred_A_of_a: str, pred_B_of_b: str) -> bool:
    """`True` (inconsistency) unless `f_B(b)` follows `f_A(a)`: `S_A -> D_B`,
    `C_A -> S_B`."""
    if pred_A_of_a == CLASS_S_A:
        return pred_B_of_b != CLASS_D_B
    return pred_B_of_b != CLASS_S_B


def filter_f2(pred_B_of_a: str, pred_A_of_b: str) -> bool:
    """`True` (inconsistency) unless `f_B(a) = S_B` and `f_A(b) = S_A`."""
    return pred_B_of_a != CLASS_S_B or pred_A_of_b != CLASS_S_A


def verdicts_from_predictions(
    pred_A_of_a: Sequence[str],
    pred_B_of_b: Sequence[str],
    pred_B_of_a: Sequence[str],
    pred_A_of_b: Sequence[str],
    names: Optional[Sequence[str]] = None,
) -> List[ImageVerdict]:
    """Apply both filters to the four predictions of every test image."""
    n = len(pred_A_of_a)
    if not len(pred_B_of_b) == len(pred_B_of_a) == len(pred_A_of_b) == n:
        raise LabelLengthError("The four prediction sequences must have equal lengths.")
    if names is not None and len(names) != n:
        raise LabelLengthError(f"Got {len(names)} names for {n} predictions.")
    return [
        ImageVerdict(
            index=i,
            pred_A_of_a=pred_A_of_a[i],
            pred_B_of_b=pred_B_of_b[i],
            pred_B_of_a=pred_B_of_a[i],
            pred_A_of_b=pred_A_of_b[i],
            f1_flag=filter_f1(pred_A_of_a[i], pred_B_of_b[i]),
            f2_flag=filter_f2(pred_B_of_a[i], pred_A_of_b[i]),
            name=names[i] if names is not None else None,
        )
        for i in range(n)
    ]


def _class_names(model: EnsembleModel, X: np.ndarray) -> List[str]:
    return [model.classes[label] for label in predict_batch(model, X)]


def analyze(
    models: DetectorModels, test: DatasetPair, feat_cfg: FeatureConfig
) -> List[ImageVerdict]:
    """Classify every `a_i` and `b_i` with both detectors and apply F1 and F2.

    Raises:
        [`~utils.FingerprintMismatchError`]: `feat_cfg` is not the feature configuration
        the detectors were trained with.
    """
    if fingerprint(feat_cfg) != models.feature_fingerprint:
        raise FingerprintMismatchError(
            "Feature configuration differs from the one the detectors were trained with"
            f" ({fingerprint(feat_cfg)[:12]} != {models.feature_fingerprint[:12]})."
        )
    features_a = extract_features_batch(test.a, feat_cfg, desc="features test A")
    features_b = extract_features_batch(test.b, feat_cfg, desc="features test B")
    return verdicts_from_predictions(
        _class_names(models.f_a, features_a),
        _class_names(models.f_b, features_b),
        _class_names(models.f_b, features_a),
        _class_names(models.f_a, features_b),
        names=test.names,
    )


def classification_error(tp: int, tn: int, fp: int, fn: int) -> float:
    """`(FP + FN) / (TP + TN + FP + FN)`."""
    total = tp + tn + fp + fn
    if total == 0:
        raise EmptyDatasetError("Classification error of an empty set is undefined.")
    return (fp + fn) / total


def predicted_error(inc: int, n: int) -> float:
    """`INC / (2n)`, always within `[0, 0.5]`."""
    if n < 1:
        raise EmptyDatasetError("Error prediction needs at least one image.")
    return inc / (2 * n)


def _confusion(
    predictions: Sequence[str], labels: Sequence[str]
) -> Tuple[int, int, int, int]:
    tp = tn = fp = fn = 0
    for prediction, label in zip(predictions, labels):
        if label == LABEL_STEGO:
            if prediction == CLASS_S_A:
                tp += 1
            else:
                fn += 1
        elif prediction == CLASS_S_A:
            fp += 1
        else:
            tn += 1
    return tp, tn, fp, fn


def summarize(
    verdicts: Sequence[ImageVerdict], true_labels: Optional[Sequence[str]] = None
) -> DetectionReport:
    """Count inconsistencies and predict the error of `f_A`.

    `INC` counts inconsistent images, once each. `INC_C` and `INC_S` split it by
    `f_A(a)`. With labels (`COVER` or `STEGO` per image), the confusion counts of
    `f_A(a)` are added, over every image and over consistent images only.

    Raises:
        [`~utils.EmptyDatasetError`]: no verdict.
        [`~utils.LabelLengthError`]: labels and verdicts differ in length.
    """
    n = len(verdicts)
    if n < 1:
        raise EmptyDatasetError("Cannot summarize an empty set of verdicts.")
    inconsistent = [v for v in verdicts if v.inconsistent]
    inc = len(inconsistent)
    inc_c = sum(v.pred_A_of_a == CLASS_C_A for v in inconsistent)
    note = None
    if n == 1:
        logger.warning("Error prediction on a single image is informational only.")
        note = SINGLE_IMAGE_NOTE
    fields = dict(
        n=n,
        inc=inc,
        inc_c=inc_c,
        inc_s=inc - inc_c,
        err_pred=predicted_error(inc, n),
        note=note,
    )
    if true_labels is None:
        return DetectionReport(**fields)

    if len(true_labels) != n:
        raise LabelLengthError(f"Got {len(true_labels)} labels for {n} verdicts.")
    unknown = set(true_labels) - set(LABELS)
    if unknown:
        raise ValueError(f"Unknown labels {sorted(unknown)}.")
    predictions = [v.pred_A_of_a for v in verdicts]
    tp, tn, fp, fn = _confusion(predictions, true_labels)
    consistent = [i for i, v in enumerate(verdicts) if not v.inconsistent]
    f_tp, f_tn, f_fp, f_fn = _confusion(
        [predictions[i] for i in consistent], [true_labels[i] for i in consistent]
    )
    return DetectionReport(
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        err=classification_error(tp, tn, fp, fn),
        filtered_tp=f_tp,
        filtered_tn=f_tn,
        filtered_fp=f_fp,
        filtered_fn=f_fn,
        filtered_err=(
            classification_error(f_tp, f_tn, f_fp, f_fn) if consistent else None
        ),
        **fields,
    )


def reliable_predictions(verdicts: Sequence[ImageVerdict]) -> List[Tuple[int, str]]:
    """`(index, f_A(a))` of every consistent image."""
    return [(v.index, v.pred_A_of_a) for v in verdicts if not v.inconsistent]


def write_report_csv(
    path: Union[str, Path],
    reports: Sequence[DetectionReport],
    prefix_header: Optional[Sequence[str]] = None,
    prefixes: Optional[Sequence[Sequence[str]]] = None,
) -> None:
    """Write one row per report under `REPORT_HEADER`.

    `prefix_header` and `prefixes` add descriptive leading columns, one prefix per
    report. Floats are written with 4 decimals.
    """
    if (prefix_header is None) != (prefixes is None):
        raise ValueError("prefix_header and prefixes go together.")
    if prefixes is not None and len(prefixes) != len(reports):
        raise LabelLengthError(f"Got {len(prefixes)} prefixes for {len(reports)} rows.")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(list(prefix_header or []) + REPORT_HEADER)
        for i, report in enumerate(reports):
            prefix = list(prefixes[i]) if prefixes is not None else []
            writer.writerow(prefix + report.as_row())


def write_verdicts_csv(
    path: Union[str, Path],
    verdicts: Sequence[ImageVerdict],
    labels: Optional[Sequence[str]] = None,
) -> None:
    """Write one row per verdict under `VERDICT_HEADER`; `label` is empty if unknown."""
    if labels is not None and len(labels) != len(verdicts):
        raise LabelLengthError(
            f"Got {len(labels)} labels for {len(verdicts)} verdicts."
        )
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(VERDICT_HEADER)
        for i, v in enumerate(verdicts):
            writer.writerow(
                [
                    v.index,
                    v.name if v.name is not None else "",
                    v.pred_A_of_a,
                    v.pred_B_of_b,
                    v.pred_B_of_a,
                    v.pred_A_of_b,
                    int(v.f1_flag),
                    int(v.f2_flag),
                    int(v.inconsistent),
                    labels[i] if labels is not None else "",
                ]
            )


def save_detectors(models: DetectorModels, directory: Union[str, Path]) -> None:
    """Write `f_A.model`, `f_B.model` and `detector.yaml` into `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_model(models.f_a, directory / F_A_MODEL_NAME)
    save_model(models.f_b, directory / F_B_MODEL_NAME)
    description = {
        "feature_config": models.feature_cfg.to_dict(),
        "feature_fingerprint": models.feature_fingerprint,
        "embed_config": models.embed_cfg.to_dict(),
    }
    description["feature_config"] = {
        key: list(value) if isinstance(value, tuple) else value
        for key, value in description["feature_config"].items()
    }
    with open(directory / DETECTOR_CONFIG_NAME, "w", encoding="utf-8") as f:
        yaml.safe_dump(description, f, sort_keys=False)
    logger.info(f"Detectors saved to '{directory}'.")


def load_detectors(directory: Union[str, Path]) -> DetectorModels:
    """Read detectors written by [`save_detectors`].

    Raises:
        [`~utils.ModelFormatError`]: missing or inconsistent files.
    """
    directory = Path(directory)
    config_path = directory / DETECTOR_CONFIG_NAME
    if not config_path.is_file():
        raise ModelFormatError(f"Missing '{config_path}'.")
    with open(config_path, "r", encoding="utf-8") as f:
        description: Dict = yaml.safe_load(f) or {}
    try:
        feature_cfg = FeatureConfig(**description["feature_config"])
        embed_cfg = EmbedConfig(**description["embed_config"])
        stored_fingerprint = description["feature_fingerprint"]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Invalid '{config_path}': {e}") from e
    if fingerprint(feature_cfg) != stored_fingerprint:
        raise ModelFormatError(
            f"Feature fingerprint in '{config_path}' does not match its feature"
            " configuration."
        )
    models = DetectorModels(
        f_a=load_model(directory / F_A_MODEL_NAME),
        f_b=load_model(directory / F_B_MODEL_NAME),
        feature_cfg=feature_cfg,
        embed_cfg=embed_cfg,
    )
    if models.f_a.dim != feature_cfg.dimension:
        raise ModelFormatError(
            f"Models expect {models.f_a.dim} features, the feature configuration"
            f" produces {feature_cfg.dimension}."
        )
    return models
