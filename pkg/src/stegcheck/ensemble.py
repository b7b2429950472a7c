"""Random-subspace ensemble of Fisher linear discriminants.

Each of the `L` base learners sees a random subset of `d_sub` feature indices and,
optionally, a bootstrap sample of the training set stratified by class. It projects a
sample on its Fisher direction and votes for class 1 when the projection exceeds its
threshold. The ensemble decides by majority; `L` is odd so there is never a tie.

Randomness of learner `k` comes from two derived seeds,
`derive_seed(seed, "learner", k)` for the subspace and
`derive_seed(seed, "bootstrap", k)` for the bootstrap sample. Both are fixed before any
learner is trained.
"""
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from packaging import version

from .constants import (
    DEFAULT_N_LEARNERS,
    DEFAULT_SUBSPACE_DIM,
    MODEL_FORMAT_NAME,
    MODEL_FORMAT_VERSION,
    REG_EPS_RELATIVE,
    SUBSPACE_SEARCH_GRID,
)
from .features import FeatureVector
from .utils import (
    FeatureDimensionError,
    LabelLengthError,
    ModelFormatError,
    NonFiniteFeatureError,
    SingleClassError,
    derive_seed,
    logging,
    make_generator,
    tqdm,
    validate_seed,
)


logger = logging.get_logger(__name__)

# Smallest ridge ever added to the scatter matrix.
_REG_EPS_FLOOR = 1e-12


@dataclass(frozen=True)
class EcConfig:
    """Hyperparameters of the ensemble.

    Args:
        n_learners (`int`, *optional*, defaults to 51):
            Number of base learners `L`. Must be odd.
        subspace_dim (`int`, *optional*):
            Subspace dimension `d_sub`. Defaults to `min(D, 200)`.
        reg_eps (`float`, *optional*):
            Ridge added to the diagonal of the within-class scatter. Defaults to `1e-6`
            times the mean of that diagonal, computed per learner.
        bootstrap (`bool`, *optional*, defaults to `True`):
            Whether each learner is trained on a class-stratified bootstrap sample.
        seed (`int`, *optional*, defaults to 0):
            Seed of every random draw of the training.
        search_subspace (`bool`, *optional*, defaults to `False`):
            If `True`, `d_sub` is chosen among 100, 200 and 400 by out-of-bag error.
            Requires `bootstrap`.
    """

    n_learners: int = DEFAULT_N_LEARNERS
    subspace_dim: Optional[int] = None
    reg_eps: Optional[float] = None
    bootstrap: bool = True
    seed: int = 0
    search_subspace: bool = False

    def __post_init__(self):
        if isinstance(self.n_learners, bool) or not isinstance(self.n_learners, int):
            raise ValueError("n_learners must be an integer.")
        if self.n_learners < 1 or self.n_learners % 2 == 0:
            raise ValueError(
                f"n_learners must be odd and >= 1 so that votes never tie, got"
                f" {self.n_learners}."
            )
        if self.subspace_dim is not None and self.subspace_dim < 1:
            raise ValueError(f"subspace_dim must be >= 1, got {self.subspace_dim}.")
        if self.reg_eps is not None and not self.reg_eps > 0:
            raise ValueError(f"reg_eps must be > 0, got {self.reg_eps}.")
        if self.search_subspace and not self.bootstrap:
            raise ValueError("search_subspace needs bootstrap samples.")
        validate_seed(self.seed)

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """A trained ensemble.

    Attributes:
        subspaces (`np.ndarray` of shape `(L, d_sub)`):
            Sorted feature indices seen by each learner.
        weights (`np.ndarray` of shape `(L, d_sub)`):
            Fisher direction of each learner.
        thresholds (`np.ndarray` of shape `(L,)`):
            Decision threshold of each learner.
        dim (`int`):
            Feature dimension `D`.
        config ([`EcConfig`]):
            Configuration the model was trained with.
        classes (`Tuple[str, str]`):
            Names of class 0 and class 1.
    """

    subspaces: np.ndarray
    weights: np.ndarray
    thresholds: np.ndarray
    dim: int
    config: EcConfig
    classes: Tuple[str, str] = ("0", "1")

    def __post_init__(self):
        subspaces = np.array(self.subspaces, dtype=np.int64)
        weights = np.array(self.weights, dtype=np.float64)
        thresholds = np.array(self.thresholds, dtype=np.float64).ravel()
        if subspaces.ndim != 2 or weights.shape != subspaces.shape:
            raise FeatureDimensionError(
                "Subspaces and weights must share a (n_learners, d_sub) shape."
            )
        if thresholds.shape != (subspaces.shape[0],):
            raise FeatureDimensionError("One threshold per learner is required.")
        if subspaces.shape[0] != self.config.n_learners:
            raise FeatureDimensionError(
                f"Model holds {subspaces.shape[0]} learners, config says"
                f" {self.config.n_learners}."
            )
        if subspaces.size and (subspaces.min() < 0 or subspaces.max() >= self.dim):
            raise FeatureDimensionError(
                f"Subspace indices must lie in [0, {self.dim})."
            )
        if not np.isfinite(weights).all() or not np.isfinite(thresholds).all():
            raise NonFiniteFeatureError(
                "Learner weights and thresholds must be finite."
            )
        for name, array in (
            ("subspaces", subspaces),
            ("weights", weights),
            ("thresholds", thresholds),
        ):
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def n_learners(self) -> int:
        return self.subspaces.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.subspaces.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EnsembleModel):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.config == other.config
            and self.classes == other.classes
            and np.array_equal(self.subspaces, other.subspaces)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.thresholds, other.thresholds)
        )

    def __repr__(self) -> str:
        return (
            f"EnsembleModel(n_learners={self.n_learners},"
            f" subspace_dim={self.subspace_dim}, dim={self.dim},"
            f" classes={self.classes})"
        )


def _check_training_data(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).ravel()
    if X.ndim != 2:
        raise FeatureDimensionError("Feature matrix must be 2-dimensional.")
    if y.shape[0] != X.shape[0]:
        raise LabelLengthError(f"Got {y.shape[0]} labels for {X.shape[0]} samples.")
    if not np.isfinite(X).all():
        raise NonFiniteFeatureError("Feature matrix contains NaN or infinite values.")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("Labels must be 0 or 1.")
    if np.unique(y).size < 2:
        raise SingleClassError("Training data must hold both classes.")
    return X, y.astype(np.int64)


def train_fld(
    X: np.ndarray, y: np.ndarray, reg_eps: Optional[float] = None
) -> Tuple[np.ndarray, float]:
    """Fit a Fisher linear discriminant.

    Solves `(S_W + reg_eps * I) w = mu1 - mu0` where `S_W` is the pooled within-class
    scatter, then sets the threshold at the projected midpoint of the class means.
    Class-1 means always project above the threshold.

    Args:
        X (`np.ndarray` of shape `(n, d)`):
            Features.
        y (`np.ndarray` of shape `(n,)`):
            Labels in `{0, 1}`.
        reg_eps (`float`, *optional*):
            Ridge. Defaults to `1e-6` times the mean diagonal of `S_W`.

    Returns:
        `Tuple[np.ndarray, float]`: the weight vector and the threshold.

    Raises:
        [`~utils.SingleClassError`]: only one class in `y`.
        [`~utils.NonFiniteFeatureError`]: NaN or infinite features.
    """
    X, y = _check_training_data(X, y)
    X0, X1 = X[y == 0], X[y == 1]
    mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
    centered0, centered1 = X0 - mu0, X1 - mu1
    scatter = centered0.T @ centered0 + centered1.T @ centered1
    if reg_eps is None:
        reg_eps = max(
            REG_EPS_RELATIVE * float(np.mean(np.diag(scatter))), _REG_EPS_FLOOR
        )
    system = scatter + reg_eps * np.eye(X.shape[1])
    difference = mu1 - mu0
    if not difference.any():
        logger.warning("Identical class means: the discriminant direction is zero.")
    try:
        w = scipy.linalg.solve(system, difference, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        logger.warning("Scatter matrix is not positive definite, using least squares.")
        w = scipy.linalg.lstsq(system, difference)[0]
    if not np.isfinite(w).all():
        raise NonFiniteFeatureError("Fisher discriminant produced non-finite weights.")
    threshold = float(w @ (mu0 + mu1) / 2.0)
    return w, threshold


def _learner_subspace(seed: int, k: int, dim: int, d_sub: int) -> np.ndarray:
    rng = make_generator(derive_seed(seed, "learner", k))
    return np.sort(rng.choice(dim, size=d_sub, replace=False))


def _learner_bootstrap(seed: int, k: int, y: np.ndarray) -> np.ndarray:
    """Stratified bootstrap: each class is resampled to its own size."""
    rng = make_generator(derive_seed(seed, "bootstrap", k))
    samples = []
    for label in (0, 1):
        members = np.flatnonzero(y == label)
        samples.append(rng.choice(members, size=members.size, replace=True))
    return np.sort(np.concatenate(samples))


def _resolve_subspace_dim(cfg: EcConfig, dim: int) -> int:
    d_sub = cfg.subspace_dim
    if d_sub is None:
        d_sub = min(dim, DEFAULT_SUBSPACE_DIM)
    if d_sub > dim:
        raise FeatureDimensionError(
            f"Subspace dimension {d_sub} exceeds the feature dimension {dim}."
        )
    return d_sub


def _fit(X: np.ndarray, y: np.ndarray, cfg: EcConfig, d_sub: int) -> EnsembleModel:
    dim = X.shape[1]
    subspaces = np.empty((cfg.n_learners, d_sub), dtype=np.int64)
    weights = np.empty((cfg.n_learners, d_sub))
    thresholds = np.empty(cfg.n_learners)
    for k in tqdm(range(cfg.n_learners), desc="learners", unit="fld", leave=False):
        subspace = _learner_subspace(cfg.seed, k, dim, d_sub)
        rows = _learner_bootstrap(cfg.seed, k, y) if cfg.bootstrap else slice(None)
        w, threshold = train_fld(X[rows][:, subspace], y[rows], cfg.reg_eps)
        subspaces[k], weights[k], thresholds[k] = subspace, w, threshold
    return EnsembleModel(subspaces, weights, thresholds, dim, cfg)


def train_ensemble(
    X: np.ndarray,
    y: np.ndarray,
    cfg: EcConfig,
    classes: Tuple[str, str] = ("0", "1"),
) -> EnsembleModel:
    """Train a random-subspace FLD ensemble. Deterministic given `(X, y, cfg)`.

    Args:
        X (`np.ndarray` of shape `(n, D)`):
            Training features.
        y (`np.ndarray` of shape `(n,)`):
            Labels in `{0, 1}`.
        cfg ([`EcConfig`]):
            Hyperparameters.
        classes (`Tuple[str, str]`, *optional*):
            Names of class 0 and class 1, stored on the model.

    Raises:
        [`~utils.FeatureDimensionError`]: `d_sub > D`.
        [`~utils.SingleClassError`]: only one class in `y`.
    """
    X, y = _check_training_data(X, y)
    if cfg.search_subspace:
        d_sub = search_subspace_dim(X, y, cfg)
    else:
        d_sub = _resolve_subspace_dim(cfg, X.shape[1])
    logger.info(
        f"Training {cfg.n_learners} learners on {X.shape[0]} samples (D={X.shape[1]},"
        f" d_sub={d_sub})."
    )
    model = _fit(X, y, cfg, d_sub)
    return replace(model, classes=tuple(classes))


def _as_vector(model: EnsembleModel, x: Union[FeatureVector, np.ndarray]) -> np.ndarray:
    if isinstance(x, FeatureVector):
        values = x.values
    else:
        values = np.asarray(x, dtype=np.float64).ravel()
    if values.size != model.dim:
        raise FeatureDimensionError(
            f"Feature vector has dimension {values.size}, model expects {model.dim}."
        )
    return values


def _learner_decisions(model: EnsembleModel, X: np.ndarray) -> np.ndarray:
    """Boolean matrix `(n_samples, L)`: learner `k` votes for class 1 on sample `i`."""
    projections = np.einsum("nld,ld->nl", X[:, model.subspaces], model.weights)
    return projections > model.thresholds


def predict_votes(model: EnsembleModel, x: Union[FeatureVector, np.ndarray]) -> int:
    """Number of learners voting for class 1, in `[0, L]`.

    Raises:
        [`~utils.FeatureDimensionError`]: if `x` does not have dimension `D`.
    """
    values = _as_vector(model, x)
    return int(_learner_decisions(model, values[np.newaxis, :]).sum())


def predict(model: EnsembleModel, x: Union[FeatureVector, np.ndarray]) -> int:
    """`1` if more than half the learners vote for class 1, else `0`."""
    return int(2 * predict_votes(model, x) > model.n_learners)


def predict_votes_batch(model: EnsembleModel, X: np.ndarray) -> np.ndarray:
    """[`predict_votes`] for every row of `X`."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.dim:
        raise FeatureDimensionError(
            f"Feature matrix has dimension {X.shape[1]}, model expects {model.dim}."
        )
    return _learner_decisions(model, X).sum(axis=1)


def predict_batch(model: EnsembleModel, X: np.ndarray) -> np.ndarray:
    """[`predict`] for every row of `X`."""
    return (2 * predict_votes_batch(model, X) > model.n_learners).astype(np.int64)


def oob_error(model: EnsembleModel, X: np.ndarray, y: np.ndarray) -> float:
    """Out-of-bag error of a model trained with bootstrap on `(X, y)`.

    Each sample is classified by the majority vote of the learners whose bootstrap
    sample did not contain it. Samples that were in every bootstrap are skipped.

    Raises:
        `ValueError`: if the model was trained without bootstrap.
    """
    if not model.config.bootstrap:
        raise ValueError("Out-of-bag error needs a model trained with bootstrap.")
    X, y = _check_training_data(X, y)
    if X.shape[1] != model.dim:
        raise FeatureDimensionError(
            f"Feature matrix has dimension {X.shape[1]}, model expects {model.dim}."
        )
    out_of_bag = np.ones((X.shape[0], model.n_learners), dtype=bool)
    for k in range(model.n_learners):
        out_of_bag[_learner_bootstrap(model.config.seed, k, y), k] = False
    decisions = _learner_decisions(model, X)
    counts = out_of_bag.sum(axis=1)
    votes = (decisions & out_of_bag).sum(axis=1)
    evaluated = counts > 0
    if not evaluated.any():
        return math.nan
    predictions = (2 * votes > counts).astype(np.int64)
    return float(np.mean(predictions[evaluated] != y[evaluated]))


def search_subspace_dim(X: np.ndarray, y: np.ndarray, cfg: EcConfig) -> int:
    """Pick `d_sub` among 100, 200 and 400 (clipped to `D`) by out-of-bag error.

    Ties go to the smaller dimension.
    """
    X, y = _check_training_data(X, y)
    candidates = sorted({min(d, X.shape[1]) for d in SUBSPACE_SEARCH_GRID})
    base_cfg = replace(cfg, search_subspace=False)
    best_dim, best_error = candidates[0], math.inf
    for d_sub in candidates:
        error = oob_error(_fit(X, y, base_cfg, d_sub), X, y)
        logger.info(f"Out-of-bag error with d_sub={d_sub}: {error:.4f}")
        if error < best_error:
            best_dim, best_error = d_sub, error
    return best_dim


def _format_float(value: float) -> str:
    return format(float(value), ".17g")


def _model_lines(model: EnsembleModel) -> Iterator[str]:
    cfg = model.config
    yield f"{MODEL_FORMAT_NAME} {MODEL_FORMAT_VERSION}"
    yield f"L {cfg.n_learners}"
    yield f"d_sub {'none' if cfg.subspace_dim is None else cfg.subspace_dim}"
    yield f"reg_eps {'none' if cfg.reg_eps is None else _format_float(cfg.reg_eps)}"
    yield f"bootstrap {str(cfg.bootstrap).lower()}"
    yield f"seed {cfg.seed}"
    yield f"search_subspace {str(cfg.search_subspace).lower()}"
    yield f"dim {model.dim}"
    yield f"negative {model.classes[0]}"
    yield f"positive {model.classes[1]}"
    for k in range(model.n_learners):
        yield f"learner {k}"
        yield "indices " + " ".join(str(int(i)) for i in model.subspaces[k])
        yield "weights " + " ".join(_format_float(w) for w in model.weights[k])
        yield f"threshold {_format_float(model.thresholds[k])}"


def save_model(model: EnsembleModel, path: Union[str, Path]) -> None:
    """Write `model` as versioned text. [`load_model`] reads it back bit-identically."""
    with open(path, "w", encoding="utf-8") as f:
        for line in _model_lines(model):
            f.write(line + "\n")


class _LineReader:
    def __init__(self, lines: List[str]):
        self.lines = lines
        self.position = 0

    def field(self, key: str) -> Tuple[List[str], int]:
        line_number = self.position + 1
        if self.position >= len(self.lines):
            raise ModelFormatError(
                f"Unexpected end of file, expected '{key}'.", line_number
            )
        parts = self.lines[self.position].split()
        self.position += 1
        if not parts or parts[0] != key:
            raise ModelFormatError(f"Expected '{key}'.", line_number)
        return parts[1:], line_number

    def scalar(self, key: str) -> Tuple[str, int]:
        values, line_number = self.field(key)
        if len(values) != 1:
            raise ModelFormatError(f"'{key}' takes exactly one value.", line_number)
        return values[0], line_number


def _parse(converter, value: str, line_number: int):
    try:
        return converter(value)
    except ValueError as e:
        raise ModelFormatError(str(e), line_number) from e


def _parse_bool(value: str) -> bool:
    if value not in ("true", "false"):
        raise ValueError(f"Expected 'true' or 'false', got '{value}'.")
    return value == "true"


def _optional(converter):
    return lambda value: None if value == "none" else converter(value)


def _check_format_header(reader: _LineReader) -> None:
    if not reader.lines:
        raise ModelFormatError("Empty model file.", 1)
    parts = reader.lines[0].split()
    reader.position = 1
    if len(parts) != 2 or parts[0] != MODEL_FORMAT_NAME:
        raise ModelFormatError(
            f"Not a model file: expected a '{MODEL_FORMAT_NAME} <version>' header.", 1
        )
    try:
        file_version = version.Version(parts[1])
    except version.InvalidVersion as e:
        raise ModelFormatError(f"Invalid format version '{parts[1]}'.", 1) from e
    if file_version.major > version.Version(MODEL_FORMAT_VERSION).major:
        raise ModelFormatError(
            f"Model format {file_version} is newer than the supported"
            f" {MODEL_FORMAT_VERSION}.",
            1,
        )


def load_model(path: Union[str, Path]) -> EnsembleModel:
    """Read a model written by [`save_model`].

    Raises:
        [`~utils.ModelFormatError`]: unreadable file or newer format version. The
        offending line number is reported.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    while lines and not lines[-1].strip():
        lines.pop()
    reader = _LineReader(lines)
    _check_format_header(reader)

    n_learners = _parse(int, *reader.scalar("L"))
    subspace_dim = _parse(_optional(int), *reader.scalar("d_sub"))
    reg_eps = _parse(_optional(float), *reader.scalar("reg_eps"))
    bootstrap = _parse(_parse_bool, *reader.scalar("bootstrap"))
    seed = _parse(int, *reader.scalar("seed"))
    search = _parse(_parse_bool, *reader.scalar("search_subspace"))
    dim = _parse(int, *reader.scalar("dim"))
    negative, _ = reader.scalar("negative")
    positive, _ = reader.scalar("positive")
    try:
        config = EcConfig(
            n_learners=n_learners,
            subspace_dim=subspace_dim,
            reg_eps=reg_eps,
            bootstrap=bootstrap,
            seed=seed,
            search_subspace=search,
        )
    except ValueError as e:
        raise ModelFormatError(f"Invalid configuration: {e}") from e

    subspaces, weights, thresholds = [], [], []
    for k in range(n_learners):
        index, line_number = reader.scalar("learner")
        if index != str(k):
            raise ModelFormatError(f"Expected learner {k}, got {index}.", line_number)
        indices, line_number = reader.field("indices")
        subspaces.append(_parse(lambda v: [int(i) for i in v], indices, line_number))
        values, line_number = reader.field("weights")
        weights.append(_parse(lambda v: [float(w) for w in v], values, line_number))
        if len(weights[-1]) != len(subspaces[-1]):
            raise ModelFormatError("Weights and indices differ in length.", line_number)
        thresholds.append(_parse(float, *reader.scalar("threshold")))
    if reader.position != len(lines):
        raise ModelFormatError(
            "Unexpected content after the last learner.", reader.position + 1
        )
    if len({len(s) for s in subspaces}) > 1:
        raise ModelFormatError("Learners have different subspace dimensions.")

    try:
        return EnsembleModel(
            np.array(subspaces, dtype=np.int64).reshape(n_learners, -1),
            np.array(weights, dtype=np.float64).reshape(n_learners, -1),
            np.array(thresholds, dtype=np.float64),
            dim,
            config,
            (negative, positive),
        )
    except (FeatureDimensionError, NonFiniteFeatureError) as e:
        raise ModelFormatError(f"Inconsistent model: {e}") from e


def labels_to_binary(labels: Sequence[str], positive: str) -> np.ndarray:
    """`1` where `labels[i] == positive`, `0` elsewhere."""
    return np.array([int(label == positive) for label in labels], dtype=np.int64)
