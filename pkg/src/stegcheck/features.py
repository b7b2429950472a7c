"""Residual co-occurrence features.

Every image is described by the histograms of `cooc_order` consecutive quantized
residual samples. Block layout of a feature vector, outermost first:

- residual kind, in `FeatureConfig.residual_kinds` order;
- quantization step, in `FeatureConfig.quantizations` order;
- scan direction, in `FeatureConfig.directions` order;
- the `(2T + 1) ** cooc_order` bins of one histogram, mixed-radix encoded with the first
  sample of the window as the most significant digit.

Residuals are only computed where the whole filter support lies inside the image.
"""
import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.signal import correlate2d

from .constants import (
    DIRECTION_HORIZONTAL,
    DIRECTION_VERTICAL,
    DIRECTIONS,
    KB_KERNEL,
    MIN_FEATURE_SIZE,
    RESIDUAL_FIRST_ORDER,
    RESIDUAL_KB,
    RESIDUAL_KINDS,
    RESIDUAL_SECOND_ORDER,
)
from .image_core import ImageGray
from .utils import (
    FeatureDimensionError,
    ImageShapeError,
    NonFiniteFeatureError,
    fingerprint,
    logging,
    tqdm,
)


logger = logging.get_logger(__name__)

LABEL_COLUMN = "label"


@dataclass(frozen=True)
class FeatureConfig:
    """Which residuals are computed and how they are histogrammed.

    Args:
        residual_kinds (`Tuple[str]`, *optional*):
            Subset of `FIRST_ORDER`, `SECOND_ORDER` and `KB`. Defaults to all three.
        quantizations (`Tuple[int]`, *optional*):
            Quantization steps, each 1 or 2. Defaults to `(1, 2)`.
        truncation (`int`, *optional*, defaults to 2):
            Residuals are clipped to `[-truncation, truncation]`.
        cooc_order (`int`, *optional*, defaults to 4):
            Co-occurrence window length, 3 or 4.
        directions (`Tuple[str]`, *optional*):
            Subset of `HORIZONTAL` and `VERTICAL`. Defaults to both.
        normalize (`bool`, *optional*, defaults to `True`):
            Whether each histogram is divided by its total count.
    """

    residual_kinds: Tuple[str, ...] = field(
        default_factory=lambda: tuple(RESIDUAL_KINDS)
    )
    quantizations: Tuple[int, ...] = (1, 2)
    truncation: int = 2
    cooc_order: int = 4
    directions: Tuple[str, ...] = field(default_factory=lambda: tuple(DIRECTIONS))
    normalize: bool = True

    def __post_init__(self):
        for name in ("residual_kinds", "quantizations", "directions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.residual_kinds or not self.quantizations or not self.directions:
            raise ValueError(
                "At least one residual kind, one quantization and one direction are"
                " required."
            )
        for kind in self.residual_kinds:
            if kind not in RESIDUAL_KINDS:
                raise ValueError(f"Unsupported residual kind '{kind}'.")
        for direction in self.directions:
            if direction not in DIRECTIONS:
                raise ValueError(f"Unsupported direction '{direction}'.")
        for q in self.quantizations:
            if q not in (1, 2):
                raise ValueError(f"Quantization steps must be 1 or 2, got {q}.")
        if isinstance(self.truncation, bool) or not isinstance(self.truncation, int):
            raise ValueError("truncation must be an integer.")
        if self.truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}.")
        if self.cooc_order not in (3, 4):
            raise ValueError(f"cooc_order must be 3 or 4, got {self.cooc_order}.")

    @property
    def bins(self) -> int:
        return (2 * self.truncation + 1) ** self.cooc_order

    @property
    def dimension(self) -> int:
        return (
            len(self.residual_kinds)
            * len(self.quantizations)
            * len(self.directions)
            * self.bins
        )

    def blocks(self) -> List[Tuple[str, int, str]]:
        """`(kind, q, direction)` of every histogram block, in vector order."""
        return [
            (kind, q, direction)
            for kind in self.residual_kinds
            for q in self.quantizations
            for direction in self.directions
        ]

    def to_dict(self) -> Dict:
        return asdict(self)

    @property
    def fingerprint(self) -> str:
        return fingerprint(self)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Read-only feature vector of the dimension given by its [`FeatureConfig`]."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        if not np.isfinite(values).all():
            raise NonFiniteFeatureError("Feature vectors must be finite.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)


def _quantize(residual: np.ndarray, q: int, truncation: int) -> np.ndarray:
    # Round half away from zero.
    scaled = residual / q
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(rounded, -truncation, truncation).astype(np.int64)


def _horizontal_residual(pixels: np.ndarray, kind: str) -> np.ndarray:
    if kind == RESIDUAL_FIRST_ORDER:
        if pixels.shape[1] < 2:
            raise ImageShapeError(
                "First-order residuals need an image at least 2 wide."
            )
        return pixels[:, 1:] - pixels[:, :-1]
    if kind == RESIDUAL_SECOND_ORDER:
        if pixels.shape[1] < 3:
            raise ImageShapeError(
                "Second-order residuals need an image at least 3 wide."
            )
        return pixels[:, :-2] - 2.0 * pixels[:, 1:-1] + pixels[:, 2:]
    if kind == RESIDUAL_KB:
        if pixels.shape[0] < 3 or pixels.shape[1] < 3:
            raise ImageShapeError("KB residuals need an image of at least 3x3.")
        return correlate2d(pixels, np.array(KB_KERNEL), mode="valid")
    raise ValueError(f"Unsupported residual kind '{kind}'.")


def compute_residual(
    img: ImageGray,
    kind: str,
    q: int,
    T: int,
    direction: str = DIRECTION_HORIZONTAL,
) -> np.ndarray:
    """Quantized residual plane `clip(round(R / q), -T, T)`.

    Horizontal forms, at valid positions only:

    - `FIRST_ORDER`: `R[i, j] = X[i, j + 1] - X[i, j]`
    - `SECOND_ORDER`: `R[i, j] = X[i, j - 1] - 2 X[i, j] + X[i, j + 1]`
    - `KB`: correlation with `[[-1, 2, -1], [2, -4, 2], [-1, 2, -1]]`

    The vertical form is the horizontal form of the transposed image, transposed back.
    Rounding is half away from zero.

    Returns:
        `np.ndarray` of integers in `[-T, T]`.

    Raises:
        `ValueError`: unsupported kind or direction.
        [`~utils.ImageShapeError`]: image smaller than the filter support.
    """
    pixels = img.pixels.astype(np.float64)
    if direction == DIRECTION_HORIZONTAL:
        residual = _horizontal_residual(pixels, kind)
    elif direction == DIRECTION_VERTICAL:
        residual = _horizontal_residual(pixels.T, kind).T
    else:
        raise ValueError(f"Unsupported direction '{direction}'.")
    return _quantize(residual, q, T)


def cooccurrence(
    residual: np.ndarray, direction: str, order: int, T: int
) -> np.ndarray:
    """Histogram of `order` consecutive residual samples along `direction`.

    The tuple `(r1, ..., r_order)` lands in bin
    `sum((r_k + T) * (2T + 1) ** (order - k))`.
    Counts are raw: the total mass equals the number of window positions.

    Raises:
        [`~utils.ImageShapeError`]: if fewer than `order` samples fit along `direction`.
        `ValueError`: if a residual lies outside `[-T, T]`.
    """
    residual = np.asarray(residual)
    if residual.ndim != 2:
        raise ImageShapeError("Residual planes must be 2-dimensional.")
    if direction == DIRECTION_HORIZONTAL:
        plane = residual
    elif direction == DIRECTION_VERTICAL:
        plane = residual.T
    else:
        raise ValueError(f"Unsupported direction '{direction}'.")
    length = plane.shape[1]
    if length < order or plane.shape[0] < 1:
        raise ImageShapeError(
            f"A {direction.lower()} window of {order} samples does not fit in a plane"
            f" of shape {residual.shape}."
        )
    if plane.size and (plane.min() < -T or plane.max() > T):
        raise ValueError(f"Residual values must lie in [{-T}, {T}].")

    radix = 2 * T + 1
    plane = plane.astype(np.int64) + T
    index = np.zeros((plane.shape[0], length - order + 1), dtype=np.int64)
    for k in range(order):
        index = index * radix + plane[:, k : length - order + 1 + k]
    return np.bincount(index.ravel(), minlength=radix**order).astype(np.float64)


def extract_features(img: ImageGray, cfg: FeatureConfig) -> FeatureVector:
    """Concatenate every configured co-occurrence histogram of `img`.

    Raises:
        [`~utils.ImageShapeError`]: if the image is smaller than 16x16.
    """
    if img.width < MIN_FEATURE_SIZE or img.height < MIN_FEATURE_SIZE:
        raise ImageShapeError(
            f"Feature extraction needs an image of at least"
            f" {MIN_FEATURE_SIZE}x{MIN_FEATURE_SIZE}, got {img.width}x{img.height}."
        )
    blocks = []
    for kind, q, direction in cfg.blocks():
        residual = compute_residual(img, kind, q, cfg.truncation, direction)
        histogram = cooccurrence(residual, direction, cfg.cooc_order, cfg.truncation)
        if cfg.normalize:
            total = histogram.sum()
            if total > 0:
                histogram = histogram / total
        blocks.append(histogram)
    return FeatureVector(np.concatenate(blocks))


def extract_features_batch(
    images: Sequence[ImageGray], cfg: FeatureConfig, desc: str = "features"
) -> np.ndarray:
    """Feature matrix of shape `(len(images), cfg.dimension)`, one row per image."""
    matrix = np.empty((len(images), cfg.dimension))
    for i, img in enumerate(tqdm(images, desc=desc, unit="img")):
        matrix[i] = extract_features(img, cfg).values
    return matrix


def write_feature_csv(
    path: Union[str, Path],
    features: np.ndarray,
    labels: Optional[Sequence[str]] = None,
) -> None:
    """Write one image per row under a `label,f0,f1,...` header.

    The label column is left empty when `labels` is not given. Values use `repr` so
    that reading the file back gives the same floats.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if labels is not None and len(labels) != features.shape[0]:
        raise FeatureDimensionError(
            f"Got {len(labels)} labels for {features.shape[0]} feature rows."
        )
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([LABEL_COLUMN] + [f"f{j}" for j in range(features.shape[1])])
        for i, row in enumerate(features):
            label = labels[i] if labels is not None else ""
            writer.writerow([label] + [repr(float(v)) for v in row])


def read_feature_csv(
    path: Union[str, Path]
) -> Tuple[np.ndarray, Optional[List[str]]]:
    """Read a file written by [`write_feature_csv`].

    The label column is optional. Returns the feature matrix and the labels, or `None`
    when every label cell is empty.
    """
    with open(path, "r", newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise FeatureDimensionError(f"Feature file '{path}' is empty.")
    header, rows = rows[0], rows[1:]
    has_label = bool(header) and header[0] == LABEL_COLUMN
    offset = 1 if has_label else 0
    dim = len(header) - offset
    labels = [row[0] for row in rows] if has_label else []
    matrix = np.empty((len(rows), dim))
    for i, row in enumerate(rows):
        if len(row) - offset != dim:
            raise FeatureDimensionError(
                f"Row {i + 2} of '{path}' holds {len(row) - offset} values, expected"
                f" {dim}."
            )
        matrix[i] = [float(v) for v in row[offset:]]
    if not np.isfinite(matrix).all():
        raise NonFiniteFeatureError(f"Feature file '{path}' holds non-finite values.")
    return matrix, (labels if any(labels) else None)
