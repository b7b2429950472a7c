"""Simulated ±1 embedding: LSB matching and HILL-cost adaptive embedding.

Adaptive embedding follows the payload-limited sender: per-pixel costs `rho` are turned
into symmetric change probabilities

    pi = exp(-lambda * rho) / (1 + 2 * exp(-lambda * rho))

with `lambda` chosen so that the total ternary entropy equals the payload. Changes are
then drawn independently per pixel. No coding is performed, only the change pattern an
optimal coder would produce is simulated.

Embedding twice (stego, then "double stego") is simply two calls with different seeds:
a pixel changed by both passes may end up at `±2` from the cover, which single
embedding never produces.
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.special import xlogy

from .constants import (
    ALGORITHM_HILL,
    ALGORITHM_LSBM,
    ALGORITHMS,
    CALIBRATION_MAX_ITERATIONS,
    CALIBRATION_TOLERANCE,
    COST_FLOOR,
    HILL_DENOMINATOR_FLOOR,
    HILL_LOWPASS_1_SIZE,
    HILL_LOWPASS_2_SIZE,
    HILL_MIN_SIZE,
    KB_KERNEL,
    LAMBDA_MAX,
    PGM_MAXVAL,
)
from .image_core import ImageGray, RealPlane, correlate_same
from .utils import (
    CalibrationError,
    ImageShapeError,
    PayloadCapacityError,
    logging,
    make_generator,
    validate_rate,
    validate_stegcheck_args,
)


logger = logging.get_logger(__name__)

_LOG2_3 = math.log2(3)
_ONE_THIRD = 1.0 / 3.0

# Bisection stops once the bracket on lambda is this tight (relative).
_BRACKET_RELATIVE_WIDTH = 1e-9


@dataclass(frozen=True)
class EmbedConfig:
    """Embedding algorithm and payload.

    Args:
        algorithm (`str`):
            `"LSBM"` or `"HILL"`.
        rate (`float`):
            Payload in bits per pixel, in `[0, 1]`.
    """

    algorithm: str
    rate: float

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"Unknown embedding algorithm '{self.algorithm}'. Expected one of"
                f" {ALGORITHMS}."
            )
        validate_rate(self.rate)

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True, eq=False, repr=False)
class CostMap(RealPlane):
    """Per-pixel embedding costs. `+inf` marks a wet pixel that is never changed.

    Finite costs are at least `COST_FLOOR`.
    """

    allow_wet: bool = True

    def __post_init__(self):
        super().__post_init__()
        finite = self.values[np.isfinite(self.values)]
        if finite.size and finite.min() < COST_FLOOR:
            raise ValueError(
                f"Finite costs must be >= {COST_FLOOR}, got {finite.min()}."
            )

    @property
    def dry_mask(self) -> np.ndarray:
        return np.isfinite(self.values)


@dataclass(frozen=True, eq=False, repr=False)
class ChangeProbMap(RealPlane):
    """Probability `pi` of a `+1` change (and, equally, of a `-1` change) per pixel.

    Every value lies in `[0, 1/3]`.
    """

    def __post_init__(self):
        super().__post_init__()
        if self.values.min() < 0 or self.values.max() > _ONE_THIRD + 1e-12:
            raise ValueError("Change probabilities must lie in [0, 1/3].")


@dataclass(frozen=True)
class ChangeStats:
    """Per-pixel difference histogram between a cover and another image.

    Attributes:
        n_pm1 (`int`): pixels where `|cover - other| == 1`.
        n_pm2 (`int`): pixels where `|cover - other| == 2`.
        n_other (`int`): pixels where `|cover - other| > 2`.
        n_total (`int`): pixel count.
    """

    n_pm1: int
    n_pm2: int
    n_other: int
    n_total: int

    def __add__(self, other: "ChangeStats") -> "ChangeStats":
        if not isinstance(other, ChangeStats):
            return NotImplemented
        return ChangeStats(
            n_pm1=self.n_pm1 + other.n_pm1,
            n_pm2=self.n_pm2 + other.n_pm2,
            n_other=self.n_other + other.n_other,
            n_total=self.n_total + other.n_total,
        )

    @classmethod
    def zero(cls) -> "ChangeStats":
        return cls(0, 0, 0, 0)


def _apply_changes(img: ImageGray, delta: np.ndarray) -> ImageGray:
    """Apply a `{-1, 0, +1}` change plane, flipping the direction at saturation."""
    pixels = img.pixels.astype(np.int16)
    delta = delta.astype(np.int16)
    delta[(pixels == 0) & (delta == -1)] = 1
    delta[(pixels == PGM_MAXVAL) & (delta == 1)] = -1
    return ImageGray((pixels + delta).astype(np.uint8))


@validate_stegcheck_args
def embed_lsbm(img: ImageGray, rate: float, seed: int) -> ImageGray:
    """LSB matching with a uniformly scattered payload.

    `round(rate * n_pixels)` distinct pixels are chosen by a seeded permutation. Each
    carries one random message bit: when the pixel's LSB already matches, it is left
    alone, otherwise it is changed by `+1` or `-1` with equal probability. A pixel at 0
    is always changed by `+1` and a pixel at 255 by `-1`.

    Args:
        img ([`ImageGray`]):
            Cover image.
        rate (`float`):
            Payload in bits per pixel, in `[0, 1]`.
        seed (`int`):
            Embedding key. The same seed always gives the same stego image.

    Returns:
        [`ImageGray`]: the stego image.
    """
    n = img.size
    k = int(math.floor(rate * n + 0.5))
    if k == 0:
        return img
    rng = make_generator(seed)
    positions = rng.permutation(n)[:k]
    bits = rng.integers(0, 2, size=k)
    directions = 2 * rng.integers(0, 2, size=k) - 1

    selected = img.pixels.ravel()[positions]
    mismatch = (selected & 1) != bits
    delta = np.zeros(n, dtype=np.int16)
    delta[positions] = np.where(mismatch, directions, 0)
    return _apply_changes(img, delta.reshape(img.shape))


def hill_cost(img: ImageGray) -> CostMap:
    """HILL cost map: a KB high-pass, a 3x3 then a 15x15 averaging filter.

    `rho = L2 * (1 / max(L1 * |H * X|, 1e-10))`, floored at `1e-10`, with every
    filter applied with mirror padding. Smooth regions get high costs.

    Raises:
        [`~utils.ImageShapeError`]: if the image is smaller than 15x15.
    """
    if img.width < HILL_MIN_SIZE or img.height < HILL_MIN_SIZE:
        raise ImageShapeError(
            f"HILL costs need an image of at least {HILL_MIN_SIZE}x{HILL_MIN_SIZE},"
            f" got {img.width}x{img.height}."
        )
    pixels = img.pixels.astype(np.float64)
    lowpass_1 = np.full((HILL_LOWPASS_1_SIZE,) * 2, 1.0 / HILL_LOWPASS_1_SIZE**2)
    lowpass_2 = np.full((HILL_LOWPASS_2_SIZE,) * 2, 1.0 / HILL_LOWPASS_2_SIZE**2)

    residual = correlate_same(pixels, np.array(KB_KERNEL))
    denominator = correlate_same(np.abs(residual), lowpass_1)
    denominator = np.maximum(denominator, HILL_DENOMINATOR_FLOOR)
    costs = correlate_same(1.0 / denominator, lowpass_2)
    return CostMap(np.maximum(costs, COST_FLOOR))


def _normalized_dry_costs(costs: CostMap) -> Tuple[np.ndarray, np.ndarray]:
    dry = costs.dry_mask
    values = costs.values[dry]
    if values.size == 0:
        return dry, values
    # Every dry pixel ends up with a normalized cost >= 1, so `pi(LAMBDA_MAX)` is 0.
    return dry, values / values.min()


def _probabilities(normalized: np.ndarray, lam: float) -> np.ndarray:
    weights = np.exp(-lam * normalized)
    return weights / (1.0 + 2.0 * weights)


def _ternary_entropy(probs: np.ndarray) -> float:
    """Sum of `H3(pi)` in bits, zero-probability terms contributing 0."""
    rest = 1.0 - 2.0 * probs
    nats = -(2.0 * xlogy(probs, probs) + xlogy(rest, rest))
    return float(nats.sum() / math.log(2))


def change_probabilities(costs: CostMap, lam: float) -> ChangeProbMap:
    """Change probabilities of `costs` at multiplier `lam`.

    `lam` is expressed for costs divided by their smallest finite value, the convention
    of [`calibrate_lambda`]. Wet pixels get probability 0.
    """
    dry, normalized = _normalized_dry_costs(costs)
    probs = np.zeros(costs.shape)
    probs[dry] = _probabilities(normalized, lam)
    return ChangeProbMap(probs)


def calibrate_lambda(
    costs: CostMap, payload_bits: float, tol: float = CALIBRATION_TOLERANCE
) -> Tuple[float, ChangeProbMap]:
    """Find the multiplier whose change probabilities carry `payload_bits`.

    Costs are first divided by their smallest finite value; the returned `lam` is in
    those normalized units. Images with flat or clipped areas, whose costs span many
    orders of magnitude, therefore still reach the target below `LAMBDA_MAX`.

    `lam` is bisected on `[0, LAMBDA_MAX]` until the bracket is tight, then the
    realized entropy is checked against
    `[payload_bits * (1 - tol), payload_bits * (1 + tol)]`.

    Args:
        costs ([`CostMap`]):
            Per-pixel costs, `+inf` for wet pixels.
        payload_bits (`float`):
            Target payload, between 0 and `n_dry * log2(3)`.
        tol (`float`, *optional*, defaults to `1e-3`):
            Relative tolerance on the realized payload.

    Returns:
        `Tuple[float, ChangeProbMap]`: `lam` and the matching probabilities. A zero
        payload returns `LAMBDA_MAX` and all-zero probabilities.

    Raises:
        [`~utils.PayloadCapacityError`]: payload above `n_dry * log2(3)`.
        [`~utils.CalibrationError`]: target not reached within the iteration cap.
    """
    if math.isnan(payload_bits) or payload_bits < 0:
        raise ValueError(f"payload_bits must be >= 0, got {payload_bits}.")
    dry, normalized = _normalized_dry_costs(costs)
    capacity = normalized.size * _LOG2_3
    if payload_bits > capacity:
        raise PayloadCapacityError(
            f"Payload of {payload_bits:.6g} bits exceeds the capacity of"
            f" {capacity:.6g} bits ({normalized.size} dry pixels)."
        )
    if payload_bits == 0:
        return LAMBDA_MAX, ChangeProbMap(np.zeros(costs.shape))

    low_target = payload_bits * (1.0 - tol)
    high_target = payload_bits * (1.0 + tol)

    def _result(lam: float) -> Tuple[float, ChangeProbMap]:
        probs = np.zeros(costs.shape)
        probs[dry] = _probabilities(normalized, lam)
        return lam, ChangeProbMap(probs)

    if _ternary_entropy(_probabilities(normalized, 0.0)) <= high_target:
        return _result(0.0)

    # Entropy is non-increasing in lambda: `low` stays above the target, `high` below.
    low, high = 0.0, LAMBDA_MAX
    for iteration in range(CALIBRATION_MAX_ITERATIONS):
        mid = 0.5 * (low + high)
        if mid in (low, high) or high - low <= _BRACKET_RELATIVE_WIDTH * high:
            break
        if _ternary_entropy(_probabilities(normalized, mid)) > payload_bits:
            low = mid
        else:
            high = mid

    lam = 0.5 * (low + high)
    achieved = _ternary_entropy(_probabilities(normalized, lam))
    if not low_target <= achieved <= high_target:
        raise CalibrationError(
            f"Bisection did not converge after {iteration + 1} iterations",
            achieved_bits=achieved,
            target_bits=payload_bits,
        )
    logger.debug(
        f"lambda={lam:.6g} after {iteration + 1} iterations ({achieved:.1f} bits for"
        f" a {payload_bits:.1f} bits payload)."
    )
    return _result(lam)


@validate_stegcheck_args
def embed_adaptive(img: ImageGray, costs: CostMap, rate: float, seed: int) -> ImageGray:
    """Simulate optimal ±1 embedding of `rate * n_pixels` bits under `costs`.

    Each pixel draws one uniform `u` (draw `i` for pixel `i` in row-major order):
    `+1` if `u < pi`, `-1` if `pi <= u < 2 * pi`, no change otherwise. A `-1` drawn at
    value 0 is applied as `+1` and a `+1` drawn at 255 as `-1`.

    Raises:
        [`~utils.ImageShapeError`]: if `costs` and `img` have different dimensions.
        [`~utils.PayloadCapacityError`], [`~utils.CalibrationError`]: from
        [`calibrate_lambda`].
    """
    if costs.shape != img.shape:
        raise ImageShapeError(
            f"Cost map of shape {costs.shape} does not match image of shape"
            f" {img.shape}."
        )
    if rate == 0:
        return img
    _, probs = calibrate_lambda(costs, rate * img.size, CALIBRATION_TOLERANCE)
    pi = probs.values
    draws = make_generator(seed).random(img.size).reshape(img.shape)
    delta = np.where(draws < pi, 1, np.where(draws < 2.0 * pi, -1, 0))
    return _apply_changes(img, delta)


@validate_stegcheck_args
def embed(img: ImageGray, cfg: EmbedConfig, seed: int) -> ImageGray:
    """Embed a random message of `cfg.rate` bits per pixel with `cfg.algorithm`.

    Every output pixel differs from the input by at most 1. A rate of 0 returns the
    input unchanged.
    """
    if cfg.rate == 0:
        return img
    if cfg.algorithm == ALGORITHM_LSBM:
        return embed_lsbm(img, cfg.rate, seed)
    if cfg.algorithm == ALGORITHM_HILL:
        return embed_adaptive(img, hill_cost(img), cfg.rate, seed)
    raise ValueError(f"Unknown embedding algorithm '{cfg.algorithm}'.")


def count_changes(cover: ImageGray, other: ImageGray) -> ChangeStats:
    """Count pixels changed by ±1, by ±2 and by more between two images.

    Raises:
        [`~utils.ImageShapeError`]: if the images have different dimensions.
    """
    if cover.shape != other.shape:
        raise ImageShapeError(
            f"Cannot compare images of shapes {cover.shape} and {other.shape}."
        )
    diff = np.abs(cover.pixels.astype(np.int16) - other.pixels.astype(np.int16))
    return ChangeStats(
        n_pm1=int(np.count_nonzero(diff == 1)),
        n_pm2=int(np.count_nonzero(diff == 2)),
        n_other=int(np.count_nonzero(diff > 2)),
        n_total=int(diff.size),
    )
