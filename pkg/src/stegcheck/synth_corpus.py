"""Synthetic camera sources.

A source is a small set of parameters controlling texture frequency, sensor noise,
smoothing and dynamic range. Covers drawn from two different sources have different
residual statistics, which is what a cover source mismatch experiment needs.

Generation pipeline for one cover:

1. value-noise texture: a coarse lattice of uniform values in `[-1, 1]` with spacing
   `16 / texture_scale` pixels, bilinearly interpolated and scaled to `±127.5`;
2. additive white Gaussian noise of standard deviation `noise_sigma`;
3. box blur of half-width `smooth_radius` (edge mirror);
4. `base_level + contrast * value`, then clamped to `[0, 255]` and rounded.

All draws come from `make_generator(seed)`: first the lattice, then the noise plane.
"""
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import yaml
from scipy.ndimage import map_coordinates, uniform_filter

from .constants import MIN_SYNTH_SIZE, PGM_MAXVAL
from .image_core import ImageGray
from .utils import (
    ImageShapeError,
    logging,
    make_generator,
    split_seed,
    tqdm,
    validate_stegcheck_args,
)


logger = logging.get_logger(__name__)

PRESETS_PATH = Path(__file__).parent / "templates" / "sources.yaml"

# Lattice spacing in pixels at `texture_scale == 1`.
_BASE_LATTICE_SPACING = 16.0
_TEXTURE_AMPLITUDE = 127.5


@dataclass(frozen=True)
class SourceParams:
    """Parameters of a synthetic camera source.

    Args:
        texture_scale (`float`):
            Spatial frequency of the base texture, `> 0`. Doubling it halves the
            lattice spacing.
        noise_sigma (`float`):
            Standard deviation of the additive sensor noise, in intensity units, `>= 0`.
        smooth_radius (`int`):
            Half-width of the box blur, `>= 0`. `0` disables the blur.
        contrast (`float`):
            Dynamic-range compression factor in `(0, 1]`.
        base_level (`int`):
            Mean intensity in `[0, 255]`.
    """

    texture_scale: float
    noise_sigma: float
    smooth_radius: int
    contrast: float
    base_level: int

    def __post_init__(self):
        if not self.texture_scale > 0:
            raise ValueError(f"texture_scale must be > 0, got {self.texture_scale}.")
        if not self.noise_sigma >= 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}.")
        if isinstance(self.smooth_radius, bool) or not isinstance(
            self.smooth_radius, int
        ):
            raise ValueError("smooth_radius must be an integer.")
        if self.smooth_radius < 0:
            raise ValueError(f"smooth_radius must be >= 0, got {self.smooth_radius}.")
        if not 0 < self.contrast <= 1:
            raise ValueError(f"contrast must be in (0, 1], got {self.contrast}.")
        if isinstance(self.base_level, bool) or not isinstance(self.base_level, int):
            raise ValueError("base_level must be an integer.")
        if not 0 <= self.base_level <= PGM_MAXVAL:
            raise ValueError(f"base_level must be in [0, 255], got {self.base_level}.")

    def to_dict(self) -> Dict:
        return asdict(self)


def load_presets(path: Optional[Union[str, Path]] = None) -> Dict[str, SourceParams]:
    """Load named source presets from a YAML file.

    Args:
        path (`str` or `Path`, *optional*):
            YAML file mapping preset names to [`SourceParams`] fields. Defaults to the
            shipped `templates/sources.yaml`, which defines `source-A` and `source-B`.

    Returns:
        `Dict[str, SourceParams]`
    """
    path = Path(path) if path is not None else PRESETS_PATH
    with open(path, "r", encoding="utf-8") as f:
        content = yaml.safe_load(f) or {}
    if not isinstance(content, dict):
        raise ValueError(f"Presets file '{path}' must be a mapping of preset names.")
    return {name: SourceParams(**fields) for name, fields in content.items()}


def get_preset(name: str) -> SourceParams:
    presets = load_presets()
    if name not in presets:
        raise KeyError(
            f"Unknown source preset '{name}'. Available: {', '.join(sorted(presets))}."
        )
    return presets[name]


def _value_noise(
    rng: np.random.Generator, height: int, width: int, texture_scale: float
) -> np.ndarray:
    spacing = _BASE_LATTICE_SPACING / texture_scale
    lattice_shape = (
        math.ceil((height - 1) / spacing) + 2,
        math.ceil((width - 1) / spacing) + 2,
    )
    lattice = rng.uniform(-1.0, 1.0, size=lattice_shape)
    yy, xx = np.meshgrid(
        np.arange(height) / spacing, np.arange(width) / spacing, indexing="ij"
    )
    return _TEXTURE_AMPLITUDE * map_coordinates(lattice, [yy, xx], order=1)


@validate_stegcheck_args
def generate_cover(
    params: SourceParams, width: int, height: int, seed: int
) -> ImageGray:
    """Generate one deterministic cover image from a synthetic source.

    Args:
        params ([`SourceParams`]):
            The source.
        width (`int`):
            Image width, at least 16.
        height (`int`):
            Image height, at least 16.
        seed (`int`):
            64-bit seed. The same `(params, width, height, seed)` always yields the
            same image.

    Returns:
        [`ImageGray`]

    Raises:
        [`~utils.ImageShapeError`]: if `width` or `height` is below 16.
    """
    if width < MIN_SYNTH_SIZE or height < MIN_SYNTH_SIZE:
        raise ImageShapeError(
            f"Synthetic covers must be at least {MIN_SYNTH_SIZE}x{MIN_SYNTH_SIZE},"
            f" got {width}x{height}."
        )
    rng = make_generator(seed)
    values = _value_noise(rng, height, width, params.texture_scale)
    values = values + params.noise_sigma * rng.standard_normal((height, width))
    if params.smooth_radius > 0:
        size = 2 * params.smooth_radius + 1
        values = uniform_filter(values, size=size, mode="mirror")
    values = params.base_level + params.contrast * values
    pixels = np.clip(np.rint(values), 0, PGM_MAXVAL).astype(np.uint8)
    return ImageGray(pixels)


@validate_stegcheck_args
def generate_corpus(
    params: SourceParams, count: int, width: int, height: int, seed: int
) -> List[ImageGray]:
    """Generate `count` independent covers.

    Image `i` is `generate_cover(params, width, height, split_seed(seed, i))`.

    Raises:
        `ValueError`: if `count < 1`.
        [`~utils.ImageShapeError`]: if the dimensions are below 16.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}.")
    logger.info(f"Generating {count} synthetic covers of size {width}x{height}.")
    return [
        generate_cover(params, width, height, split_seed(seed, i))
        for i in tqdm(range(count), desc="synth", unit="img")
    ]
