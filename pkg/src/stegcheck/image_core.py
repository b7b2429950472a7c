"""Grayscale images, binary PGM I/O and the mirror-padded convolution used everywhere.

Images are 8-bit and single channel. Only the binary `P5` flavour of PGM with a maxval
of 255 is read or written. Convolutions are "same"-size cross-correlations (kernels are
not flipped) over an edge-mirror extension that does not repeat the border pixel:
`[a, b, c]` padded by 1 is `[b, a, b, c, b]`.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy.signal import correlate2d

from .constants import PGM_MAGIC, PGM_MAXVAL
from .utils import (
    ImageShapeError,
    MalformedHeaderError,
    PGMParseError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedMagicError,
    UnsupportedMaxvalError,
    ZeroDimensionError,
    logging,
)


logger = logging.get_logger(__name__)

_PGM_WHITESPACE = b" \t\n\r\x0b\x0c"


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ImageGray:
    """Immutable 8-bit grayscale raster.

    Args:
        pixels (`np.ndarray`):
            Array of shape `(height, width)` and dtype `uint8`, row-major. The array is
            copied and made read-only.
    """

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise ImageShapeError(f"Image must be 2-dimensional, got {pixels.ndim}.")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ImageShapeError(f"Image must be at least 1x1, got {pixels.shape}.")
        if pixels.dtype != np.uint8:
            if pixels.size and (pixels.min() < 0 or pixels.max() > PGM_MAXVAL):
                raise ValueError("Pixel intensities must be in [0, 255].")
            if np.issubdtype(pixels.dtype, np.floating) and not np.array_equal(
                pixels, np.round(pixels)
            ):
                raise ValueError("Pixel intensities must be integers.")
        object.__setattr__(self, "pixels", _readonly(pixels.astype(np.uint8)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    @property
    def size(self) -> int:
        return self.pixels.size

    def to_plane(self) -> "RealPlane":
        return RealPlane(self.pixels.astype(np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageGray):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self) -> int:
        return hash((self.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"ImageGray(width={self.width}, height={self.height})"


@dataclass(frozen=True, eq=False)
class RealPlane:
    """Immutable plane of real values (residuals, costs, filter outputs).

    Args:
        values (`np.ndarray`):
            Array of shape `(height, width)`, converted to `float64`.
        allow_wet (`bool`, *optional*, defaults to `False`):
            Whether `+inf` (a wet pixel, in cost planes only) is accepted. NaN and
            `-inf` are never accepted.
    """

    values: np.ndarray
    allow_wet: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ImageShapeError(
                f"Plane must be a non-empty 2-dimensional array, got {values.shape}."
            )
        if np.isnan(values).any() or np.isneginf(values).any():
            raise ValueError("Plane values must not be NaN or -inf.")
        if not self.allow_wet and np.isposinf(values).any():
            raise ValueError("Plane values must be finite (plane is not a cost plane).")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RealPlane):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"RealPlane(width={self.width}, height={self.height})"


def _next_token(data: bytes, pos: int) -> Tuple[bytes, int]:
    """Read one header token starting at `pos`, skipping whitespace and comments."""
    n = len(data)
    while pos < n:
        byte = data[pos : pos + 1]
        if byte == b"#":
            end = data.find(b"\n", pos)
            pos = n if end < 0 else end + 1
        elif byte in _PGM_WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _PGM_WHITESPACE + b"#":
        pos += 1
    if start == pos:
        raise MalformedHeaderError("Unexpected end of PGM header.")
    return data[start:pos], pos


def _parse_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise MalformedHeaderError(
            f"PGM {field} must be a decimal integer, got {token!r}."
        )
    return int(token)


def load_pgm(data: bytes) -> ImageGray:
    """Decode a binary PGM (`P5`, maxval 255) file.

    The header follows the PNM convention: tokens are separated by whitespace and `#`
    starts a comment running to the end of the line. Exactly one whitespace byte
    separates the maxval from the pixel payload.

    Args:
        data (`bytes`):
            Content of the file.

    Returns:
        [`ImageGray`]: pixels in file order.

    Raises:
        [`~utils.UnsupportedMagicError`]: magic number other than `P5`.
        [`~utils.UnsupportedMaxvalError`]: maxval other than 255.
        [`~utils.TruncatedPayloadError`]: fewer than `width * height` payload bytes.
        [`~utils.ZeroDimensionError`]: zero width or height.
        [`~utils.MalformedHeaderError`]: missing or non-numeric header token.
        [`~utils.TrailingDataError`]: bytes after the payload.
    """
    data = bytes(data)
    magic = data[:2]
    if magic != PGM_MAGIC:
        raise UnsupportedMagicError(
            f"Unsupported PGM magic number {magic!r}, only 'P5' is supported."
        )
    pos = 2
    if len(data) > pos and data[pos : pos + 1] not in _PGM_WHITESPACE + b"#":
        raise MalformedHeaderError("Magic number must be followed by whitespace.")

    token, pos = _next_token(data, pos)
    width = _parse_int(token, "width")
    token, pos = _next_token(data, pos)
    height = _parse_int(token, "height")
    token, pos = _next_token(data, pos)
    maxval = _parse_int(token, "maxval")

    if width == 0 or height == 0:
        raise ZeroDimensionError(
            f"PGM dimensions must be positive, got {width}x{height}."
        )
    if maxval != PGM_MAXVAL:
        raise UnsupportedMaxvalError(f"Only maxval 255 is supported, got {maxval}.")
    if pos >= len(data) or data[pos : pos + 1] not in _PGM_WHITESPACE:
        raise TruncatedPayloadError("Missing whitespace between header and payload.")
    pos += 1

    expected = width * height
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"Pixel payload holds {len(payload)} bytes, expected {expected}."
        )
    if len(data) > pos + expected:
        raise TrailingDataError(
            f"{len(data) - pos - expected} unexpected byte(s) after the pixel payload."
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return ImageGray(pixels)


def save_pgm(img: ImageGray) -> bytes:
    """Encode `img` in canonical form: `"P5\\n<w> <h>\\n255\\n"` then raw pixels."""
    header = b"P5\n%d %d\n%d\n" % (img.width, img.height, PGM_MAXVAL)
    return header + img.pixels.tobytes()


def read_pgm(path: Union[str, Path]) -> ImageGray:
    """Read a PGM file. Parse errors are re-raised with the file name prepended."""
    path = Path(path)
    try:
        return load_pgm(path.read_bytes())
    except PGMParseError as e:
        raise type(e)(f"{path}: {e}") from e


def write_pgm(path: Union[str, Path], img: ImageGray) -> None:
    Path(path).write_bytes(save_pgm(img))


def _check_margin(shape: Tuple[int, int], margin_y: int, margin_x: int) -> None:
    if margin_y < 0 or margin_x < 0:
        raise ImageShapeError("Padding margin must be non-negative.")
    if margin_y > shape[0] or margin_x > shape[1]:
        raise ImageShapeError(
            f"Padding margin ({margin_y}, {margin_x}) too large for a plane of shape"
            f" {shape}."
        )


def _mirror_pad_array(values: np.ndarray, margin_y: int, margin_x: int) -> np.ndarray:
    _check_margin(values.shape, margin_y, margin_x)
    return np.pad(values, ((margin_y, margin_y), (margin_x, margin_x)), mode="reflect")


def mirror_pad(plane: RealPlane, margin: int) -> RealPlane:
    """Extend `plane` by `margin` pixels on each side with an edge mirror.

    The border pixel is not repeated: the row `[a, b, c]` padded by 1 becomes
    `[b, a, b, c, b]`. The interior is preserved exactly.

    Raises:
        [`~utils.ImageShapeError`]: if `margin > min(width, height)`.
    """
    if margin > min(plane.width, plane.height):
        raise ImageShapeError(
            f"Padding margin {margin} too large for a {plane.width}x{plane.height}"
            " plane."
        )
    return RealPlane(
        _mirror_pad_array(plane.values, margin, margin), allow_wet=plane.allow_wet
    )


def correlate_same(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Array form of [`convolve2d`], used internally by cost and texture code."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
        raise ImageShapeError(f"Kernel sides must be odd, got shape {kernel.shape}.")
    if values.shape[0] < kernel.shape[0] or values.shape[1] < kernel.shape[1]:
        raise ImageShapeError(
            f"Plane of shape {values.shape} is smaller than the kernel"
            f" {kernel.shape}."
        )
    padded = _mirror_pad_array(values, kernel.shape[0] // 2, kernel.shape[1] // 2)
    return correlate2d(padded, kernel, mode="valid")


def convolve2d(plane: RealPlane, kernel: np.ndarray) -> RealPlane:
    """Same-size correlation of `plane` with an odd-sided `kernel`, mirror padded.

    Kernels are applied without flipping. Output dimensions equal input dimensions.

    Raises:
        [`~utils.ImageShapeError`]: even-sided kernel or plane smaller than kernel.
    """
    return RealPlane(correlate_same(plane.values, kernel))
