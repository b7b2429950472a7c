"""Exceptions raised by `stegcheck`.

Every failure named by a public operation has its own class so that callers can catch
exactly what they expect. All of them derive from [`StegcheckError`], which is what the
CLI turns into a single machine-readable error line.
"""
from typing import Optional


class StegcheckError(Exception):
    """Base class of every error raised by `stegcheck`."""


class PGMParseError(StegcheckError, ValueError):
    """
    Raised when bytes cannot be decoded as a binary 8-bit PGM image.

    Example:

    ```py
    >>> from stegcheck.image_core import load_pgm
    >>> load_pgm(b"P6 2 2 255\\n" + bytes(12))
    (...)
    stegcheck.utils._errors.UnsupportedMagicError: Unsupported PGM magic number b'P6', only 'P5' is supported.
    ```
    """


class UnsupportedMagicError(PGMParseError):
    """The file does not start with the `P5` magic number."""


class UnsupportedMaxvalError(PGMParseError):
    """The header declares a maxval other than 255."""


class TruncatedPayloadError(PGMParseError):
    """The pixel payload holds fewer bytes than `width * height`."""


class ZeroDimensionError(PGMParseError):
    """The header declares a zero width or height."""


class MalformedHeaderError(PGMParseError):
    """A header token is missing or is not a decimal integer."""


class TrailingDataError(PGMParseError):
    """Bytes remain after the pixel payload (only single-image files are accepted)."""


class ImageShapeError(StegcheckError, ValueError):
    """
    Raised when image or plane dimensions do not fit an operation: image too small
    for a kernel support, mismatched dimensions, even-sided kernel, or padding margin
    larger than the plane.
    """


class PayloadCapacityError(StegcheckError, ValueError):
    """Raised when the requested payload exceeds `n_dry * log2(3)` bits."""


class CalibrationError(StegcheckError):
    """
    Raised when the bisection on the Lagrange multiplier did not reach the target
    payload within the iteration cap.

    Both the achieved and the target payloads are kept on the exception.
    """

    def __init__(self, message: str, achieved_bits: float, target_bits: float):
        self.achieved_bits = achieved_bits
        self.target_bits = target_bits
        super().__init__(
            f"{message} (achieved {achieved_bits:.6g} bits, target"
            f" {target_bits:.6g} bits)"
        )


class SingleClassError(StegcheckError, ValueError):
    """Raised when training data holds a single class."""


class NonFiniteFeatureError(StegcheckError, ValueError):
    """Raised when a feature matrix contains NaN or infinite values."""


class FeatureDimensionError(StegcheckError, ValueError):
    """Raised when a feature vector or subspace size does not match the model."""


class EmptyDatasetError(StegcheckError, ValueError):
    """Raised when an operation receives fewer images than it needs."""


class UnlabeledDatasetError(StegcheckError, ValueError):
    """Raised when training is attempted on a dataset pair without labels."""


class LabelLengthError(StegcheckError, ValueError):
    """Raised when the number of labels differs from the number of samples."""


class FingerprintMismatchError(StegcheckError):
    """
    Raised when the feature configuration used at detection time differs from the one
    the detectors were trained with.
    """


class UnmatchedFilesError(StegcheckError):
    """Raised when two image directories do not hold the same file names."""


class ModelFormatError(StegcheckError, ValueError):
    """Raised when a saved model file cannot be read or has a newer format version."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ConfigError(StegcheckError, ValueError):
    """
    Raised when an experiment configuration cannot be parsed or holds unknown keys or
    ill-typed values.

    Example:

    ```py
    >>> load_experiment_config("experiment.yaml")
    (...)
    stegcheck.utils._errors.ConfigError: line 7: unknown key 'rtae' in section 'train'.
    ```
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class OutputDirLockedError(StegcheckError):
    """Raised when another run already holds the lock on an output directory."""
