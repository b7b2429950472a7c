import unittest
from unittest.mock import Mock, patch

from stegcheck.utils import (
    StegValidationError,
    validate_rate,
    validate_seed,
    validate_stegcheck_args,
)


@patch("stegcheck.utils._validators.validate_seed")
@patch("stegcheck.utils._validators.validate_rate")
class TestStegcheckValidator(unittest.TestCase):
    """Test `validate_stegcheck_args` decorator calls all default validators."""

    def test_validate_as_args(self, rate_mock: Mock, seed_mock: Mock) -> None:
        """Test validators are called when values are passed as args."""
        self.dummy_function("image", 0.4, 7)
        rate_mock.assert_called_once_with(0.4)
        seed_mock.assert_called_once_with(7)

    def test_validate_as_kwargs(self, rate_mock: Mock, seed_mock: Mock) -> None:
        """Test validators are called when values are passed as kwargs."""
        self.dummy_function("image", seed=7, rate=0.4)
        rate_mock.assert_called_once_with(0.4)
        seed_mock.assert_called_once_with(7)

    def test_other_arguments_are_ignored(
        self, rate_mock: Mock, seed_mock: Mock
    ) -> None:
        self.other_function(0.4, 7)
        rate_mock.assert_not_called()
        seed_mock.assert_not_called()

    @staticmethod
    @validate_stegcheck_args
    def dummy_function(img, rate: float, seed: int) -> None:
        pass

    @staticmethod
    @validate_stegcheck_args
    def other_function(alpha: float, count: int) -> None:
        pass


class TestRateValidator(unittest.TestCase):
    VALID_VALUES = (0, 0.0, 0.05, 0.4, 1, 1.0)
    NOT_VALID_VALUES = (
        -0.1,  # Negative
        1.01,  # More than one bit per pixel
        float("nan"),
        "0.4",  # Must be a number
        True,  # Booleans are not rates
        None,
    )

    def test_valid_rates(self) -> None:
        for rate in self.VALID_VALUES:
            validate_rate(rate)

    def test_not_valid_rates(self) -> None:
        for rate in self.NOT_VALID_VALUES:
            with self.assertRaises(
                StegValidationError, msg=f"'{rate}' must not be valid"
            ):
                validate_rate(rate)

    def test_is_a_value_error(self) -> None:
        self.assertTrue(issubclass(StegValidationError, ValueError))


class TestSeedValidator(unittest.TestCase):
    VALID_VALUES = (0, 1, 2**63, 2**64 - 1)
    NOT_VALID_VALUES = (-1, 2**64, 1.0, "3", False, None)

    def test_valid_seeds(self) -> None:
        for seed in self.VALID_VALUES:
            validate_seed(seed)

    def test_not_valid_seeds(self) -> None:
        for seed in self.NOT_VALID_VALUES:
            with self.assertRaises(
                StegValidationError, msg=f"'{seed}' must not be valid"
            ):
                validate_seed(seed)
