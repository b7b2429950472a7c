# coding=utf-8
# Copyright 2022-present, the stegcheck authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Contains utilities to validate argument values in `stegcheck`."""
import inspect
import math
import numbers
from functools import wraps
from itertools import chain
from typing import Callable


SEED_UPPER_BOUND = 2**64


class StegValidationError(ValueError):
    """Generic exception thrown by `stegcheck` validators.

    Inherits from [`ValueError`](https://docs.python.org/3/library/exceptions.html#ValueError).
    """


def validate_stegcheck_args(fn: Callable) -> Callable:
    """Validate values received as argument for any public function of `stegcheck`.

    The goal of this decorator is to harmonize validation of arguments reused
    everywhere. By default, all defined validators are tested.

    Validators:
        - [`~utils.validate_rate`]: `rate` must be a real number in [0, 1].
        - [`~utils.validate_seed`]: `seed` must be an integer in [0, 2**64).

    Example:
    ```py
    >>> from stegcheck.utils import validate_stegcheck_args

    >>> @validate_stegcheck_args
    ... def my_embedding(img, rate: float, seed: int):
    ...     ...

    >>> my_embedding(img, rate=1.5, seed=0)
    stegcheck.utils._validators.StegValidationError: Rate must be in [0, 1], got 1.5.
    ```

    <Tip warning={true}>

    Raises:
        [`~utils.StegValidationError`]: If an input is not valid.

    </Tip>
    """
    signature = inspect.signature(fn)

    @wraps(fn)
    def _inner_fn(*args, **kwargs):
        for arg_name, arg_value in chain(
            zip(signature.parameters, args),  # Args values
            kwargs.items(),  # Kwargs values
        ):
            if arg_name == "rate":
                validate_rate(arg_value)
            elif arg_name == "seed":
                validate_seed(arg_value)

        return fn(*args, **kwargs)

    return _inner_fn


def validate_rate(rate: float) -> None:
    """Validate `rate` is an embedding rate in bits per pixel, between 0 and 1."""
    if isinstance(rate, bool) or not isinstance(rate, numbers.Real):
        raise StegValidationError(f"Rate must be a real number, not {type(rate)}.")
    if math.isnan(rate) or not 0.0 <= rate <= 1.0:
        raise StegValidationError(f"Rate must be in [0, 1], got {rate}.")


def validate_seed(seed: int) -> None:
    """Validate `seed` is a non-negative 64-bit integer."""
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise StegValidationError(f"Seed must be an integer, not {type(seed)}.")
    if not 0 <= seed < SEED_UPPER_BOUND:
        raise StegValidationError(f"Seed must be in [0, 2**64), got {seed}.")
