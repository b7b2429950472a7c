#!/usr/bin/env python
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
# limitations under the License
"""Utility helpers to handle progress bars in `stegcheck`.

Corpus generation, embedding and feature extraction loop over hundreds of images and
report their progress through `stegcheck.utils.tqdm`.

Example:
    1. Use `stegcheck.utils.tqdm` as you would use `tqdm.tqdm` or `tqdm.auto.tqdm`.
    2. To disable progress bars, either use `disable_progress_bars()` helper or set the
       environment variable `STEGCHECK_DISABLE_PROGRESS_BARS` to 1.
    3. To re-enable progress bars, use `enable_progress_bars()`.
    4. To check whether progress bars are disabled, use `are_progress_bars_disabled()`.

NOTE: Environment variable `STEGCHECK_DISABLE_PROGRESS_BARS` has the priority.
"""
import warnings

from tqdm.auto import tqdm as old_tqdm

from ..constants import STEGCHECK_DISABLE_PROGRESS_BARS


# `STEGCHECK_DISABLE_PROGRESS_BARS` is `Optional[bool]` while
# `_progress_bars_disabled` is a `bool`. If the env variable is set to True or False,
# it has priority. If it is None, the user is free to enable/disable progress bars
# programmatically.
#
# By default, progress bars are enabled.
_progress_bars_disabled: bool = STEGCHECK_DISABLE_PROGRESS_BARS or False


def disable_progress_bars() -> None:
    """
    Disable globally progress bars used in `stegcheck` except if
    `STEGCHECK_DISABLE_PROGRESS_BARS` environment variable has been set.
    """
    if STEGCHECK_DISABLE_PROGRESS_BARS is False:
        warnings.warn(
            "Cannot disable progress bars: environment variable"
            " `STEGCHECK_DISABLE_PROGRESS_BARS=0` is set and has priority."
        )
        return
    global _progress_bars_disabled
    _progress_bars_disabled = True


def enable_progress_bars() -> None:
    """
    Enable globally progress bars used in `stegcheck` except if
    `STEGCHECK_DISABLE_PROGRESS_BARS` environment variable has been set.
    """
    if STEGCHECK_DISABLE_PROGRESS_BARS is True:
        warnings.warn(
            "Cannot enable progress bars: environment variable"
            " `STEGCHECK_DISABLE_PROGRESS_BARS=1` is set and has priority."
        )
        return
    global _progress_bars_disabled
    _progress_bars_disabled = False


def are_progress_bars_disabled() -> bool:
    """Return whether progress bars are globally disabled or not."""
    global _progress_bars_disabled
    return _progress_bars_disabled


class tqdm(old_tqdm):
    """
    Class to override `disable` argument in case progress bars are globally disabled.
    """

    def __init__(self, *args, **kwargs):
        if are_progress_bars_disabled():
            kwargs["disable"] = True
        super().__init__(*args, **kwargs)
