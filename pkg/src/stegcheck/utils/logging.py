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
"""Logging utilities.

Every module logs through a child of the `stegcheck` logger. Records are written
with `tqdm.write` so that they never tear a progress bar apart.
"""

import logging
import os
import sys
from logging import DEBUG, INFO, WARNING  # NOQA
from typing import Optional

from tqdm.auto import tqdm as _base_tqdm


log_levels = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

_default_log_level = logging.WARNING
_log_format = "[%(levelname)s|%(name)s] %(message)s"


class _TqdmHandler(logging.StreamHandler):
    def emit(self, record: logging.LogRecord) -> None:
        try:
            _base_tqdm.write(self.format(record), file=sys.stderr)
        except Exception:
            self.handleError(record)


def _get_library_root_logger() -> logging.Logger:
    return logging.getLogger(__name__.split(".")[0])


def _get_default_logging_level() -> int:
    """
    Level named by `STEGCHECK_VERBOSITY`, `_default_log_level` if unset or invalid.
    """
    env_level_str = os.getenv("STEGCHECK_VERBOSITY", None)
    if env_level_str:
        if env_level_str in log_levels:
            return log_levels[env_level_str]
        logging.getLogger().warning(
            f"Unknown option STEGCHECK_VERBOSITY={env_level_str}, "
            f"has to be one of: { ', '.join(log_levels.keys()) }"
        )
    return _default_log_level


def _configure_library_root_logger() -> None:
    library_root_logger = _get_library_root_logger()
    handler = _TqdmHandler()
    handler.setFormatter(logging.Formatter(_log_format))
    library_root_logger.addHandler(handler)
    library_root_logger.setLevel(_get_default_logging_level())
    library_root_logger.propagate = False


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Returns a logger under the `stegcheck` root.

    Args:
        name (`str`, *optional*):
            Usually `__name__`. Defaults to the library root logger.

    Example:

    ```python
    >>> from stegcheck.utils import logging

    >>> logger = logging.get_logger(__name__)
    >>> logging.set_verbosity_info()
    ```
    """
    if name is None:
        return _get_library_root_logger()
    return logging.getLogger(name)


def get_verbosity() -> int:
    """Return the current level of the `stegcheck` root logger."""
    return _get_library_root_logger().getEffectiveLevel()


def set_verbosity(verbosity: int) -> None:
    """
    Sets the level of the `stegcheck` root logger.

    Args:
        verbosity (`int`):
            Logging level, e.g. `stegcheck.utils.logging.DEBUG`.
    """
    _get_library_root_logger().setLevel(verbosity)


def set_verbosity_info():
    return set_verbosity(INFO)


def set_verbosity_debug():
    return set_verbosity(DEBUG)


_configure_library_root_logger()
