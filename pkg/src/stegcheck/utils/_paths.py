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
"""Contains utilities to handle image directories."""
from fnmatch import fnmatch
from pathlib import Path
from typing import Generator, Iterable, List, Optional, Union


def filter_paths(
    items: Iterable[Union[str, Path]],
    *,
    allow_patterns: Optional[Union[List[str], str]] = None,
    ignore_patterns: Optional[Union[List[str], str]] = None,
) -> Generator[Path, None, None]:
    """Filter paths based on an allowlist and a denylist applied to their file name.

    Patterns are Unix shell-style wildcards which are NOT regular expressions. See
    https://docs.python.org/3/library/fnmatch.html for more details.

    Args:
        items (`Iterable`):
            Paths to filter.
        allow_patterns (`str` or `List[str]`, *optional*):
            If provided, file names must match at least one pattern.
        ignore_patterns (`str` or `List[str]`, *optional*):
            If provided, file names must not match any pattern.

    Example:
    ```python
    >>> [p.name for p in filter_paths(
    ...     ["a.pgm", "b.PGM", ".c.pgm", "manifest.csv"],
    ...     allow_patterns=["*.pgm"],
    ...     ignore_patterns=[".*"],
    ... )]
    ['a.pgm']
    ```
    """
    if isinstance(allow_patterns, str):
        allow_patterns = [allow_patterns]

    if isinstance(ignore_patterns, str):
        ignore_patterns = [ignore_patterns]

    for item in items:
        path = Path(item)
        name = path.name

        # Skip if there's an allowlist and name doesn't match any
        if allow_patterns is not None and not any(
            fnmatch(name, r) for r in allow_patterns
        ):
            continue

        # Skip if there's a denylist and name matches any
        if ignore_patterns is not None and any(
            fnmatch(name, r) for r in ignore_patterns
        ):
            continue

        yield path


def list_images(directory: Union[str, Path]) -> List[Path]:
    """Sorted list of the visible `*.pgm` files of `directory`.

    Raises:
        `NotADirectoryError`: if `directory` does not exist or is not a directory.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(f"Not an image directory: '{directory}'.")
    return sorted(
        filter_paths(
            (p for p in directory.iterdir() if p.is_file()),
            allow_patterns="*.pgm",
            ignore_patterns=".*",
        ),
        key=lambda p: p.name,
    )
