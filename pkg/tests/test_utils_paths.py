import unittest
from pathlib import Path
from tempfile import TemporaryDirectory
from typing import Any, Callable, List, Optional, Union

from stegcheck.utils import filter_paths, list_images


DUMMY_FILES = ["cover_000001.pgm", "cover_000002.pgm", "manifest.csv", ".hidden.pgm"]
DUMMY_PATHS = [Path("covers") / name for name in DUMMY_FILES]


class TestPathsUtils(unittest.TestCase):
    def test_get_all_paths(self) -> None:
        """Get all paths without filtering."""
        self._check(items=DUMMY_FILES, expected_names=DUMMY_FILES)

    def test_get_all_paths_with_empty_list(self) -> None:
        """Get all paths with an empty allow_patterns list."""
        self._check(items=DUMMY_FILES, expected_names=[], allow_patterns=[])

    def test_ignore_nothing_with_empty_list(self) -> None:
        self._check(items=DUMMY_FILES, expected_names=DUMMY_FILES, ignore_patterns=[])

    def test_allow_images(self) -> None:
        self._check(
            items=DUMMY_FILES,
            expected_names=["cover_000001.pgm", "cover_000002.pgm", ".hidden.pgm"],
            allow_patterns="*.pgm",
        )

    def test_allow_and_ignore(self) -> None:
        self._check(
            items=DUMMY_PATHS,
            expected_names=["cover_000001.pgm", "cover_000002.pgm"],
            allow_patterns=["*.pgm"],
            ignore_patterns=[".*"],
        )

    def test_patterns_apply_to_the_file_name(self) -> None:
        """A directory component never matches a pattern."""
        self._check(
            items=[Path(".cache") / "a.pgm", Path("stego") / "b.pgm"],
            expected_names=["a.pgm", "b.pgm"],
            ignore_patterns=".*",
        )

    def test_yields_paths(self) -> None:
        self.assertTrue(
            all(isinstance(p, Path) for p in filter_paths(DUMMY_FILES)),
        )

    def _check(
        self,
        items: List[Any],
        expected_names: List[str],
        allow_patterns: Optional[Union[List[str], str]] = None,
        ignore_patterns: Optional[Union[List[str], str]] = None,
        key: Callable[[Path], str] = lambda p: p.name,
    ) -> None:
        self.assertEqual(
            [
                key(path)
                for path in filter_paths(
                    items=items,
                    allow_patterns=allow_patterns,
                    ignore_patterns=ignore_patterns,
                )
            ],
            expected_names,
        )


class TestListImages(unittest.TestCase):
    def test_sorted_visible_pgm_files(self) -> None:
        with TemporaryDirectory() as tmpdir:
            root = Path(tmpdir)
            for name in ["b.pgm", "a.pgm", ".c.pgm", "notes.txt", "d.PGM"]:
                (root / name).write_bytes(b"")
            (root / "sub.pgm").mkdir()
            self.assertEqual([p.name for p in list_images(root)], ["a.pgm", "b.pgm"])

    def test_empty_directory(self) -> None:
        with TemporaryDirectory() as tmpdir:
            self.assertEqual(list_images(tmpdir), [])

    def test_missing_directory(self) -> None:
        with TemporaryDirectory() as tmpdir:
            with self.assertRaises(NotADirectoryError):
                list_images(Path(tmpdir) / "missing")
