import unittest
from dataclasses import dataclass
from hashlib import sha256
from typing import Tuple

from stegcheck.features import FeatureConfig
from stegcheck.utils import fingerprint
from stegcheck.utils.sha import sha_iter


@dataclass(frozen=True)
class DummyConfig:
    order: int
    kinds: Tuple[str, ...]


class TestShaUtils(unittest.TestCase):
    def test_sha_iter_matches_hashlib(self) -> None:
        chunks = [b"P5 ", b"16 16 ", b"255\n", bytes(256)]
        self.assertEqual(sha_iter(chunks), sha256(b"".join(chunks)).digest())

    def test_sha_iter_empty(self) -> None:
        self.assertEqual(sha_iter([]).hex(), sha256().hexdigest())

    def test_fingerprint_is_canonical(self) -> None:
        self.assertEqual(
            fingerprint({"b": 1, "a": [1, 2]}), fingerprint({"a": [1, 2], "b": 1})
        )
        self.assertEqual(fingerprint({"a": 1}), sha256(b'{"a":1}').hexdigest())

    def test_fingerprint_of_dataclass(self) -> None:
        config = DummyConfig(order=2, kinds=("h", "v"))
        as_dict = {"order": 2, "kinds": ["h", "v"]}
        self.assertEqual(fingerprint(config), fingerprint(as_dict))
        self.assertNotEqual(fingerprint(config), fingerprint(DummyConfig(1, ("h",))))

    def test_feature_config_fingerprint(self) -> None:
        self.assertEqual(fingerprint(FeatureConfig()), fingerprint(FeatureConfig()))
        self.assertEqual(len(fingerprint(FeatureConfig())), 64)
