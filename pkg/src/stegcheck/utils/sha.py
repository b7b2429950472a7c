"""Utilities to fingerprint configurations with SHA 256."""

import json
from dataclasses import asdict, is_dataclass
from hashlib import sha256
from typing import Any, Iterable


def sha_iter(iterable: Iterable[bytes]) -> bytes:
    sha = sha256()
    for chunk in iterable:
        sha.update(chunk)
    return sha.digest()


def fingerprint(obj: Any) -> str:
    """
    Hex SHA 256 of the canonical JSON form of `obj` (sorted keys, no whitespace).

    Args:
        obj (dataclass instance or JSON-serializable value):
            Typically a [`~features.FeatureConfig`].

    Returns:
        `str`: 64 hexadecimal characters.
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    canonical = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=list)
    return sha_iter([canonical.encode("utf-8")]).hex()
