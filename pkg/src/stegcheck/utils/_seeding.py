"""Deterministic seed derivation.

Every random decision of a run is keyed by a seed derived from the run's master seed
and a role path, so results never depend on execution order or thread scheduling.

Derivation rule: the seed for role path `(r1, r2, ...)` under `master` is the first 8
bytes, read big-endian, of `sha256("<master>/<r1>/<r2>/...")`.

Random draws come from `numpy.random.Philox`, a counter-based generator: draw `j` of a
stream depends only on `(seed, j)`.
"""
from hashlib import sha256
from typing import Union

import numpy as np


def derive_seed(master_seed: int, *role: Union[str, int]) -> int:
    """Return the 64-bit seed of `role` under `master_seed`.

    Example:
    ```py
    >>> derive_seed(7, "embed", "test-b", 3) == derive_seed(7, "embed", "test-b", 3)
    True
    >>> derive_seed(7, "learner", 0) != derive_seed(7, "learner", 1)
    True
    ```
    """
    path = "/".join([str(int(master_seed))] + [str(part) for part in role])
    return int.from_bytes(sha256(path.encode("utf-8")).digest()[:8], "big")


def split_seed(seed: int, index: int) -> int:
    """Seed of the `index`-th image of a corpus generated with `seed`."""
    return derive_seed(seed, "image", index)


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by `seed`."""
    return np.random.Generator(np.random.Philox(key=int(seed)))
