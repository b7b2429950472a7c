import os
import unittest
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from stegcheck.features import FeatureConfig
from stegcheck.image_core import ImageGray, write_pgm
from stegcheck.synth_corpus import generate_corpus, get_preset
from stegcheck.utils import logging, make_generator


logger = logging.get_logger(__name__)

# Small feature set (27 dimensions) used by the quick end-to-end tests.
SMALL_FEATURE_CFG = FeatureConfig(
    residual_kinds=("FIRST_ORDER",),
    quantizations=(1,),
    truncation=1,
    cooc_order=3,
    directions=("HORIZONTAL",),
)

_TRUE_VALUES = {"y", "yes", "t", "true", "on", "1"}
_FALSE_VALUES = {"n", "no", "f", "false", "off", "0"}


def parse_flag_from_env(key, default=False):
    try:
        value = os.environ[key]
    except KeyError:
        # KEY isn't set, default to `default`.
        return default
    if value.lower() in _TRUE_VALUES:
        return True
    if value.lower() in _FALSE_VALUES:
        return False
    # More values are supported, but let's keep the message simple.
    raise ValueError("If set, {} must be yes or no.".format(key))


_run_slow_tests = parse_flag_from_env("RUN_SLOW_TESTS", default=False)


def require_slow(test_case):
    """
    Decorator marking a statistical end-to-end test.

    These tests train full-size detectors on hundreds of synthetic images and are
    skipped by default. Set the RUN_SLOW_TESTS environment variable to a truthy value
    to run them.
    """
    if not _run_slow_tests:
        return unittest.skip("slow statistical test")(test_case)
    else:
        return test_case


def random_image(seed: int, height: int = 32, width: int = 32) -> ImageGray:
    """Uniform noise image, a worst case for smoothness-based costs."""
    rng = make_generator(seed)
    return ImageGray(rng.integers(0, 256, size=(height, width), dtype=np.uint8))


def synthetic_covers(
    count: int, preset: str = "source-A", size: int = 32, seed: int = 0
) -> List[ImageGray]:
    return generate_corpus(get_preset(preset), count, size, size, seed)


def write_images(
    directory: Union[str, Path], images: Sequence[ImageGray], prefix: str = "img"
) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(images):
        path = directory / f"{prefix}_{i:03d}.pgm"
        write_pgm(path, img)
        paths.append(path)
    return paths


def small_experiment_yaml(output_dir: Union[str, Path], **sections) -> str:
    """Experiment file for a fast run on 32x32 covers and a 27-dimensional feature set.

    Keyword arguments override whole sections, e.g.
    `test={"source": "source-B", "n_cover": 4, "n_stego": 4}`.
    """
    base = {
        "run": {
            "master_seed": 3,
            "output_dir": str(output_dir),
            "width": 32,
            "height": 32,
        },
        "train": {"source": "source-A", "n_covers": 20},
        "test": {"source": "source-A", "n_cover": 6, "n_stego": 6},
        "features": {
            "residual_kinds": ["FIRST_ORDER"],
            "quantizations": [1],
            "truncation": 1,
            "cooc_order": 3,
            "directions": ["HORIZONTAL"],
        },
        "ensemble": {"n_learners": 5, "subspace_dim": 10},
    }
    for name, values in sections.items():
        base.setdefault(name, {}).update(values)
    lines = []
    for name, values in base.items():
        lines.append(f"{name}:")
        for key, value in values.items():
            if isinstance(value, list):
                value = "[" + ", ".join(str(v) for v in value) + "]"
            elif isinstance(value, bool):
                value = str(value).lower()
            elif value is None:
                value = "null"
            lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"
