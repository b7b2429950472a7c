import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

from stegcheck.embedding import embed_lsbm
from stegcheck.features import (
    FeatureConfig,
    FeatureVector,
    compute_residual,
    cooccurrence,
    extract_features,
    extract_features_batch,
    read_feature_csv,
    write_feature_csv,
)
from stegcheck.image_core import ImageGray
from stegcheck.utils import (
    FeatureDimensionError,
    ImageShapeError,
    NonFiniteFeatureError,
)

from .testing_utils import SMALL_FEATURE_CFG, random_image, synthetic_covers


class TestFeatureConfig(unittest.TestCase):
    def test_default_dimension(self) -> None:
        # 3 kinds x 2 quantizations x 2 directions x 5**4 bins.
        self.assertEqual(FeatureConfig().dimension, 7500)

    def test_small_dimension(self) -> None:
        self.assertEqual(SMALL_FEATURE_CFG.bins, 27)
        self.assertEqual(SMALL_FEATURE_CFG.dimension, 27)

    def test_lists_become_tuples(self) -> None:
        cfg = FeatureConfig(residual_kinds=["KB"], quantizations=[2])
        self.assertEqual(cfg.residual_kinds, ("KB",))
        self.assertEqual(cfg, FeatureConfig(residual_kinds=("KB",), quantizations=(2,)))

    def test_block_order(self) -> None:
        cfg = FeatureConfig(residual_kinds=("FIRST_ORDER", "KB"), quantizations=(1, 2))
        self.assertEqual(
            cfg.blocks()[:3],
            [
                ("FIRST_ORDER", 1, "HORIZONTAL"),
                ("FIRST_ORDER", 1, "VERTICAL"),
                ("FIRST_ORDER", 2, "HORIZONTAL"),
            ],
        )

    def test_fingerprint(self) -> None:
        self.assertEqual(FeatureConfig().fingerprint, FeatureConfig().fingerprint)
        self.assertNotEqual(
            FeatureConfig().fingerprint, FeatureConfig(truncation=3).fingerprint
        )
        self.assertEqual(len(FeatureConfig().fingerprint), 64)

    def test_invalid(self) -> None:
        for kwargs in (
            {"residual_kinds": ("THIRD_ORDER",)},
            {"residual_kinds": ()},
            {"quantizations": (3,)},
            {"truncation": 0},
            {"cooc_order": 5},
            {"directions": ("DIAGONAL",)},
        ):
            with self.subTest(**kwargs):
                with self.assertRaises(ValueError):
                    FeatureConfig(**kwargs)


class TestFeatureVector(unittest.TestCase):
    def test_read_only(self) -> None:
        vector = FeatureVector(np.zeros(4))
        self.assertEqual(vector.dim, 4)
        with self.assertRaises(ValueError):
            vector.values[0] = 1.0

    def test_non_finite(self) -> None:
        with self.assertRaises(NonFiniteFeatureError):
            FeatureVector(np.array([0.0, np.nan]))


class TestResiduals(unittest.TestCase):
    def setUp(self) -> None:
        self.img = ImageGray(np.array([[0, 1, 3, 6, 10]] * 4, dtype=np.uint8))

    def test_first_order(self) -> None:
        residual = compute_residual(self.img, "FIRST_ORDER", 1, 10)
        np.testing.assert_array_equal(residual, [[1, 2, 3, 4]] * 4)

    def test_second_order(self) -> None:
        residual = compute_residual(self.img, "SECOND_ORDER", 1, 10)
        np.testing.assert_array_equal(residual, [[1, 1, 1]] * 4)

    def test_truncation(self) -> None:
        residual = compute_residual(self.img, "FIRST_ORDER", 1, 2)
        np.testing.assert_array_equal(residual, [[1, 2, 2, 2]] * 4)

    def test_quantization_rounds_half_away_from_zero(self) -> None:
        img = ImageGray(np.array([[10, 11, 14, 19]] * 2, dtype=np.uint8))
        # Differences 1, 3, 5 divided by 2: 0.5, 1.5, 2.5.
        residual = compute_residual(img, "FIRST_ORDER", 2, 5)
        np.testing.assert_array_equal(residual, [[1, 2, 3]] * 2)
        flipped = ImageGray(img.pixels[:, ::-1])
        residual = compute_residual(flipped, "FIRST_ORDER", 2, 5)
        np.testing.assert_array_equal(residual, [[-3, -2, -1]] * 2)

    def test_vertical_is_transposed_horizontal(self) -> None:
        img = random_image(0, 20, 24)
        transposed = ImageGray(img.pixels.T)
        for kind in ("FIRST_ORDER", "SECOND_ORDER", "KB"):
            with self.subTest(kind=kind):
                np.testing.assert_array_equal(
                    compute_residual(img, kind, 1, 2, "VERTICAL"),
                    compute_residual(transposed, kind, 1, 2, "HORIZONTAL").T,
                )

    def test_kb_valid_region(self) -> None:
        img = random_image(1, 10, 12)
        self.assertEqual(compute_residual(img, "KB", 1, 2).shape, (8, 10))

    def test_kb_of_constant_image(self) -> None:
        img = ImageGray(np.full((5, 5), 200, dtype=np.uint8))
        self.assertFalse(compute_residual(img, "KB", 1, 2).any())

    def test_unsupported(self) -> None:
        with self.assertRaises(ValueError):
            compute_residual(self.img, "FOURTH_ORDER", 1, 2)
        with self.assertRaises(ValueError):
            compute_residual(self.img, "KB", 1, 2, "DIAGONAL")


class TestCooccurrence(unittest.TestCase):
    def test_bin_encoding(self) -> None:
        residual = np.array([[-1, 0, 1]])
        histogram = cooccurrence(residual, "HORIZONTAL", 3, 1)
        # (-1, 0, 1) -> 0 * 9 + 1 * 3 + 2.
        expected = np.zeros(27)
        expected[5] = 1
        np.testing.assert_array_equal(histogram, expected)

    def test_total_mass(self) -> None:
        residual = compute_residual(random_image(2, 16, 16), "FIRST_ORDER", 1, 2)
        histogram = cooccurrence(residual, "HORIZONTAL", 4, 2)
        self.assertEqual(histogram.size, 625)
        self.assertEqual(histogram.sum(), 16 * (15 - 3))
        vertical = cooccurrence(residual, "VERTICAL", 4, 2)
        self.assertEqual(vertical.sum(), 15 * (16 - 3))

    def test_window_too_long(self) -> None:
        with self.assertRaises(ImageShapeError):
            cooccurrence(np.zeros((5, 3), dtype=int), "HORIZONTAL", 4, 2)

    def test_values_outside_truncation(self) -> None:
        with self.assertRaises(ValueError):
            cooccurrence(np.array([[0, 3, 0, 0]]), "HORIZONTAL", 4, 2)


class TestExtractFeatures(unittest.TestCase):
    def test_dimension_and_normalization(self) -> None:
        vector = extract_features(random_image(3), FeatureConfig())
        self.assertEqual(vector.dim, 7500)
        blocks = vector.values.reshape(12, 625)
        np.testing.assert_allclose(blocks.sum(axis=1), 1.0)

    def test_raw_counts(self) -> None:
        cfg = FeatureConfig(residual_kinds=("SECOND_ORDER",), normalize=False)
        vector = extract_features(random_image(4, 16, 20), cfg)
        blocks = vector.values.reshape(4, 625)
        # Horizontal second order: 16 rows x 18 samples, windows of 4.
        self.assertEqual(blocks[0].sum(), 16 * 15)
        self.assertEqual(blocks[1].sum(), 20 * 11)

    def test_constant_image_fills_the_zero_bin(self) -> None:
        img = ImageGray(np.full((16, 16), 90, dtype=np.uint8))
        vector = extract_features(img, SMALL_FEATURE_CFG)
        # Bin of (0, 0, 0) with T = 1: 1 * 9 + 1 * 3 + 1.
        self.assertEqual(vector.values[13], 1.0)
        self.assertEqual(vector.values.sum(), 1.0)

    def test_stego_difference_grows_with_rate(self) -> None:
        covers = synthetic_covers(20, size=64, seed=5)
        cfg = FeatureConfig()

        def mean_squared_difference(rate: float) -> float:
            total = 0.0
            for i, cover in enumerate(covers):
                stego = embed_lsbm(cover, rate, i)
                cover_features = extract_features(cover, cfg).values
                diff = cover_features - extract_features(stego, cfg).values
                total += float(np.mean(diff**2))
            return total / len(covers)

        low, high = mean_squared_difference(0.1), mean_squared_difference(0.4)
        self.assertGreater(low, 0.0)
        self.assertGreater(high, low)

    def test_too_small(self) -> None:
        with self.assertRaises(ImageShapeError):
            extract_features(random_image(0, 15, 32), SMALL_FEATURE_CFG)

    def test_deterministic(self) -> None:
        img = random_image(5)
        cfg = FeatureConfig()
        self.assertEqual(extract_features(img, cfg), extract_features(img, cfg))

    def test_batch(self) -> None:
        images = [random_image(i) for i in range(3)]
        matrix = extract_features_batch(images, SMALL_FEATURE_CFG)
        self.assertEqual(matrix.shape, (3, 27))
        np.testing.assert_array_equal(
            matrix[1], extract_features(images[1], SMALL_FEATURE_CFG).values
        )


class TestFeatureCSV(unittest.TestCase):
    def test_write_and_read(self) -> None:
        matrix = np.array([[0.1, 1 / 3, 0.0], [2.5e-17, 1.0, 0.75]])
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "features.csv"
            write_feature_csv(path, matrix, ["COVER", "STEGO"])
            self.assertEqual(
                path.read_text().splitlines()[0], "label,f0,f1,f2"
            )
            values, labels = read_feature_csv(path)
        np.testing.assert_array_equal(values, matrix)
        self.assertEqual(labels, ["COVER", "STEGO"])

    def test_without_labels(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "features.csv"
            write_feature_csv(path, np.ones((2, 2)))
            _, labels = read_feature_csv(path)
        self.assertIsNone(labels)

    def test_label_count_mismatch(self) -> None:
        with TemporaryDirectory() as tmpdir:
            with self.assertRaises(FeatureDimensionError):
                write_feature_csv(Path(tmpdir) / "f.csv", np.ones((2, 2)), ["COVER"])

    def test_ragged_rows(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "features.csv"
            path.write_text("label,f0,f1\nCOVER,0.1,0.2\nSTEGO,0.3\n")
            with self.assertRaises(FeatureDimensionError):
                read_feature_csv(path)
