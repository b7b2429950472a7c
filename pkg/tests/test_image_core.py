import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

from stegcheck.image_core import (
    ImageGray,
    RealPlane,
    convolve2d,
    load_pgm,
    mirror_pad,
    read_pgm,
    save_pgm,
    write_pgm,
)
from stegcheck.utils import (
    ImageShapeError,
    MalformedHeaderError,
    PGMParseError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedMagicError,
    UnsupportedMaxvalError,
    ZeroDimensionError,
    make_generator,
)

from .testing_utils import random_image


class TestImageGray(unittest.TestCase):
    def test_dimensions(self) -> None:
        img = ImageGray(np.zeros((3, 5), dtype=np.uint8))
        self.assertEqual(img.width, 5)
        self.assertEqual(img.height, 3)
        self.assertEqual(img.size, 15)

    def test_pixels_are_read_only(self) -> None:
        img = random_image(0, 4, 4)
        with self.assertRaises(ValueError):
            img.pixels[0, 0] = 1

    def test_input_array_is_copied(self) -> None:
        array = np.zeros((2, 2), dtype=np.uint8)
        img = ImageGray(array)
        array[0, 0] = 9
        self.assertEqual(img.pixels[0, 0], 0)

    def test_integer_arrays_are_converted(self) -> None:
        img = ImageGray(np.array([[0, 255], [3, 4]]))
        self.assertEqual(img.pixels.dtype, np.uint8)

    def test_out_of_range_values(self) -> None:
        with self.assertRaises(ValueError):
            ImageGray(np.array([[0, 256]]))
        with self.assertRaises(ValueError):
            ImageGray(np.array([[-1, 0]]))

    def test_wrong_shape(self) -> None:
        with self.assertRaises(ImageShapeError):
            ImageGray(np.zeros(4, dtype=np.uint8))
        with self.assertRaises(ImageShapeError):
            ImageGray(np.zeros((0, 4), dtype=np.uint8))

    def test_equality(self) -> None:
        self.assertEqual(random_image(1), random_image(1))
        self.assertNotEqual(random_image(1), random_image(2))


class TestPGMCodec(unittest.TestCase):
    def test_canonical_encoding(self) -> None:
        img = ImageGray(np.array([[1, 2, 3], [4, 5, 6]], dtype=np.uint8))
        self.assertEqual(save_pgm(img), b"P5\n3 2\n255\n\x01\x02\x03\x04\x05\x06")

    def test_decode(self) -> None:
        img = load_pgm(b"P5\n2 2\n255\n\x00\x10\x20\xff")
        np.testing.assert_array_equal(img.pixels, [[0, 16], [32, 255]])

    def test_round_trip(self) -> None:
        img = random_image(3, 17, 9)
        self.assertEqual(load_pgm(save_pgm(img)), img)

    def test_header_comments_and_whitespace(self) -> None:
        data = b"P5 # made by hand\n# another comment\n 2\t1 \n255\n\x07\x08"
        np.testing.assert_array_equal(load_pgm(data).pixels, [[7, 8]])

    def test_comment_right_after_magic(self) -> None:
        data = b"P5#comment\n1 1\n255\n\x05"
        self.assertEqual(load_pgm(data).pixels[0, 0], 5)

    def test_payload_byte_that_looks_like_whitespace(self) -> None:
        # The single separator after maxval is consumed, the payload starts right after.
        data = b"P5\n2 1\n255\n\n\x01"
        np.testing.assert_array_equal(load_pgm(data).pixels, [[10, 1]])

    def test_errors(self) -> None:
        cases = [
            (b"P2\n1 1\n255\n0", UnsupportedMagicError),
            (b"P6\n1 1\n255\n\x00\x00\x00", UnsupportedMagicError),
            (b"P5\n1 1\n65535\n\x00\x00", UnsupportedMaxvalError),
            (b"P5\n1 1\n127\n\x00", UnsupportedMaxvalError),
            (b"P5\n2 2\n255\n\x00\x00\x00", TruncatedPayloadError),
            (b"P5\n2 2\n255", TruncatedPayloadError),
            (b"P5\n0 2\n255\n", ZeroDimensionError),
            (b"P5\n2 0\n255\n", ZeroDimensionError),
            (b"P5\n2 x\n255\n\x00\x00", MalformedHeaderError),
            (b"P5\n2", MalformedHeaderError),
            (b"P5\n1 1\n255\n\x00\x00", TrailingDataError),
        ]
        for data, error in cases:
            with self.subTest(data=data):
                with self.assertRaises(error):
                    load_pgm(data)

    def test_all_parse_errors_are_pgm_errors(self) -> None:
        for error in (
            UnsupportedMagicError,
            UnsupportedMaxvalError,
            TruncatedPayloadError,
            ZeroDimensionError,
            MalformedHeaderError,
            TrailingDataError,
        ):
            self.assertTrue(issubclass(error, PGMParseError))

    def test_read_pgm_names_the_file(self) -> None:
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "broken.pgm"
            path.write_bytes(b"P5\n2 2\n255\n\x00")
            with self.assertRaises(TruncatedPayloadError) as context:
                read_pgm(path)
            self.assertIn("broken.pgm", str(context.exception))

    def test_write_then_read(self) -> None:
        img = random_image(4, 8, 12)
        with TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "img.pgm"
            write_pgm(path, img)
            self.assertEqual(read_pgm(path), img)
            self.assertEqual(path.read_bytes(), save_pgm(img))


class TestRealPlane(unittest.TestCase):
    def test_rejects_nan(self) -> None:
        with self.assertRaises(ValueError):
            RealPlane(np.array([[np.nan]]))

    def test_wet_values(self) -> None:
        with self.assertRaises(ValueError):
            RealPlane(np.array([[np.inf]]))
        plane = RealPlane(np.array([[np.inf, 1.0]]), allow_wet=True)
        self.assertTrue(np.isposinf(plane.values[0, 0]))
        with self.assertRaises(ValueError):
            RealPlane(np.array([[-np.inf]]), allow_wet=True)


class TestMirrorPad(unittest.TestCase):
    def test_border_pixel_is_not_repeated(self) -> None:
        plane = RealPlane(np.array([[1.0, 2.0, 3.0]] * 3))
        padded = mirror_pad(plane, 1)
        np.testing.assert_array_equal(padded.values[1], [2.0, 1.0, 2.0, 3.0, 2.0])
        self.assertEqual(padded.shape, (5, 5))

    def test_interior_is_preserved(self) -> None:
        plane = random_image(5, 6, 7).to_plane()
        padded = mirror_pad(plane, 3)
        np.testing.assert_array_equal(padded.values[3:-3, 3:-3], plane.values)

    def test_margin_too_large(self) -> None:
        with self.assertRaises(ImageShapeError):
            mirror_pad(RealPlane(np.zeros((4, 6))), 5)


class TestConvolve2d(unittest.TestCase):
    def test_identity_kernel(self) -> None:
        plane = random_image(6, 9, 9).to_plane()
        kernel = np.zeros((3, 3))
        kernel[1, 1] = 1.0
        self.assertEqual(convolve2d(plane, kernel), plane)

    def test_kernel_is_not_flipped(self) -> None:
        plane = RealPlane(np.array([[0.0, 1.0, 2.0, 3.0]] * 3))
        kernel = np.array([[0.0, 0.0, 1.0]])
        # Correlation reads the right neighbour; the right border mirrors to 2.
        out = convolve2d(plane, kernel)
        np.testing.assert_array_equal(out.values[0], [1.0, 2.0, 3.0, 2.0])

    def test_output_shape(self) -> None:
        plane = random_image(7, 20, 17).to_plane()
        self.assertEqual(convolve2d(plane, np.ones((5, 3))).shape, (20, 17))

    def test_constant_plane_with_zero_sum_kernel(self) -> None:
        plane = RealPlane(np.full((8, 8), 42.0))
        kernel = np.array([[-1.0, 2.0, -1.0], [2.0, -4.0, 2.0], [-1.0, 2.0, -1.0]])
        np.testing.assert_allclose(convolve2d(plane, kernel).values, 0.0)

    def test_ramp(self) -> None:
        plane = RealPlane(np.arange(9, dtype=np.float64).reshape(3, 3))
        np.testing.assert_allclose(
            convolve2d(plane, np.ones((3, 3))).values,
            [[24.0, 27.0, 30.0], [33.0, 36.0, 39.0], [42.0, 45.0, 48.0]],
        )
        gradient = np.array([[0.0, 0.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
        np.testing.assert_allclose(
            convolve2d(plane, gradient).values, [[0.0, 2.0, 0.0]] * 3
        )

    def test_linearity(self) -> None:
        rng = make_generator(8)
        p = rng.normal(size=(9, 11))
        q = rng.normal(size=(9, 11))
        kernel = rng.normal(size=(3, 5))
        combined = convolve2d(RealPlane(2.5 * p - 0.75 * q), kernel).values
        separate = (
            2.5 * convolve2d(RealPlane(p), kernel).values
            - 0.75 * convolve2d(RealPlane(q), kernel).values
        )
        np.testing.assert_allclose(combined, separate, rtol=1e-9, atol=1e-12)

    def test_even_kernel(self) -> None:
        with self.assertRaises(ImageShapeError):
            convolve2d(RealPlane(np.zeros((5, 5))), np.ones((2, 3)))

    def test_kernel_larger_than_plane(self) -> None:
        with self.assertRaises(ImageShapeError):
            convolve2d(RealPlane(np.zeros((3, 3))), np.ones((5, 5)))
