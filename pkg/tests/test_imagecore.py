import importlib.util
import math

import numpy as np
import pytest

from lbptex.errors import DataError, ImageFormatError
from lbptex.imagecore import (
    GrayImage,
    NeighborhoodSpec,
    add_gaussian_noise,
    apply_monotone_map,
    gain_table,
    largest_valid_center_crop,
    luminance,
    nearest_offsets,
    neighbor_coordinates,
    read_image,
    read_pgm,
    ring_offsets,
    rotate_image,
    sample_bilinear,
    write_pgm,
)


class TestGrayImage:
    def test_from_list(self):
        img = GrayImage([[0, 128], [255, 7]])
        assert img.shape == (2, 2)
        assert img.pixels.dtype == np.uint8
        assert img.width == 2 and img.height == 2

    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(ValueError):
            GrayImage(np.zeros(4, dtype=np.uint8))
        with pytest.raises(ValueError):
            GrayImage(np.zeros((0, 4), dtype=np.uint8))
        with pytest.raises(ValueError):
            GrayImage(np.full((2, 2), 256, dtype=np.int32))
        with pytest.raises(ValueError):
            GrayImage(np.full((2, 2), -1, dtype=np.int32))
        with pytest.raises(ValueError):
            GrayImage(np.zeros((2, 2), dtype=np.float64))

    def test_immutable(self):
        img = GrayImage.constant(4, 4, 9)
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1

    def test_copies_and_contiguous(self):
        base = np.arange(16, dtype=np.uint8).reshape(4, 4)
        img = GrayImage(np.rot90(base))  # non-contiguous view as input
        assert img.pixels.flags.c_contiguous
        expected = np.rot90(np.arange(16, dtype=np.uint8).reshape(4, 4)).copy()
        base[0, 0] = 99  # later writes to the source must not leak in
        assert np.array_equal(img.pixels, expected)

    def test_equality(self):
        a = GrayImage.constant(3, 3, 5)
        b = GrayImage(np.full((3, 3), 5, dtype=np.int64))
        assert a == b
        assert a != GrayImage.constant(3, 3, 6)


class TestNeighborhoodSpec:
    def test_defaults(self):
        spec = NeighborhoodSpec()
        assert (spec.p, spec.r, spec.mode) == (8, 1.0, "bilinear")
        assert spec.margin == 2

    @pytest.mark.parametrize("p", [3, 5, 2, 26, 0])
    def test_rejects_bad_p(self, p):
        with pytest.raises(ValueError):
            NeighborhoodSpec(p=p)

    def test_rejects_bad_r_and_mode(self):
        with pytest.raises(ValueError):
            NeighborhoodSpec(r=0)
        with pytest.raises(ValueError):
            NeighborhoodSpec(r=-1)
        with pytest.raises(ValueError):
            NeighborhoodSpec(mode="cubic")

    def test_margin_grows_with_radius(self):
        assert NeighborhoodSpec(r=2.0).margin == 3
        assert NeighborhoodSpec(r=1.5).margin == 3
        assert NeighborhoodSpec(r=3.0).margin == 4


class TestRingGeometry:
    def test_offsets_start_east_go_counterclockwise(self):
        offs = ring_offsets(NeighborhoodSpec(p=4, r=2.0))
        assert offs[0] == pytest.approx((2.0, 0.0))
        assert offs[1] == pytest.approx((0.0, -2.0))  # image y grows downward
        assert offs[2] == pytest.approx((-2.0, 0.0))
        assert offs[3] == pytest.approx((0.0, 2.0))

    def test_offsets_on_circle(self):
        for r in (1.0, 2.5, 3.0):
            for ox, oy in ring_offsets(NeighborhoodSpec(p=12, r=r)):
                assert math.hypot(ox, oy) == pytest.approx(r)

    def test_nearest_offsets_p8_r1(self):
        offs = nearest_offsets(NeighborhoodSpec(p=8, r=1.0, mode="nearest"))
        assert offs == [
            (1, 0),
            (1, -1),
            (0, -1),
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ]

    def test_nearest_offsets_round_half_even(self):
        # p=4, r=1.5 puts samples at (+-1.5, 0) and (0, -+1.5); ties round to even
        offs = nearest_offsets(NeighborhoodSpec(p=4, r=1.5, mode="nearest"))
        assert offs == [(2, 0), (0, -2), (-2, 0), (0, 2)]

    def test_neighbor_coordinates_absolute(self):
        spec = NeighborhoodSpec(p=8, r=2.0)
        pts = neighbor_coordinates(spec, (10, 20))
        assert len(pts) == 8
        assert pts[0].x == pytest.approx(12.0)
        assert pts[0].y == pytest.approx(20.0)
        assert pts[2].x == pytest.approx(10.0)
        assert pts[2].y == pytest.approx(18.0)


class TestBilinear:
    def test_exact_on_lattice(self):
        rng = np.random.default_rng(11)
        img = GrayImage(rng.integers(0, 256, size=(9, 9), dtype=np.uint8))
        for y in range(9):
            for x in range(9):
                assert sample_bilinear(img, (float(x), float(y))) == float(img.pixels[y, x])

    def test_known_cell_values(self):
        img = GrayImage([[0, 100], [50, 150]])
        assert sample_bilinear(img, (0.5, 0.0)) == pytest.approx(50.0)
        assert sample_bilinear(img, (0.0, 0.5)) == pytest.approx(25.0)
        assert sample_bilinear(img, (0.5, 0.5)) == pytest.approx(75.0)
        # tx=0.25, ty=0.75: top edge 25, bottom edge 75, blended 62.5
        assert sample_bilinear(img, (0.25, 0.75)) == pytest.approx(62.5)

    def test_out_of_bounds_raises(self):
        img = GrayImage.constant(4, 4, 1)
        with pytest.raises(ValueError):
            sample_bilinear(img, (-0.1, 0.0))
        with pytest.raises(ValueError):
            sample_bilinear(img, (0.0, 3.1))


class TestRotation:
    @pytest.mark.parametrize("angle,k", [(90, 1), (180, 2), (270, 3)])
    def test_quarter_turns_match_rot90(self, angle, k):
        rng = np.random.default_rng(3)
        img = GrayImage(rng.integers(0, 256, size=(16, 16), dtype=np.uint8))
        out, mask = rotate_image(img, angle)
        assert np.array_equal(out.pixels, np.rot90(img.pixels, k))
        assert mask.all()

    def test_zero_and_full_turn_identity(self):
        rng = np.random.default_rng(4)
        img = GrayImage(rng.integers(0, 256, size=(8, 12), dtype=np.uint8))
        for angle in (0, 360, -360):
            out, mask = rotate_image(img, angle)
            assert out == img
            assert mask.all()

    def test_180_non_square(self):
        rng = np.random.default_rng(5)
        img = GrayImage(rng.integers(0, 256, size=(6, 10), dtype=np.uint8))
        out, mask = rotate_image(img, 180)
        assert np.array_equal(out.pixels, img.pixels[::-1, ::-1])
        assert mask.all()

    def test_general_angle_marks_corners_invalid(self):
        img = GrayImage.constant(32, 32, 200)
        out, mask = rotate_image(img, 45)
        assert out.shape == (32, 32)
        assert not mask[0, 0] and not mask[0, -1] and not mask[-1, 0] and not mask[-1, -1]
        assert mask[16, 16]
        # invalid pixels are zeroed, valid ones interpolate a constant field
        assert out.pixels[0, 0] == 0
        assert out.pixels[16, 16] == 200

    def test_valid_region_of_constant_is_constant(self):
        img = GrayImage.constant(24, 24, 77)
        out, mask = rotate_image(img, 30)
        assert np.all(out.pixels[mask] == 77)

    def test_crop_of_all_valid_mask_is_whole_even_block(self):
        img = GrayImage.constant(10, 10, 1)
        crop = largest_valid_center_crop(img, np.ones((10, 10), dtype=bool))
        assert crop.shape == (10, 10)

    def test_crop_after_general_rotation_is_valid_square(self):
        rng = np.random.default_rng(6)
        img = GrayImage(rng.integers(0, 256, size=(40, 40), dtype=np.uint8))
        out, mask = rotate_image(img, 45)
        crop = largest_valid_center_crop(out, mask)
        assert crop.width == crop.height
        assert crop.width >= 20  # 40/sqrt(2) ~ 28, so at least a decent block
        # every pixel of the crop came from the valid region
        ch, cw = out.height // 2, out.width // 2
        k = crop.height // 2
        assert mask[ch - k : ch + k, cw - k : cw + k].all()

    def test_crop_mask_shape_mismatch(self):
        img = GrayImage.constant(8, 8, 1)
        with pytest.raises(ValueError):
            largest_valid_center_crop(img, np.ones((4, 4), dtype=bool))

    def test_crop_with_no_valid_center_raises(self):
        img = GrayImage.constant(8, 8, 1)
        with pytest.raises(DataError):
            largest_valid_center_crop(img, np.zeros((8, 8), dtype=bool))


class TestNoise:
    def test_zero_variance_identity(self):
        img = GrayImage.constant(8, 8, 100)
        assert add_gaussian_noise(img, 0.0, 1) == img

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            add_gaussian_noise(GrayImage.constant(4, 4, 0), -0.1, 1)

    def test_deterministic_per_seed(self):
        img = GrayImage.constant(16, 16, 128)
        a = add_gaussian_noise(img, 0.01, 7)
        b = add_gaussian_noise(img, 0.01, 7)
        c = add_gaussian_noise(img, 0.01, 8)
        assert a == b
        assert a != c

    def test_statistics_reasonable(self):
        img = GrayImage.constant(64, 64, 128)
        noisy = add_gaussian_noise(img, 0.06, 0)
        assert abs(float(noisy.pixels.mean()) - 128.0) < 5.0
        # sigma = sqrt(0.06)*255 ~ 62; spread should be wide but clipped in range
        assert noisy.pixels.std() > 30.0
        assert noisy.pixels.min() >= 0 and noisy.pixels.max() <= 255

    def test_clipping_at_extremes(self):
        dark = add_gaussian_noise(GrayImage.constant(32, 32, 0), 0.06, 3)
        bright = add_gaussian_noise(GrayImage.constant(32, 32, 255), 0.06, 3)
        assert dark.pixels.min() == 0
        assert bright.pixels.max() == 255


class TestIntensityMaps:
    def test_identity_table(self):
        rng = np.random.default_rng(9)
        img = GrayImage(rng.integers(0, 256, size=(6, 6), dtype=np.uint8))
        assert apply_monotone_map(img, list(range(256))) == img

    def test_gain_two(self):
        img = GrayImage([[0, 100, 200]])
        out = apply_monotone_map(img, gain_table(2.0))
        assert list(out.pixels[0]) == [0, 200, 255]

    def test_rejects_decreasing_or_malformed_tables(self):
        img = GrayImage.constant(2, 2, 1)
        bad = list(range(256))
        bad[10] = 5
        with pytest.raises(ValueError):
            apply_monotone_map(img, bad)
        with pytest.raises(ValueError):
            apply_monotone_map(img, list(range(255)))
        with pytest.raises(ValueError):
            apply_monotone_map(img, [0] * 255 + [256])

    def test_luminance_weights_and_rounding(self):
        rgb = np.array([[[146, 107, 59]]], dtype=np.uint8)
        assert luminance(rgb)[0, 0] == 113  # 0.299*146 + 0.587*107 + 0.114*59 = 113.189
        rgb2 = np.array([[[2, 0, 0]]], dtype=np.uint8)
        assert luminance(rgb2)[0, 0] == 1  # 0.598 rounds up, truncation would give 0


class TestPgmIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(12)
        img = GrayImage(rng.integers(0, 256, size=(5, 7), dtype=np.uint8))
        path = tmp_path / "t.pgm"
        write_pgm(img, path)
        assert read_pgm(path) == img

    def test_header_comments(self, tmp_path):
        raster = bytes(range(12))
        data = b"P5\n# a comment\n4 3\n# another\n255\n" + raster
        path = tmp_path / "c.pgm"
        path.write_bytes(data)
        img = read_pgm(path)
        assert img.shape == (3, 4)
        assert img.pixels[2, 3] == 11

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
        with pytest.raises(ImageFormatError):
            read_pgm(path)

    def test_rejects_16_bit(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
        with pytest.raises(ImageFormatError):
            read_pgm(path)

    def test_rejects_truncated_raster(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
        with pytest.raises(ImageFormatError):
            read_pgm(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageFormatError):
            read_pgm(tmp_path / "absent.pgm")

    def test_read_image_dispatch(self, tmp_path):
        img = GrayImage.constant(4, 4, 66)
        path = tmp_path / "x.pgm"
        write_pgm(img, path)
        assert read_image(path) == img
        with pytest.raises(ImageFormatError):
            read_image(tmp_path / "y.tiff")


@pytest.mark.skipif(
    importlib.util.find_spec("PIL") is None, reason="Pillow not installed"
)
class TestPngIO:
    def test_grayscale_png(self, tmp_path):
        from PIL import Image

        rng = np.random.default_rng(13)
        arr = rng.integers(0, 256, size=(6, 5), dtype=np.uint8)
        path = tmp_path / "g.png"
        Image.fromarray(arr, mode="L").save(path)
        assert np.array_equal(read_image(path).pixels, arr)

    def test_color_png_uses_luminance(self, tmp_path):
        from PIL import Image

        rng = np.random.default_rng(14)
        arr = rng.integers(0, 256, size=(4, 4, 3), dtype=np.uint8)
        path = tmp_path / "c.png"
        Image.fromarray(arr, mode="RGB").save(path)
        assert np.array_equal(read_image(path).pixels, luminance(arr))
