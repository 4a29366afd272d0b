import numpy as np
import pytest

from sigverify.imaging import (
    BinaryImage,
    BlankSignatureError,
    GrayImage,
    PreprocessConfig,
    binarize,
    crop_to_ink,
    gaussian_filter,
    gaussian_kernel_1d,
    otsu_threshold,
    preprocess,
)

from oracles import otsu_exhaustive


def gray(arr):
    return GrayImage(np.asarray(arr, dtype=np.float64))


def random_gray(rng, shape, levels=256):
    return gray(rng.integers(0, levels, size=shape).astype(float))


class TestOtsu:
    def test_two_level_quad(self):
        # any t in 0..254 ties at the same variance; smallest wins
        t, degenerate = otsu_threshold(gray([[0, 0], [255, 255]]))
        assert (t, degenerate) == (0, False)

    def test_constant_is_degenerate(self):
        t, degenerate = otsu_threshold(gray([[128, 128], [128, 128]]))
        assert (t, degenerate) == (128, True)

    def test_two_cluster_smallest_maximizer(self):
        t, degenerate = otsu_threshold(gray([[10, 12, 200, 202]]))
        assert not degenerate
        assert t == 12

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            shape = (rng.integers(1, 12), rng.integers(1, 12))
            img = random_gray(rng, shape)
            got = otsu_threshold(img)
            want = otsu_exhaustive(img.pixels)
            assert (got.threshold, got.degenerate) == want

    def test_matches_exhaustive_on_few_levels(self):
        # few distinct intensities produce long tie plateaus
        rng = np.random.default_rng(5)
        for _ in range(40):
            img = gray(rng.choice([7, 8, 251], size=(6, 6)).astype(float))
            got = otsu_threshold(img)
            want = otsu_exhaustive(img.pixels)
            assert (got.threshold, got.degenerate) == want


class TestBinarize:
    def test_dark_is_ink(self):
        out = binarize(gray([[0, 0], [255, 255]]))
        assert out.pixels.tolist() == [[1, 1], [0, 0]]
        assert not out.degenerate

    def test_blank_page(self):
        out = binarize(gray(np.full((3, 3), 255.0)))
        assert out.pixels.sum() == 0
        assert out.degenerate

    def test_all_black_degenerates_to_background(self):
        out = binarize(gray(np.zeros((3, 3))))
        assert out.pixels.sum() == 0
        assert out.degenerate

    def test_commutes_with_translation(self):
        rng = np.random.default_rng(3)
        base = np.full((20, 20), 220.0)
        base[5:9, 4:10] = rng.integers(0, 60, size=(4, 6))
        rolled = np.roll(np.roll(base, 3, axis=0), 2, axis=1)
        m1 = binarize(gray(base))
        m2 = binarize(gray(rolled))
        assert np.array_equal(np.roll(np.roll(m1.pixels, 3, axis=0), 2, axis=1), m2.pixels)


class TestGaussianFilter:
    def test_preserves_constants(self):
        cfg = PreprocessConfig(gaussian_sigma=1.0, gaussian_radius=3)
        out = gaussian_filter(gray(np.full((8, 9), 77.0)), cfg)
        assert np.allclose(out.pixels, 77.0, atol=1e-9)

    def test_impulse_reproduces_kernel(self):
        cfg = PreprocessConfig(gaussian_sigma=1.0, gaussian_radius=2)
        field = np.zeros((9, 9))
        field[4, 4] = 255.0
        out = gaussian_filter(gray(field), cfg)
        k1 = gaussian_kernel_1d(1.0, 2)
        expected = np.zeros((9, 9))
        expected[2:7, 2:7] = 255.0 * np.outer(k1, k1)
        assert np.allclose(out.pixels, expected, atol=1e-12)

    def test_mass_conserved_for_interior_support(self):
        cfg = PreprocessConfig(gaussian_sigma=1.0, gaussian_radius=3)
        field = np.zeros((15, 15))
        field[6:9, 6:9] = [[10, 50, 10], [50, 255, 50], [10, 50, 10]]
        out = gaussian_filter(gray(field), cfg)
        assert np.isclose(out.pixels.sum(), field.sum(), atol=1e-8)

    def test_range_clamped(self):
        rng = np.random.default_rng(2)
        out = gaussian_filter(random_gray(rng, (10, 10)), PreprocessConfig())
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 255.0

    def test_radius_must_cover_sigma(self):
        with pytest.raises(ValueError):
            PreprocessConfig(gaussian_sigma=3.0, gaussian_radius=4)


class TestCrop:
    def test_tight_bounding_box(self):
        mask = np.zeros((10, 10), dtype=np.uint8)
        mask[2:5, 3:8] = 1
        img = gray(np.arange(100).reshape(10, 10) % 256)
        out = crop_to_ink(img, BinaryImage(mask), margin=0)
        assert out.pixels.shape == (3, 5)
        assert np.array_equal(out.pixels, img.pixels[2:5, 3:8])

    def test_ink_touching_borders_keeps_size(self):
        mask = np.zeros((6, 7), dtype=np.uint8)
        mask[0, 0] = mask[-1, -1] = 1
        img = gray(np.zeros((6, 7)))
        out = crop_to_ink(img, BinaryImage(mask), margin=0)
        assert out.pixels.shape == (6, 7)

    def test_margin_never_drops_ink(self):
        rng = np.random.default_rng(9)
        mask = (rng.random((12, 12)) < 0.2).astype(np.uint8)
        mask[6, 6] = 1
        img = random_gray(rng, (12, 12))
        for margin in (0, 1, 3):
            out = crop_to_ink(img, BinaryImage(mask), margin)
            assert out.pixels.size >= int(mask.sum())

    def test_blank_mask_errors(self):
        img = gray(np.zeros((4, 4)))
        with pytest.raises(BlankSignatureError, match="blank signature"):
            crop_to_ink(img, BinaryImage(np.zeros((4, 4), dtype=np.uint8)), 1)


def stroke_image(shape=(40, 60), at=(12, 20)):
    """Light canvas with a small dark L-shaped stroke placed at `at`."""
    field = np.full(shape, 235.0)
    r, c = at
    field[r : r + 6, c : c + 2] = 30.0
    field[r + 4 : r + 6, c : c + 12] = 25.0
    return field


class TestPreprocess:
    def test_blank_page_errors(self):
        with pytest.raises(BlankSignatureError):
            preprocess(gray(np.full((20, 20), 255.0)), PreprocessConfig())

    def test_translation_invariant(self):
        cfg = PreprocessConfig()
        a = preprocess(gray(stroke_image(at=(12, 20))), cfg)
        b = preprocess(gray(stroke_image(at=(18, 31))), cfg)
        assert a.pixels.shape == b.pixels.shape
        assert np.array_equal(a.pixels, b.pixels)

    def test_output_matches_bounding_box_plus_margin(self):
        cfg = PreprocessConfig(crop_margin=2)
        out = preprocess(gray(stroke_image()), cfg)
        # stroke spans rows 12..17 and cols 20..31, plus margin 2 per side
        assert out.pixels.shape == (6 + 4, 12 + 4)
