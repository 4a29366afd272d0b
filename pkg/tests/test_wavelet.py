import numpy as np
import pytest

from sigverify.imaging import GrayImage
from sigverify.wavelet import (
    DwtParams,
    SignalTooShortError,
    WaveletFilterPair,
    dwt2_level,
    dwt_1d,
    dwt_pyramid,
    resize_bilinear,
    wavelet_descriptor,
)

from oracles import dwt_1d_reference, haar_idwt2

HAAR = WaveletFilterPair.haar()
S2 = np.sqrt(2.0)


def gray(arr):
    return GrayImage(np.asarray(arr, dtype=np.float64))


class TestFilterPair:
    def test_haar_is_quadrature_mirror(self):
        assert np.allclose(HAAR.high, [1 / S2, -1 / S2])

    def test_rejects_non_mirror(self):
        with pytest.raises(ValueError):
            WaveletFilterPair(np.array([1 / S2, 1 / S2]), np.array([1 / S2, 1 / S2]))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            WaveletFilterPair.from_lowpass([0.5, 0.5])

    def test_longer_filter_from_lowpass(self):
        # Daubechies-4 lowpass
        root3 = np.sqrt(3.0)
        db2 = np.array([1 + root3, 3 + root3, 3 - root3, 1 - root3]) / (4 * S2)
        pair = WaveletFilterPair.from_lowpass(db2)
        assert pair.low.size == 4


class TestDwt1d:
    def test_known_four_sample_signal(self):
        approx, detail = dwt_1d([1, 2, 3, 4], HAAR)
        assert np.allclose(approx, [3 / S2, 7 / S2], atol=1e-12)
        assert np.allclose(detail, [-1 / S2, -1 / S2], atol=1e-12)

    def test_constant_kills_detail(self):
        _, detail = dwt_1d(np.full(10, 3.7), HAAR)
        assert np.all(detail == 0.0)

    def test_two_sample_signal(self):
        approx, detail = dwt_1d([5, 1], HAAR)
        assert np.allclose(approx, [6 / S2], atol=1e-12)
        assert np.allclose(detail, [4 / S2], atol=1e-12)

    def test_too_short(self):
        with pytest.raises(SignalTooShortError, match="signal too short"):
            dwt_1d([1.0], HAAR)

    def test_matches_double_loop_reference(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            n = int(rng.integers(2, 33))
            signal = rng.normal(size=n) * 10
            for pair in (HAAR, _db2()):
                a, d = dwt_1d(signal, pair)
                ra, rd = dwt_1d_reference(signal, pair.low, pair.high)
                assert a.size == (n + 1) // 2
                assert np.array_equal(a, ra)
                assert np.array_equal(d, rd)


def _db2():
    root3 = np.sqrt(3.0)
    return WaveletFilterPair.from_lowpass(
        np.array([1 + root3, 3 + root3, 3 - root3, 1 - root3]) / (4 * S2)
    )


class TestDwt2:
    def test_two_by_two_closed_form(self):
        a, b, c, d = 9.0, 4.0, 1.0, 6.0
        ll, lh, hl, hh = dwt2_level(np.array([[a, b], [c, d]]), HAAR)
        assert ll[0, 0] == pytest.approx((a + b + c + d) / 2, abs=1e-12)
        assert lh[0, 0] == pytest.approx((a - b + c - d) / 2, abs=1e-12)
        assert hl[0, 0] == pytest.approx((a + b - c - d) / 2, abs=1e-12)
        assert hh[0, 0] == pytest.approx((a - b - c + d) / 2, abs=1e-12)

    def test_constant_image_detail_free(self):
        ll, lh, hl, hh = dwt2_level(np.full((6, 8), 5.0), HAAR)
        assert np.all(lh == 0) and np.all(hl == 0) and np.all(hh == 0)
        assert np.allclose(ll, 10.0, atol=1e-12)

    def test_parseval_even_sizes(self):
        rng = np.random.default_rng(1)
        img = rng.normal(size=(16, 24)) * 50
        ll, lh, hl, hh = dwt2_level(img, HAAR)
        total = sum(np.sum(band**2) for band in (ll, lh, hl, hh))
        assert total == pytest.approx(np.sum(img**2), rel=1e-12)

    def test_perfect_reconstruction_even_sizes(self):
        rng = np.random.default_rng(2)
        img = rng.normal(size=(12, 18)) * 100
        ll, lh, hl, hh = dwt2_level(img, HAAR)
        back = haar_idwt2(ll, lh, hl, hh)
        assert np.max(np.abs(back - img)) <= 1e-9


class TestPyramid:
    def test_subband_count(self):
        p = DwtParams(levels=3, canonical_size=(32, 32), histogram_bins=12)
        pyr = dwt_pyramid(gray(np.zeros((40, 40)) + 9), p, HAAR)
        names = [name for name, _ in pyr.subbands_coarse_first()]
        assert len(names) == 10
        assert names[0] == "LL" and names[1] == "LH3" and names[-1] == "HH1"

    def test_constant_image_all_details_zero(self):
        p = DwtParams(levels=3, canonical_size=(64, 64))
        pyr = dwt_pyramid(gray(np.full((50, 70), 33.0)), p, HAAR)
        for name, grid in pyr.subbands_coarse_first():
            if name != "LL":
                assert np.all(grid == 0.0), name

    def test_recursion_matches_unrolled(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, size=(32, 32)).astype(float)
        p = DwtParams(levels=3, canonical_size=(32, 32))
        pyr = dwt_pyramid(gray(img), p, HAAR)
        cur = img
        unrolled = []
        for _ in range(3):
            cur, lh, hl, hh = dwt2_level(cur, HAAR)
            unrolled.append((lh, hl, hh))
        assert np.array_equal(pyr.approx, cur)
        for got, want in zip(pyr.detail_levels, unrolled):
            for g, w in zip(got, want):
                assert np.array_equal(g, w)

    def test_canonical_size_floor(self):
        with pytest.raises(ValueError):
            DwtParams(levels=4, canonical_size=(8, 8))


class TestResize:
    def test_identity_when_sizes_match(self):
        arr = np.arange(12.0).reshape(3, 4)
        assert np.array_equal(resize_bilinear(arr, 3, 4), arr)

    def test_constant_preserved_exactly(self):
        out = resize_bilinear(np.full((7, 11), 42.0), 16, 9)
        assert np.all(out == 42.0)

    def test_range_preserved(self):
        rng = np.random.default_rng(8)
        arr = rng.integers(0, 256, size=(9, 14)).astype(float)
        out = resize_bilinear(arr, 21, 33)
        assert out.min() >= arr.min() - 1e-12
        assert out.max() <= arr.max() + 1e-12


class TestDescriptor:
    def test_dimension_is_120(self):
        rng = np.random.default_rng(4)
        img = gray(rng.integers(0, 256, size=(60, 90)).astype(float))
        d = wavelet_descriptor(img)
        assert d.dim == 120

    def test_blocks_are_probability_vectors(self):
        rng = np.random.default_rng(5)
        img = gray(rng.integers(0, 256, size=(48, 72)).astype(float))
        d = wavelet_descriptor(img, DwtParams())
        blocks = d.values.reshape(10, 12)
        assert np.all(blocks >= 0)
        assert np.allclose(blocks.sum(axis=1), 1.0, atol=1e-9)

    def test_constant_image_block_pattern(self):
        d = wavelet_descriptor(gray(np.full((40, 40), 19.0)))
        blocks = d.values.reshape(10, 12)
        # LL first: constant value lands in the top bin
        assert blocks[0, -1] == 1.0
        for detail_block in blocks[1:]:
            assert detail_block[0] == 1.0

    def test_intensity_scaling_invariance(self):
        rng = np.random.default_rng(6)
        base = rng.integers(0, 120, size=(36, 52)).astype(float)
        d1 = wavelet_descriptor(gray(base))
        d2 = wavelet_descriptor(gray(2.0 * base))
        assert np.array_equal(d1.values, d2.values)
