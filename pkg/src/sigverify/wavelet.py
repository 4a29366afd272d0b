"""Multi-level 2-D discrete wavelet transform and sub-band histogram features.

The image is resampled to a canonical size, decomposed with a separable
orthonormal filter pair (Haar by default, pluggable), and each of the
3 * levels + 1 sub-bands contributes an L1-normalized histogram of absolute
coefficient magnitudes. Per-band histograms are binned against that band's
own maximum, which makes the descriptor invariant to intensity scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .features import FeatureVector
from .imaging import GrayImage


class SignalTooShortError(ValueError):
    """Input shorter than one analysis step."""


@dataclass(frozen=True, eq=False)
class WaveletFilterPair:
    """Orthonormal low/high pass pair related by the quadrature mirror rule."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.low, dtype=np.float64)
        hi = np.asarray(self.high, dtype=np.float64)
        if lo.ndim != 1 or lo.size < 2 or lo.shape != hi.shape:
            raise ValueError("filter pair needs matching 1-D arrays, length >= 2")
        n = np.arange(lo.size)
        mirrored = ((-1.0) ** n) * lo[::-1]
        if not np.allclose(hi, mirrored, atol=1e-12):
            raise ValueError("high pass must mirror the low pass: h[n] = (-1)^n l[L-1-n]")
        if not math.isclose(float(np.sum(lo * lo)), 1.0, abs_tol=1e-12):
            raise ValueError("low pass must have unit energy")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @classmethod
    def from_lowpass(cls, low) -> "WaveletFilterPair":
        lo = np.asarray(low, dtype=np.float64)
        n = np.arange(lo.size)
        return cls(lo, ((-1.0) ** n) * lo[::-1])

    @classmethod
    def haar(cls) -> "WaveletFilterPair":
        s = math.sqrt(0.5)
        return cls(np.array([s, s]), np.array([s, -s]))


@dataclass(frozen=True, eq=False)
class SubbandPyramid:
    """Final approximation plus (LH, HL, HH) details per decomposition level.

    detail_levels[0] is the first split (finest scale); the last entry is
    the coarsest, produced alongside the stored approximation.
    """

    approx: np.ndarray
    detail_levels: tuple

    @property
    def levels(self) -> int:
        return len(self.detail_levels)

    def subbands_coarse_first(self):
        """Yield (name, grid) pairs: LL, then LH/HL/HH from coarsest level."""
        yield "LL", self.approx
        for lvl in range(self.levels, 0, -1):
            lh, hl, hh = self.detail_levels[lvl - 1]
            yield f"LH{lvl}", lh
            yield f"HL{lvl}", hl
            yield f"HH{lvl}", hh


@dataclass(frozen=True)
class DwtParams:
    levels: int = 3
    canonical_size: tuple[int, int] = (128, 128)  # (rows, cols)
    histogram_bins: int = 12

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be >= 1")
        if min(self.canonical_size) < 2**self.levels:
            raise ValueError("canonical_size must be >= 2^levels in both dimensions")

    @property
    def descriptor_dim(self) -> int:
        return (3 * self.levels + 1) * self.histogram_bins


def dwt_1d(signal, filters: WaveletFilterPair) -> tuple[np.ndarray, np.ndarray]:
    """One analysis step: filter and downsample by 2.

    approx[p] = sum_n low[n - 2p] * signal[n], detail likewise with the high
    pass. Out-of-range samples use symmetric half-sample extension and the
    outputs have length ceil(len / 2).
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise SignalTooShortError("signal too short")
    n = s.size
    m = (n + 1) // 2
    taps = filters.low.size
    needed = 2 * (m - 1) + taps
    if needed > n:
        period = np.concatenate([s, s[::-1]])
        reps = -(-needed // (2 * n))
        ext = np.tile(period, reps)[:needed]
    else:
        ext = s
    approx = np.zeros(m)
    detail = np.zeros(m)
    for t in range(taps):
        seg = ext[t : t + 2 * m : 2][:m]
        approx += filters.low[t] * seg
        detail += filters.high[t] * seg
    return approx, detail


def _dwt_along(arr: np.ndarray, filters: WaveletFilterPair, axis: int):
    """Vectorized dwt_1d over every 1-D slice along the given axis."""
    a = np.moveaxis(arr, axis, -1)
    n = a.shape[-1]
    if n < 2:
        raise SignalTooShortError("signal too short")
    m = (n + 1) // 2
    taps = filters.low.size
    needed = 2 * (m - 1) + taps
    if needed > n:
        period = np.concatenate([a, a[..., ::-1]], axis=-1)
        reps = -(-needed // (2 * n))
        ext = np.tile(period, (1,) * (a.ndim - 1) + (reps,))[..., :needed]
    else:
        ext = a
    lo = np.zeros(a.shape[:-1] + (m,))
    hi = np.zeros(a.shape[:-1] + (m,))
    for t in range(taps):
        seg = ext[..., t : t + 2 * m : 2][..., :m]
        lo += filters.low[t] * seg
        hi += filters.high[t] * seg
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def dwt2_level(img, filters: WaveletFilterPair | None = None):
    """Single-level separable 2-D transform -> (LL, LH, HL, HH).

    First letter names the filter applied along rows (vertical direction),
    second along columns, so LH is smooth vertically, detailed horizontally.
    """
    filters = filters or WaveletFilterPair.haar()
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    if pixels.shape[0] < 2 or pixels.shape[1] < 2:
        raise SignalTooShortError("signal too short")
    lo_c, hi_c = _dwt_along(pixels, filters, axis=1)
    ll, hl = _dwt_along(lo_c, filters, axis=0)
    lh, hh = _dwt_along(hi_c, filters, axis=0)
    return ll, lh, hl, hh


def resize_bilinear(pixels: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Half-pixel-centered bilinear resample.

    Interpolation is written in a + f * (b - a) form so constant images stay
    exactly constant, which keeps detail sub-bands at exact zero downstream.
    """
    arr = np.asarray(pixels, dtype=np.float64)
    in_rows, in_cols = arr.shape
    if (in_rows, in_cols) == (out_rows, out_cols):
        return arr.copy()
    r = np.clip((np.arange(out_rows) + 0.5) * (in_rows / out_rows) - 0.5, 0, in_rows - 1)
    c = np.clip((np.arange(out_cols) + 0.5) * (in_cols / out_cols) - 0.5, 0, in_cols - 1)
    r0 = np.floor(r).astype(np.intp)
    c0 = np.floor(c).astype(np.intp)
    r1 = np.minimum(r0 + 1, in_rows - 1)
    c1 = np.minimum(c0 + 1, in_cols - 1)
    fr = (r - r0)[:, None]
    fc = (c - c0)[None, :]
    p00 = arr[np.ix_(r0, c0)]
    p01 = arr[np.ix_(r0, c1)]
    p10 = arr[np.ix_(r1, c0)]
    p11 = arr[np.ix_(r1, c1)]
    top = p00 + fc * (p01 - p00)
    bot = p10 + fc * (p11 - p10)
    return top + fr * (bot - top)


def dwt_pyramid(
    img: GrayImage,
    params: DwtParams | None = None,
    filters: WaveletFilterPair | None = None,
) -> SubbandPyramid:
    """Resample to the canonical size, then split the LL band repeatedly."""
    params = params or DwtParams()
    filters = filters or WaveletFilterPair.haar()
    current = resize_bilinear(img.pixels, *params.canonical_size)
    details = []
    for _ in range(params.levels):
        current, lh, hl, hh = dwt2_level(current, filters)
        details.append((lh, hl, hh))
    return SubbandPyramid(approx=current, detail_levels=tuple(details))


def _band_histogram(grid: np.ndarray, bins: int) -> np.ndarray:
    mags = np.abs(grid).ravel()
    top = mags.max()
    if top == 0.0:
        out = np.zeros(bins)
        out[0] = 1.0
        return out
    hist, _ = np.histogram(mags, bins=bins, range=(0.0, top))
    return hist / mags.size


def wavelet_descriptor(
    img: GrayImage,
    params: DwtParams | None = None,
    filters: WaveletFilterPair | None = None,
) -> FeatureVector:
    """Concatenated per-band magnitude histograms, LL first then details
    from the coarsest level. 3 levels x 12 bins gives the 120-dim default."""
    params = params or DwtParams()
    pyramid = dwt_pyramid(img, params, filters)
    blocks = [
        _band_histogram(grid, params.histogram_bins)
        for _, grid in pyramid.subbands_coarse_first()
    ]
    return FeatureVector(np.concatenate(blocks))
