"""Signature image preprocessing.

Raw scans go through Otsu binarization (for an ink mask), Gaussian smoothing
(noise removal) and a crop to the ink bounding box, which is what makes the
downstream texture descriptors translation invariant. All operations are pure
and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class BlankSignatureError(ValueError):
    """The ink mask is empty: nothing to crop or describe."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """2-D grid of intensities in [0, 255], row-major, float valued."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("GrayImage needs a non-empty 2-D pixel grid")
        if not np.all(np.isfinite(px)):
            raise ValueError("GrayImage pixels must be finite")
        if px.min() < 0.0 or px.max() > 255.0:
            raise ValueError("GrayImage pixels must lie in [0, 255]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Ink mask: 1 marks ink (dark strokes), 0 background."""

    pixels: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("BinaryImage needs a non-empty 2-D pixel grid")
        if not np.all((px == 0) | (px == 1)):
            raise ValueError("BinaryImage pixels must be 0 or 1")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def ink_count(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class PreprocessConfig:
    gaussian_sigma: float = 1.0
    gaussian_radius: int = 3
    crop_margin: int = 2

    def __post_init__(self):
        if self.gaussian_sigma <= 0:
            raise ValueError("gaussian_sigma must be > 0")
        if self.gaussian_radius < 1:
            raise ValueError("gaussian_radius must be >= 1")
        if self.gaussian_radius < math.ceil(2 * self.gaussian_sigma):
            raise ValueError("gaussian_radius must be >= ceil(2 * gaussian_sigma)")
        if self.crop_margin < 0:
            raise ValueError("crop_margin must be >= 0")


class OtsuResult(NamedTuple):
    threshold: int
    degenerate: bool


def intensity_histogram(img: GrayImage) -> np.ndarray:
    """256-bin histogram; non-integer intensities fall into their floor bin."""
    bins = np.clip(np.floor(img.pixels).astype(np.int64), 0, 255)
    return np.bincount(bins.ravel(), minlength=256)


def otsu_threshold(img: GrayImage) -> OtsuResult:
    """Threshold maximizing the inter-class variance of the histogram.

    Pixels with intensity <= threshold form one class, the rest the other.
    Ties are broken toward the smallest threshold so results are identical
    across platforms. A single-intensity image has no two classes to
    separate; its unique value is returned with the degenerate flag set.
    """
    hist = intensity_histogram(img)
    nonzero = np.flatnonzero(hist)
    if nonzero.size == 1:
        return OtsuResult(int(nonzero[0]), True)

    # Counts and weighted sums are integers, so the cumulative sums are
    # exact and the variance values match a scalar recomputation bit for bit.
    counts = hist.astype(np.float64)
    levels = np.arange(256, dtype=np.float64)
    n = counts.sum()
    c0 = np.cumsum(counts)
    s0 = np.cumsum(levels * counts)
    c1 = n - c0
    total = s0[-1]

    valid = (c0 > 0) & (c1 > 0)
    mu0 = s0 / np.where(valid, c0, 1.0)
    mu1 = (total - s0) / np.where(valid, c1, 1.0)
    diff = mu0 - mu1
    variance = np.where(valid, (c0 / n) * (c1 / n) * (diff * diff), -1.0)
    return OtsuResult(int(np.argmax(variance)), False)


def binarize(img: GrayImage) -> BinaryImage:
    """Otsu ink mask. Signatures are dark on light, so ink is the low class.

    Degenerate (single-intensity) images come back all background with the
    flag set, so batch ingestion can skip and log them instead of failing.
    """
    t, degenerate = otsu_threshold(img)
    if degenerate:
        return BinaryImage(np.zeros(img.pixels.shape, dtype=np.uint8), degenerate=True)
    return BinaryImage((img.pixels <= t).astype(np.uint8))


def gaussian_kernel_1d(sigma: float, radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return k / k.sum()


def _correlate_rows(arr: np.ndarray, kernel: np.ndarray, radius: int) -> np.ndarray:
    padded = np.pad(arr, ((0, 0), (radius, radius)), mode="edge")
    w = arr.shape[1]
    out = np.zeros_like(arr)
    for t, kt in enumerate(kernel):
        out += kt * padded[:, t : t + w]
    return out


def gaussian_filter(img: GrayImage, cfg: PreprocessConfig) -> GrayImage:
    """Truncated, normalized Gaussian smoothing with edge replication."""
    k = gaussian_kernel_1d(cfg.gaussian_sigma, cfg.gaussian_radius)
    out = _correlate_rows(img.pixels, k, cfg.gaussian_radius)
    out = _correlate_rows(out.T, k, cfg.gaussian_radius).T
    return GrayImage(np.clip(out, 0.0, 255.0))


def crop_to_ink(img: GrayImage, mask: BinaryImage, margin: int) -> GrayImage:
    """Sub-image covering the ink bounding box, padded by margin (clipped)."""
    if img.pixels.shape != mask.pixels.shape:
        raise ValueError("image and mask dimensions differ")
    rows = np.flatnonzero(mask.pixels.any(axis=1))
    cols = np.flatnonzero(mask.pixels.any(axis=0))
    if rows.size == 0:
        raise BlankSignatureError("blank signature")
    r0 = max(int(rows[0]) - margin, 0)
    r1 = min(int(rows[-1]) + margin, img.height - 1)
    c0 = max(int(cols[0]) - margin, 0)
    c1 = min(int(cols[-1]) + margin, img.width - 1)
    return GrayImage(img.pixels[r0 : r1 + 1, c0 : c1 + 1].copy())


def preprocess(img: GrayImage, cfg: PreprocessConfig | None = None) -> GrayImage:
    """Binarize for the ink mask, smooth the grayscale image, crop to ink.

    The cropped output keeps grayscale intensities: the texture descriptors
    are defined on intensity values, and a pure binary image would throw
    away most of the local phase content.
    """
    cfg = cfg or PreprocessConfig()
    mask = binarize(img)
    filtered = gaussian_filter(img, cfg)
    return crop_to_ink(filtered, mask, cfg.crop_margin)
