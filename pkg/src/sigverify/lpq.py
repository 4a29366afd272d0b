"""Local Phase Quantization texture descriptor.

Each pixel gets an 8-bit label from the signs of the real and imaginary
parts of four low-frequency short-term Fourier coefficients computed over a
square window; the 256-bin label histogram is the descriptor. The window
sits at frequency magnitude a = 1/window_size by default, which makes every
non-zero frequency sum a full complex period: constant regions quantize to
the all-ones label and adding a constant to the image leaves the descriptor
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .features import FeatureVector
from .imaging import GrayImage

BORDER_POLICIES = ("skip_border", "replicate")


class BorderPixelError(ValueError):
    """Window would run past the image border under skip_border."""


class ImageTooSmallError(ValueError):
    """Image does not strictly exceed the analysis window."""


@dataclass(frozen=True)
class LpqParams:
    window_size: int = 7
    freq_a: float | None = None  # defaults to 1 / window_size
    border_policy: str = "skip_border"

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError("window_size must be an odd integer >= 3")
        if self.freq_a is None:
            object.__setattr__(self, "freq_a", 1.0 / self.window_size)
        if not 0.0 < self.freq_a <= 0.5:
            raise ValueError("freq_a must lie in (0, 0.5]")
        if self.border_policy not in BORDER_POLICIES:
            raise ValueError(f"border_policy must be one of {BORDER_POLICIES}")

    @property
    def radius(self) -> int:
        return (self.window_size - 1) // 2

    def frequencies(self) -> tuple[tuple[float, float], ...]:
        """The four (row, col) frequency pairs, low-frequency LPQ set."""
        a = self.freq_a
        return ((a, 0.0), (0.0, a), (a, a), (a, -a))


def _phase_kernel(freq: float, window_size: int) -> tuple[np.ndarray, bool]:
    """1-D complex exponential over window offsets.

    Also reports whether freq spans a whole number of periods across the
    window (freq * window_size a non-zero integer), in which case the
    kernel's true sum is zero and the correlation can run in centered form.
    """
    r = (window_size - 1) // 2
    offsets = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-2j * np.pi * freq * offsets)
    m = freq * window_size
    zero_sum = abs(m - round(m)) < 1e-12 and round(m) % window_size != 0
    return k, zero_sum


def local_spectra(
    img: GrayImage, x: tuple[int, int], u: tuple[float, float], params: LpqParams
) -> complex:
    """Single STFT coefficient at pixel x for frequency u, direct window sum.

    Uses offsets relative to the window center, so the phase origin travels
    with the pixel and the label image is translation covariant.
    """
    r = params.radius
    row, col = x
    h, w = img.height, img.width
    if not (0 <= row < h and 0 <= col < w):
        raise ValueError("pixel coordinate outside image")
    if params.border_policy == "skip_border":
        if row < r or col < r or row >= h - r or col >= w - r:
            raise BorderPixelError("border pixel")
        window = img.pixels[row - r : row + r + 1, col - r : col + r + 1]
    else:
        rows = np.clip(np.arange(row - r, row + r + 1), 0, h - 1)
        cols = np.clip(np.arange(col - r, col + r + 1), 0, w - 1)
        window = img.pixels[np.ix_(rows, cols)]
    off = np.arange(-r, r + 1, dtype=np.float64)
    phase = np.exp(-2j * np.pi * (u[0] * off[:, None] + u[1] * off[None, :]))
    return complex(np.sum(window * phase))


def quantize_phase(coeffs: Sequence[complex]) -> int:
    """8-bit label from 4 complex coefficients.

    Bit order: real parts of the four coefficients first (bit 0 = first
    coefficient), then imaginary parts. A component >= 0 sets its bit, so
    all-zero coefficients give label 255.
    """
    if len(coeffs) != 4:
        raise ValueError("quantize_phase expects exactly 4 coefficients")
    c = np.asarray(coeffs, dtype=np.complex128)
    g = np.concatenate([c.real, c.imag])
    bits = (g >= 0.0).astype(np.uint8)
    return int(np.sum(bits * (1 << np.arange(8))))


def _correlate_valid(
    arr: np.ndarray, kernel: np.ndarray, axis: int, centered: bool
) -> np.ndarray:
    """Valid-mode 1-D correlation along an axis.

    With `centered` the sum runs over k_t * (x_t - x_center), algebraically
    equal for a zero-sum kernel but exactly zero on constant stretches, so
    flat regions quantize to the all-ones label instead of float noise.
    """
    n = arr.shape[axis]
    m = n - kernel.size + 1
    r = (kernel.size - 1) // 2

    def span(t):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(t, t + m)
        return arr[tuple(sl)]

    out = np.zeros(
        (m, arr.shape[1]) if axis == 0 else (arr.shape[0], m), dtype=np.complex128
    )
    center = span(r) if centered else None
    for t, kt in enumerate(kernel):
        out += kt * (span(t) - center) if centered else kt * span(t)
    return out


def label_image(img: GrayImage, params: LpqParams | None = None) -> np.ndarray:
    """Per-pixel LPQ labels via separable sliding STFT.

    skip_border labels only the interior where the window fits; replicate
    pads with edge values and labels every pixel.
    """
    params = params or LpqParams()
    ws = params.window_size
    if img.height <= ws or img.width <= ws:
        raise ImageTooSmallError("image smaller than LPQ window")

    if params.border_policy == "replicate":
        r = params.radius
        field = np.pad(img.pixels, r, mode="edge").astype(np.complex128)
    else:
        field = img.pixels.astype(np.complex128)

    planes = []
    for fr, fc in params.frequencies():
        k_row, row_zero_sum = _phase_kernel(fr, ws)
        k_col, col_zero_sum = _phase_kernel(fc, ws)
        tmp = _correlate_valid(field, k_row, axis=0, centered=row_zero_sum)
        planes.append(_correlate_valid(tmp, k_col, axis=1, centered=col_zero_sum))

    labels = np.zeros(planes[0].shape, dtype=np.uint8)
    for j, plane in enumerate(planes):
        labels |= (plane.real >= 0.0).astype(np.uint8) << j
        labels |= (plane.imag >= 0.0).astype(np.uint8) << (j + 4)
    return labels


def lpq_descriptor(img: GrayImage, params: LpqParams | None = None) -> FeatureVector:
    """L1-normalized 256-bin histogram of the LPQ label image."""
    labels = label_image(img, params)
    hist = np.bincount(labels.ravel(), minlength=256).astype(np.float64)
    return FeatureVector(hist / hist.sum())
