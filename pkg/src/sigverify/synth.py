"""Synthetic signature corpus generator.

The real benchmark corpora are license-gated, so end-to-end evaluation runs
on generated "signatures": per-writer stroke skeletons rendered as smooth
dark curves on a light canvas. Genuine samples perturb the skeleton's
control points with small seeded noise; forgeries perturb the same skeleton
with larger noise, standing in for skilled imitations. Everything is
reproducible from seeds, down to identical pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, WriterSamples
from .imaging import GrayImage
from .rng import SplitMix64, mix64_doubles

_BACKGROUND = 247.0
_INK_DEPTH = 230.0
_NOISE_SPAN = 4.0


@dataclass(frozen=True)
class SynthWriterSpec:
    writer_seed: int
    stroke_count: int = 4
    jitter_genuine: float = 1.5
    jitter_forgery: float = 6.0
    canvas: tuple[int, int] = (96, 168)  # (rows, cols)

    def __post_init__(self):
        if self.stroke_count < 1:
            raise ValueError("zero strokes")
        if self.jitter_genuine < 0:
            raise ValueError("jitter_genuine must be >= 0")
        # >= rather than > so chance-level control runs (equal jitters) are possible
        if self.jitter_forgery < self.jitter_genuine:
            raise ValueError("jitter_forgery must be >= jitter_genuine")
        if min(self.canvas) < 48:
            raise ValueError("canvas must be at least 48 pixels on each side")


def _skeleton(spec: SynthWriterSpec, rng: SplitMix64) -> list[np.ndarray]:
    """Control polylines for one writer, columns x and rows y, float pixels."""
    rows, cols = spec.canvas
    margin = 18.0
    usable_w = cols - 2 * margin
    usable_h = rows - 2 * margin
    mid_y = rows / 2.0
    slot = usable_w / spec.stroke_count
    strokes = []
    for s in range(spec.stroke_count):
        n_ctrl = rng.randint(4, 6)
        x0 = margin + s * slot + rng.uniform(-0.15, 0.15) * slot
        span = slot * rng.uniform(0.9, 1.5)
        fractions = sorted(rng.random() for _ in range(n_ctrl))
        lo, hi = fractions[0], fractions[-1]
        width = max(hi - lo, 1e-6)
        pts = np.empty((n_ctrl, 2))
        for i, f in enumerate(fractions):
            x = x0 + (f - lo) / width * span
            y = mid_y + rng.uniform(-0.48, 0.48) * usable_h
            pts[i] = (min(max(x, margin), cols - margin), y)
        strokes.append(pts)
    return strokes


def _catmull_rom(points: np.ndarray, samples_per_segment: int) -> np.ndarray:
    """Dense polyline through the control points (uniform Catmull-Rom)."""
    if len(points) < 2:
        return points
    padded = np.vstack([points[0], points, points[-1]])
    t = np.linspace(0.0, 1.0, samples_per_segment, endpoint=False)[:, None]
    curve = []
    for i in range(len(points) - 1):
        p0, p1, p2, p3 = padded[i], padded[i + 1], padded[i + 2], padded[i + 3]
        a = 2.0 * p1
        b = p2 - p0
        c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3
        d = -p0 + 3.0 * p1 - 3.0 * p2 + p3
        curve.append(0.5 * (a + b * t + c * t * t + d * t * t * t))
    curve.append(points[-1][None, :])
    return np.vstack(curve)


def _stamp_path(ink: np.ndarray, path: np.ndarray, pen: float) -> None:
    """Max-compose soft round pen marks along a dense path."""
    rows, cols = ink.shape
    radius = int(np.ceil(pen * 2.0))
    sigma2 = 2.0 * (pen / 2.0) ** 2
    for x, y in path:
        cy, cx = int(round(y)), int(round(x))
        if cy < -radius or cx < -radius or cy >= rows + radius or cx >= cols + radius:
            continue
        y0 = max(cy - radius, 0)
        y1 = min(cy + radius, rows - 1)
        x0 = max(cx - radius, 0)
        x1 = min(cx + radius, cols - 1)
        yy = (np.arange(y0, y1 + 1, dtype=np.float64) - y)[:, None]
        xx = (np.arange(x0, x1 + 1, dtype=np.float64) - x)[None, :]
        blob = np.exp(-(yy * yy + xx * xx) / sigma2)
        region = ink[y0 : y1 + 1, x0 : x1 + 1]
        np.maximum(region, blob, out=region)


def _render(spec: SynthWriterSpec, skeleton, jitter: float, rng: SplitMix64) -> GrayImage:
    rows, cols = spec.canvas
    dx = rng.uniform(-4.0, 4.0)
    dy = rng.uniform(-4.0, 4.0)
    pen = 1.9 + rng.uniform(-0.25, 0.45)
    noise_seed = rng.next_u64()

    ink = np.zeros((rows, cols))
    for pts in skeleton:
        wobbled = np.array(
            [
                (x + rng.normal(0.0, jitter) + dx, y + rng.normal(0.0, jitter) + dy)
                for x, y in pts
            ]
        )
        path = _catmull_rom(wobbled, samples_per_segment=24)
        _stamp_path(ink, path, pen)

    noise = mix64_doubles(np.arange(rows * cols).reshape(rows, cols), noise_seed)
    pixels = _BACKGROUND - _INK_DEPTH * ink - _NOISE_SPAN * noise
    return GrayImage(np.clip(np.rint(pixels), 0.0, 255.0))


def render_writer_samples(
    spec: SynthWriterSpec, n_genuine: int, n_forgery: int
) -> tuple[list[GrayImage], list[GrayImage]]:
    base = SplitMix64(spec.writer_seed)
    skeleton = _skeleton(spec, base.spawn(0))
    genuine = [
        _render(spec, skeleton, spec.jitter_genuine, base.spawn(1, i))
        for i in range(n_genuine)
    ]
    forgery = [
        _render(spec, skeleton, spec.jitter_forgery, base.spawn(2, i))
        for i in range(n_forgery)
    ]
    return genuine, forgery


def generate_synth_corpus(
    specs, n_genuine: int, n_forgery: int, corpus_id: str = "synthetic"
) -> Corpus:
    """Writer-labeled image sets, pixel-identical for identical seeds."""
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one writer spec")
    if n_genuine < 1 or n_forgery < 1:
        raise ValueError("need at least one genuine and one forgery sample per writer")
    writers = []
    for idx, spec in enumerate(specs):
        genuine, forgery = render_writer_samples(spec, n_genuine, n_forgery)
        writers.append(
            WriterSamples(writer_id=f"w{idx:03d}", genuine=genuine, forgery=forgery)
        )
    return Corpus(corpus_id=corpus_id, writers=writers)


def default_writer_specs(
    n_writers: int,
    seed: int,
    stroke_count: int = 4,
    jitter_genuine: float = 1.5,
    jitter_forgery: float = 6.0,
    canvas: tuple[int, int] = (96, 168),
) -> list[SynthWriterSpec]:
    master = SplitMix64(seed)
    return [
        SynthWriterSpec(
            writer_seed=master.spawn(101, w).next_u64(),
            stroke_count=stroke_count,
            jitter_genuine=jitter_genuine,
            jitter_forgery=jitter_forgery,
            canvas=canvas,
        )
        for w in range(n_writers)
    ]
