"""Per-writer enrollment and verification.

Enrollment trains two one-class SVMs on the writer's genuine signatures
(LPQ features for one, wavelet features for the other), fuses their sigmoid
scores by averaging, and freezes a per-writer acceptance threshold
T = m + k * sigma where m and sigma summarize the fused scores of the
enrollment set. Forgeries never enter enrollment; they are only ever seen
by the k calibration sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .features import FeatureVector
from .imaging import BlankSignatureError, GrayImage, PreprocessConfig, preprocess
from .lpq import LpqParams, lpq_descriptor
from .ocsvm import KernelParams, OcsvmModel, SolverConfig, probability_score, train_ocsvm
from .wavelet import DwtParams, WaveletFilterPair, wavelet_descriptor

GENUINE = "genuine"
FORGERY = "forgery"


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob that must be frozen at enrollment for scoring to replay.

    `kernel` applies to both one-class models; the two descriptors live on
    different distance scales (a 256-bin probability vector versus ten
    concatenated 12-bin probability blocks), so each stream can also be
    given its own bandwidth via kernel_lpq / kernel_dwt.
    """

    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    lpq: LpqParams = field(default_factory=LpqParams)
    dwt: DwtParams = field(default_factory=DwtParams)
    kernel: KernelParams = field(default_factory=KernelParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    wavelet_filters: WaveletFilterPair = field(default_factory=WaveletFilterPair.haar)
    kernel_lpq: KernelParams | None = None
    kernel_dwt: KernelParams | None = None

    @property
    def lpq_kernel(self) -> KernelParams:
        return self.kernel_lpq if self.kernel_lpq is not None else self.kernel

    @property
    def dwt_kernel(self) -> KernelParams:
        return self.kernel_dwt if self.kernel_dwt is not None else self.kernel


@dataclass(frozen=True, eq=False)
class ScorePair:
    lpq_score: float
    dwt_score: float

    @property
    def fused(self) -> float:
        return (self.lpq_score + self.dwt_score) / 2.0

    @property
    def max_fused(self) -> float:
        # evaluation-only baseline, not a supported verification mode
        return max(self.lpq_score, self.dwt_score)


@dataclass(frozen=True, eq=False)
class Verdict:
    decision: str
    scores: ScorePair
    threshold_used: float

    @property
    def is_genuine(self) -> bool:
        return self.decision == GENUINE


@dataclass(frozen=True, eq=False)
class WriterProfile:
    writer_id: str
    lpq_model: OcsvmModel
    dwt_model: OcsvmModel
    mean_m: float
    std_sigma: float
    k_factor: float
    threshold_T: float
    pipeline: PipelineConfig

    @property
    def preprocess_cfg(self) -> PreprocessConfig:
        return self.pipeline.preprocess

    @property
    def lpq_params(self) -> LpqParams:
        return self.pipeline.lpq

    @property
    def dwt_params(self) -> DwtParams:
        return self.pipeline.dwt


def extract_features(
    img: GrayImage, pipeline: PipelineConfig
) -> tuple[FeatureVector, FeatureVector]:
    """Preprocess once and compute both texture descriptors."""
    pre = preprocess(img, pipeline.preprocess)
    return (
        lpq_descriptor(pre, pipeline.lpq),
        wavelet_descriptor(pre, pipeline.dwt, pipeline.wavelet_filters),
    )


def score_features(
    profile: WriterProfile, lpq_vec: FeatureVector, dwt_vec: FeatureVector
) -> ScorePair:
    return ScorePair(
        lpq_score=probability_score(profile.lpq_model, lpq_vec),
        dwt_score=probability_score(profile.dwt_model, dwt_vec),
    )


def enroll_from_features(
    writer_id: str,
    features: Sequence[tuple[FeatureVector, FeatureVector]],
    pipeline: PipelineConfig,
    k: float,
) -> tuple[WriterProfile, list[ScorePair]]:
    """Enrollment core for callers that already extracted descriptors.

    Returns the profile together with the per-sample enrollment scores the
    threshold statistics were computed from.
    """
    if len(features) < 2:
        raise ValueError(
            f"writer {writer_id}: need at least 2 genuine images to estimate sigma"
        )
    lpq_vecs = [f[0] for f in features]
    dwt_vecs = [f[1] for f in features]
    lpq_model = train_ocsvm(lpq_vecs, pipeline.lpq_kernel, pipeline.solver)
    dwt_model = train_ocsvm(dwt_vecs, pipeline.dwt_kernel, pipeline.solver)

    pairs = [
        ScorePair(
            lpq_score=probability_score(lpq_model, lv),
            dwt_score=probability_score(dwt_model, dv),
        )
        for lv, dv in features
    ]
    fused = np.array([p.fused for p in pairs])
    m = float(fused.mean())
    sigma = float(fused.std())  # population standard deviation
    profile = WriterProfile(
        writer_id=writer_id,
        lpq_model=lpq_model,
        dwt_model=dwt_model,
        mean_m=m,
        std_sigma=sigma,
        k_factor=float(k),
        threshold_T=m + float(k) * sigma,
        pipeline=pipeline,
    )
    return profile, pairs


def enroll(
    writer_id: str,
    genuine_images: Sequence[GrayImage],
    pipeline: PipelineConfig | None = None,
    k: float = 2.18,
) -> WriterProfile:
    """Train a writer profile from genuine signatures only."""
    pipeline = pipeline or PipelineConfig()
    if len(genuine_images) < 2:
        raise ValueError(
            f"writer {writer_id}: need at least 2 genuine images to estimate sigma"
        )
    features = []
    for idx, img in enumerate(genuine_images):
        try:
            features.append(extract_features(img, pipeline))
        except BlankSignatureError as exc:
            raise BlankSignatureError(
                f"writer {writer_id}, genuine sample {idx}: {exc}"
            ) from exc
    profile, _ = enroll_from_features(writer_id, features, pipeline, k)
    return profile


def score(profile: WriterProfile, img: GrayImage) -> ScorePair:
    """Score a probe image with the profile's frozen configuration."""
    lpq_vec, dwt_vec = extract_features(img, profile.pipeline)
    return score_features(profile, lpq_vec, dwt_vec)


def verify(profile: WriterProfile, img: GrayImage) -> Verdict:
    """Accept as genuine when the fused score reaches the threshold."""
    pair = score(profile, img)
    decision = GENUINE if pair.fused >= profile.threshold_T else FORGERY
    return Verdict(decision=decision, scores=pair, threshold_used=profile.threshold_T)


@dataclass(frozen=True)
class WriterTuningScores:
    """Fused tuning scores for one writer plus its enrollment statistics."""

    writer_id: str
    mean_m: float
    std_sigma: float
    genuine_scores: tuple
    forgery_scores: tuple

    def __post_init__(self):
        if self.std_sigma < 0:
            raise ValueError("std_sigma must be >= 0")
        if len(self.genuine_scores) == 0 or len(self.forgery_scores) == 0:
            raise ValueError(
                f"writer {self.writer_id}: calibration needs at least one genuine "
                "and one forgery score"
            )


class CalibrationResult(NamedTuple):
    k_eer: float
    far_at_eer: float
    frr_at_eer: float


def threshold_sweep(
    writer_sets: Sequence[WriterTuningScores],
    k_range: tuple[float, float] = (-5.0, 5.0),
    steps: int = 1001,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pooled FAR and FRR over a uniform k grid.

    Acceptance uses the same rule as verify: score >= m + k * sigma, so the
    sweep is exactly the operating curve of the deployed thresholds.
    """
    if not writer_sets:
        raise ValueError("calibration needs at least one writer")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    grid = np.linspace(k_range[0], k_range[1], steps)

    accepted_f = np.zeros(steps)
    accepted_g = np.zeros(steps)
    total_f = 0
    total_g = 0
    for ws in writer_sets:
        thresholds = ws.mean_m + grid * ws.std_sigma
        g = np.asarray(ws.genuine_scores, dtype=np.float64)
        f = np.asarray(ws.forgery_scores, dtype=np.float64)
        accepted_g += np.sum(g[:, None] >= thresholds[None, :], axis=0)
        accepted_f += np.sum(f[:, None] >= thresholds[None, :], axis=0)
        total_g += g.size
        total_f += f.size

    far = accepted_f / total_f
    frr = 1.0 - accepted_g / total_g
    assert np.all(np.diff(far) <= 0), "FAR must be non-increasing in k"
    assert np.all(np.diff(frr) >= 0), "FRR must be non-decreasing in k"
    return grid, far, frr


def calibrate_k(
    writer_sets: Sequence[WriterTuningScores],
    k_range: tuple[float, float] = (-5.0, 5.0),
    steps: int = 1001,
) -> CalibrationResult:
    """Grid value of k where FAR and FRR cross (minimal gap, smallest k)."""
    grid, far, frr = threshold_sweep(writer_sets, k_range, steps)
    gaps = np.abs(far - frr)
    best = int(np.argmin(gaps))  # argmin takes the first, hence the smallest k
    return CalibrationResult(float(grid[best]), float(far[best]), float(frr[best]))
