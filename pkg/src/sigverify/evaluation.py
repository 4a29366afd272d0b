"""Error-rate metrics and the repeated random split evaluation protocol.

Rates are pooled over writers (micro-averaged): FAR is the fraction of all
forgery probes accepted, FRR the fraction of all genuine probes rejected,
AER their mean. The protocol repeats the train/test split with a seeded
portable RNG so every report is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .rng import SplitMix64
from .synth import SynthWriterSpec, default_writer_specs, generate_synth_corpus
from .verifier import (
    PipelineConfig,
    WriterProfile,
    WriterTuningScores,
    enroll_from_features,
    extract_features,
    score_features,
    threshold_sweep,
)

__all__ = [
    "FEATURE_MODES",
    "EvalReport",
    "ProtocolSpec",
    "RepeatOutcome",
    "WriterOutcome",
    "SynthWriterSpec",
    "compute_rates",
    "collect_tuning_scores",
    "det_curve",
    "default_writer_specs",
    "featurize_corpus",
    "generate_synth_corpus",
    "run_protocol",
]

FEATURE_MODES = ("fused", "lpq_only", "dwt_only")


@dataclass(frozen=True)
class ProtocolSpec:
    n_genuine_train: int = 8
    n_genuine_test: int = 16
    n_forgery_test: int = 30
    repeats: int = 10
    rng_seed: int = 2026

    def __post_init__(self):
        if self.n_genuine_train < 2:
            raise ValueError("n_genuine_train must be >= 2")
        if self.n_genuine_test < 1 or self.n_forgery_test < 1:
            raise ValueError("test sample counts must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass(frozen=True)
class RepeatOutcome:
    repeat: int
    far: float
    frr: float

    @property
    def aer(self) -> float:
        return (self.far + self.frr) / 2.0


@dataclass(frozen=True)
class WriterOutcome:
    writer_id: str
    far: float
    frr: float
    n_genuine: int
    n_forgery: int


@dataclass(frozen=True, eq=False)
class EvalReport:
    far: float
    frr: float
    k_used: float
    feature_mode: str = "fused"
    eer: float | None = None
    per_writer: tuple = ()
    per_repeat: tuple = ()

    @property
    def aer(self) -> float:
        return (self.far + self.frr) / 2.0


def compute_rates(
    verdicts_genuine, verdicts_forgery, k_used: float = float("nan"),
    feature_mode: str = "fused",
) -> EvalReport:
    """FAR/FRR/AER from verdict lists on known-genuine and known-forged probes."""
    genuine = list(verdicts_genuine)
    forgery = list(verdicts_forgery)
    if not genuine or not forgery:
        raise ValueError("compute_rates needs non-empty verdict lists for both classes")
    frr = sum(1 for v in genuine if not v.is_genuine) / len(genuine)
    far = sum(1 for v in forgery if v.is_genuine) / len(forgery)
    return EvalReport(far=far, frr=frr, k_used=k_used, feature_mode=feature_mode)


def _mode_score(pair, mode: str, fusion_rule: str) -> float:
    if mode == "lpq_only":
        return pair.lpq_score
    if mode == "dwt_only":
        return pair.dwt_score
    return pair.max_fused if fusion_rule == "max" else pair.fused


def featurize_corpus(corpus: Corpus, pipeline: PipelineConfig, cache: dict | None = None) -> dict:
    """Descriptor pairs for every corpus image, keyed (writer_id, kind, index).

    Pass the returned dict back in as `cache` to reuse extractions across
    protocol runs with the same pipeline configuration.
    """
    cache = cache if cache is not None else {}
    for w in corpus.writers:
        for kind, images in (("genuine", w.genuine), ("forgery", w.forgery)):
            for idx, img in enumerate(images):
                key = (w.writer_id, kind, idx)
                if key not in cache:
                    cache[key] = extract_features(img, pipeline)
    return cache


def run_protocol(
    corpus: Corpus,
    spec: ProtocolSpec,
    mode: str = "fused",
    k: float = 2.18,
    pipeline: PipelineConfig | None = None,
    fusion_rule: str = "mean",
    feature_cache: dict | None = None,
) -> EvalReport:
    """Repeated random-split evaluation at a fixed k.

    Per repeat and writer the seeded RNG picks disjoint training and test
    genuine samples plus a forgery test set; the writer is enrolled on the
    training genuine images only and every test probe is thresholded at
    m + k * sigma of the mode's enrollment scores. `fusion_rule="max"` is a
    baseline hook for the fused mode only.
    """
    if mode not in FEATURE_MODES:
        raise ValueError(f"mode must be one of {FEATURE_MODES}")
    if fusion_rule not in ("mean", "max"):
        raise ValueError("fusion_rule must be 'mean' or 'max'")
    pipeline = pipeline or PipelineConfig()

    for w in corpus.writers:
        if len(w.genuine) < spec.n_genuine_train + spec.n_genuine_test:
            raise ValueError(
                f"writer {w.writer_id}: needs at least "
                f"{spec.n_genuine_train + spec.n_genuine_test} genuine images, "
                f"has {len(w.genuine)}"
            )
        if len(w.forgery) < spec.n_forgery_test:
            raise ValueError(
                f"writer {w.writer_id}: needs at least {spec.n_forgery_test} "
                f"forgery images, has {len(w.forgery)}"
            )

    features = featurize_corpus(corpus, pipeline, feature_cache)
    master = SplitMix64(spec.rng_seed)

    per_repeat = []
    writer_counts = {
        w.writer_id: {"fa": 0, "fr": 0, "ng": 0, "nf": 0} for w in corpus.writers
    }
    for r in range(spec.repeats):
        rep_fa = rep_fr = rep_ng = rep_nf = 0
        for widx, w in enumerate(corpus.writers):
            rng = master.spawn(r, widx)
            pool = rng.sample_indices(len(w.genuine), spec.n_genuine_train + spec.n_genuine_test)
            train_idx = pool[: spec.n_genuine_train]
            test_idx = pool[spec.n_genuine_train :]
            forgery_idx = rng.sample_indices(len(w.forgery), spec.n_forgery_test)

            train_feats = [features[(w.writer_id, "genuine", i)] for i in train_idx]
            profile, enroll_pairs = enroll_from_features(
                w.writer_id, train_feats, pipeline, k
            )
            enroll_vals = np.array(
                [_mode_score(p, mode, fusion_rule) for p in enroll_pairs]
            )
            m = float(enroll_vals.mean())
            sigma = float(enroll_vals.std())
            threshold = m + k * sigma

            counts = writer_counts[w.writer_id]
            for i in test_idx:
                pair = score_features(profile, *features[(w.writer_id, "genuine", i)])
                if _mode_score(pair, mode, fusion_rule) < threshold:
                    rep_fr += 1
                    counts["fr"] += 1
                rep_ng += 1
                counts["ng"] += 1
            for i in forgery_idx:
                pair = score_features(profile, *features[(w.writer_id, "forgery", i)])
                if _mode_score(pair, mode, fusion_rule) >= threshold:
                    rep_fa += 1
                    counts["fa"] += 1
                rep_nf += 1
                counts["nf"] += 1
        per_repeat.append(
            RepeatOutcome(repeat=r, far=rep_fa / rep_nf, frr=rep_fr / rep_ng)
        )

    far = float(np.mean([ro.far for ro in per_repeat]))
    frr = float(np.mean([ro.frr for ro in per_repeat]))
    per_writer = tuple(
        WriterOutcome(
            writer_id=wid,
            far=c["fa"] / c["nf"],
            frr=c["fr"] / c["ng"],
            n_genuine=c["ng"],
            n_forgery=c["nf"],
        )
        for wid, c in writer_counts.items()
    )
    return EvalReport(
        far=far,
        frr=frr,
        k_used=k,
        feature_mode=mode,
        per_writer=per_writer,
        per_repeat=tuple(per_repeat),
    )


def collect_tuning_scores(
    profiles: dict[str, WriterProfile],
    corpus: Corpus,
    feature_cache: dict | None = None,
) -> list[WriterTuningScores]:
    """Fused scores of every corpus probe against its writer's profile.

    The corpus passed here should be the tuning split: genuine samples not
    used at enrollment plus the tuning forgeries.
    """
    sets = []
    for w in corpus.writers:
        if w.writer_id not in profiles:
            raise KeyError(f"no enrolled profile for writer: {w.writer_id}")
        profile = profiles[w.writer_id]
        cache = featurize_corpus(
            Corpus(corpus_id="tuning", writers=[w]), profile.pipeline, feature_cache
        )
        genuine = tuple(
            score_features(profile, *cache[(w.writer_id, "genuine", i)]).fused
            for i in range(len(w.genuine))
        )
        forgery = tuple(
            score_features(profile, *cache[(w.writer_id, "forgery", i)]).fused
            for i in range(len(w.forgery))
        )
        sets.append(
            WriterTuningScores(
                writer_id=w.writer_id,
                mean_m=profile.mean_m,
                std_sigma=profile.std_sigma,
                genuine_scores=genuine,
                forgery_scores=forgery,
            )
        )
    return sets


def det_curve(
    writer_sets,
    k_range: tuple[float, float] = (-5.0, 5.0),
    steps: int = 1001,
) -> list[tuple[float, float, float]]:
    """(k, FAR, FRR) triples over the calibration sweep, ready for plotting."""
    grid, far, frr = threshold_sweep(writer_sets, k_range, steps)
    return [(float(k), float(fa), float(fr)) for k, fa, fr in zip(grid, far, frr)]
