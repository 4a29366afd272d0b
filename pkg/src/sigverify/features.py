"""Shared descriptor container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Fixed-length real descriptor (256 bins for LPQ, 120 for wavelet)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("FeatureVector needs a non-empty 1-D array")
        if not np.all(np.isfinite(v)):
            raise ValueError("FeatureVector values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return int(self.values.size)
