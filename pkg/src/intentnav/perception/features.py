"""Detection features and the similarity used for track association."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Detection:
    pos: np.ndarray        # (3,) center
    dim: np.ndarray        # (3,) full extents, > 0
    cloud_len: int         # synthesized point-cloud size, >= 1
    cloud_std: float       # scalar radial cloud std, >= 0

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float)
        self.dim = np.asarray(self.dim, dtype=float)
        if np.any(self.dim <= 0):
            raise ValueError(f"detection dim must be positive, got {self.dim}")
        if self.cloud_len < 1:
            raise ValueError(f"cloud_len must be >= 1, got {self.cloud_len}")
        if self.cloud_std < 0:
            raise ValueError(f"cloud_std must be >= 0, got {self.cloud_std}")


def feature_of(det: Detection) -> np.ndarray:
    """8-dim feature: [pos(3), dim(3), cloud_len, cloud_std] in fixed order."""
    return np.concatenate([det.pos, det.dim, [float(det.cloud_len)], [det.cloud_std]])


def similarity(fi: np.ndarray, fj: np.ndarray, w_diag: np.ndarray) -> float:
    """exp(-||W (fi - fj)||_2^2) with diagonal W; symmetric, in (0, 1]."""
    fi = np.asarray(fi, dtype=float)
    fj = np.asarray(fj, dtype=float)
    if fi.shape != fj.shape:
        raise ValueError(f"feature shapes differ: {fi.shape} vs {fj.shape}")
    d = np.asarray(w_diag, dtype=float) * (fi - fj)
    return float(np.exp(-float(d @ d)))
