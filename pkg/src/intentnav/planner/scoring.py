"""Trajectory evaluation: consistency, detour, and safety components.

Consistency and detour are inverse mean point-wise distances (to the
previous plan and to the reference respectively), capped so a vanishing
denominator cannot dominate. Safety is the mean distance to the obstacle
centers of the most likely intent combination, averaged over steps and
obstacles. The combined raw score is the weighted sum of the three.
"""

from __future__ import annotations

import numpy as np

from ..params import ScoreWeights


def _inverse_mean_distance(traj: np.ndarray, other: np.ndarray, cap: float) -> float:
    # steps 1..N: the fixed initial state carries no information
    d = np.linalg.norm(traj[1:] - other[1:], axis=1).sum()
    n = len(traj) - 1
    if d <= n / cap:
        return float(cap)
    return float(n / d)


def consistency_score(traj: np.ndarray, prev_traj: np.ndarray | None, cap: float) -> float:
    """Inverse mean distance to the previous plan (time-aligned by the
    caller); returns the cap when no previous plan exists."""
    if prev_traj is None:
        return float(cap)
    if len(prev_traj) != len(traj):
        raise ValueError(f"trajectory lengths differ: {len(traj)} vs {len(prev_traj)}")
    return _inverse_mean_distance(traj, prev_traj, cap)


def detour_score(traj: np.ndarray, ref: np.ndarray, cap: float) -> float:
    """Inverse mean distance to the reference trajectory."""
    if len(ref) != len(traj):
        raise ValueError(f"trajectory lengths differ: {len(traj)} vs {len(ref)}")
    return _inverse_mean_distance(traj, ref, cap)


def safety_score(traj: np.ndarray, static_centers: np.ndarray, dyn_centers: np.ndarray,
                 cap: float) -> float:
    """Mean distance from trajectory points to all obstacle centers.

    `static_centers` is (S,3) (constant over steps); `dyn_centers` is
    (N+1,D,3) predicted positions under the most likely combination.
    Returns the cap when there are no obstacles at all.
    """
    n = len(traj) - 1
    n_static = len(static_centers)
    n_dyn = dyn_centers.shape[1] if dyn_centers.ndim == 3 else 0
    if n_static + n_dyn == 0:
        return float(cap)
    total = np.zeros(n)
    if n_static:
        total += np.linalg.norm(traj[1:, None, :] - static_centers[None, :, :], axis=2).sum(axis=1)
    if n_dyn:
        total += np.linalg.norm(traj[1:, None, :] - dyn_centers[1:], axis=2).sum(axis=1)
    return float(total.sum() / (n * (n_static + n_dyn)))


def raw_score(cons: float, detour: float, safety: float, weights: ScoreWeights) -> float:
    return weights.lambda1 * cons + weights.lambda2 * detour + weights.lambda3 * safety


def shift_previous_plan(prev_positions: np.ndarray, elapsed_ticks: int) -> np.ndarray:
    """Time-align the previous plan with the current grid: drop the elapsed
    steps and hold the final point past its end."""
    n = len(prev_positions)
    idx = np.minimum(np.arange(n) + elapsed_ticks, n - 1)
    return prev_positions[idx]
