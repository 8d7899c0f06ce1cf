"""Ellipsoidal collision constraints for the trajectory optimizer.

Every obstacle (static box or per-step predicted risk box) becomes the
minimal same-orientation ellipsoid through the box corners. A trajectory
point is collision-free for an obstacle when, with (x, y, z) the relative
position in world axes and phi the ellipsoid yaw,

    (x cos phi + y sin phi)^2 / a^2
  + (-x sin phi + y cos phi)^2 / b^2
  + z^2 / c^2  >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def ellipsoid_residual(rel, a: float, b: float, c: float, phi: float = 0.0) -> float:
    """Constraint value minus one; >= 0 means free of this obstacle."""
    x, y, z = np.asarray(rel, dtype=float)
    cp, sp = np.cos(phi), np.sin(phi)
    u = x * cp + y * sp
    v = -x * sp + y * cp
    return float(u * u / (a * a) + v * v / (b * b) + z * z / (c * c) - 1.0)


def box_to_ellipsoid(half_extents, yaw: float = 0.0):
    """Minimal enclosing same-orientation ellipsoid of a box: axis lengths
    sqrt(3) times the half-extents put all eight corners on the surface."""
    h = np.asarray(half_extents, dtype=float)
    if np.any(h <= 0):
        raise ValueError(f"half_extents must be positive, got {h}")
    a, b, c = np.sqrt(3.0) * h
    return float(a), float(b), float(c), float(yaw)


@dataclass
class ObstacleConstraintSet:
    """Static ellipsoids plus per-step dynamic ellipsoids on the MPC grid.

    static:  centers (S,3), axes (S,3), yaw (S,)
    dynamic: centers (N+1,D,3), axes (N+1,D,3)  (dynamic yaw is 0)
    """
    static_centers: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    static_axes: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    static_yaw: np.ndarray = field(default_factory=lambda: np.empty(0))
    dyn_centers: np.ndarray = field(default_factory=lambda: np.empty((0, 0, 3)))
    dyn_axes: np.ndarray = field(default_factory=lambda: np.empty((0, 0, 3)))

    @property
    def empty(self) -> bool:
        return len(self.static_centers) == 0 and self.dyn_centers.shape[1] == 0

    def residuals(self, positions: np.ndarray) -> np.ndarray:
        """Residuals for (N+1,3) positions against every obstacle; returns
        (N+1, S + D). Empty sets give a (N+1, 0) array."""
        parts = []
        if len(self.static_centers):
            rel = positions[:, None, :] - self.static_centers[None, :, :]
            cp, sp = np.cos(self.static_yaw), np.sin(self.static_yaw)
            u = rel[:, :, 0] * cp + rel[:, :, 1] * sp
            v = -rel[:, :, 0] * sp + rel[:, :, 1] * cp
            ax = self.static_axes
            parts.append(u**2 / ax[None, :, 0]**2 + v**2 / ax[None, :, 1]**2
                         + rel[:, :, 2]**2 / ax[None, :, 2]**2 - 1.0)
        if self.dyn_centers.shape[1]:
            rel = positions[:, None, :] - self.dyn_centers
            ax = self.dyn_axes
            parts.append(rel[:, :, 0]**2 / ax[:, :, 0]**2 + rel[:, :, 1]**2 / ax[:, :, 1]**2
                         + rel[:, :, 2]**2 / ax[:, :, 2]**2 - 1.0)
        if not parts:
            return np.empty((len(positions), 0))
        return np.concatenate(parts, axis=1)

    def residual_gradients(self, positions: np.ndarray):
        """Residuals plus their gradients w.r.t. each position.
        Returns (res (N+1,M), grad (N+1,M,3))."""
        n = len(positions)
        res_parts, grad_parts = [], []
        if len(self.static_centers):
            rel = positions[:, None, :] - self.static_centers[None, :, :]
            cp, sp = np.cos(self.static_yaw), np.sin(self.static_yaw)
            u = rel[:, :, 0] * cp + rel[:, :, 1] * sp
            v = -rel[:, :, 0] * sp + rel[:, :, 1] * cp
            ax = self.static_axes
            res = u**2 / ax[None, :, 0]**2 + v**2 / ax[None, :, 1]**2 + rel[:, :, 2]**2 / ax[None, :, 2]**2 - 1.0
            g = np.empty((n, len(cp), 3))
            gu = 2.0 * u / ax[None, :, 0]**2
            gv = 2.0 * v / ax[None, :, 1]**2
            g[:, :, 0] = gu * cp - gv * sp
            g[:, :, 1] = gu * sp + gv * cp
            g[:, :, 2] = 2.0 * rel[:, :, 2] / ax[None, :, 2]**2
            res_parts.append(res)
            grad_parts.append(g)
        if self.dyn_centers.shape[1]:
            rel = positions[:, None, :] - self.dyn_centers
            ax = self.dyn_axes
            res = (rel**2 / ax**2).sum(axis=2) - 1.0
            g = 2.0 * rel / ax**2
            res_parts.append(res)
            grad_parts.append(g)
        if not res_parts:
            return np.empty((n, 0)), np.empty((n, 0, 3))
        return np.concatenate(res_parts, axis=1), np.concatenate(grad_parts, axis=1)


def build_constraints(static_boxes, predictions, n_steps: int, dt: float,
                      pred_dt: float, margin: float = 0.0) -> ObstacleConstraintSet:
    """Assemble the constraint set for one MPC solve.

    `predictions` is a list of IntentPrediction (one per dynamic obstacle,
    already resolved to a single intent). Predicted positions / risk sizes
    are resampled onto the MPC grid by linear interpolation in time; past
    the prediction end the position holds and the risk size keeps growing at
    its final rate. `margin` inflates every half-extent before the
    ellipsoid fit.
    """
    out = ObstacleConstraintSet()
    if static_boxes:
        out.static_centers = np.array([b.center for b in static_boxes], dtype=float)
        axes, yaws = [], []
        for b in static_boxes:
            a, bb, c, phi = box_to_ellipsoid(np.asarray(b.half_extents) + margin, b.yaw)
            axes.append((a, bb, c))
            yaws.append(phi)
        out.static_axes = np.array(axes)
        out.static_yaw = np.array(yaws)
    if predictions:
        taus = np.arange(n_steps + 1) * dt
        centers = np.empty((n_steps + 1, len(predictions), 3))
        axes = np.empty((n_steps + 1, len(predictions), 3))
        for j, pred in enumerate(predictions):
            pos, risk = resample_prediction(pred.positions, pred.risk_sizes, pred_dt, taus)
            centers[:, j, :] = pos
            axes[:, j, :] = np.sqrt(3.0) * (risk + margin)
        out.dyn_centers = centers
        out.dyn_axes = axes
    else:
        out.dyn_centers = np.empty((n_steps + 1, 0, 3))
        out.dyn_axes = np.empty((n_steps + 1, 0, 3))
    return out


def resample_prediction(positions: np.ndarray, risk_sizes: np.ndarray,
                        pred_dt: float, taus: np.ndarray):
    """Resample a prediction (samples at pred_dt, 2*pred_dt, ...) onto
    arbitrary times. Before the first sample the current values hold; past
    the last, position holds and risk extends at its final growth rate."""
    n = len(positions)
    times = (np.arange(n) + 1) * pred_dt
    pos = np.empty((len(taus), 3))
    risk = np.empty((len(taus), 3))
    for axis in range(3):
        pos[:, axis] = np.interp(taus, times, positions[:, axis])
        risk[:, axis] = np.interp(taus, times, risk_sizes[:, axis])
    if n >= 2:
        rate = np.maximum(risk_sizes[-1] - risk_sizes[-2], 0.0) / pred_dt
    else:
        rate = np.zeros(3)
    beyond = taus > times[-1]
    if beyond.any():
        extra = (taus[beyond] - times[-1])[:, None] * rate[None, :]
        risk[beyond] = risk_sizes[-1][None, :] + extra
    return pos, risk
