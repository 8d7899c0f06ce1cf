"""Constant-acceleration Kalman filter over [pos, vel, accel] per axis.

State ordering is [px py pz vx vy vz ax ay az]; the three axes share one
block-structured 9x9 filter. Updates use the Joseph form and re-symmetrize
so the covariance stays PSD over long runs.
"""

from __future__ import annotations

import numpy as np

_I3 = np.eye(3)


def transition(dt: float) -> np.ndarray:
    f3 = np.array([[1.0, dt, 0.5 * dt * dt],
                   [0.0, 1.0, dt],
                   [0.0, 0.0, 1.0]])
    return np.kron(f3, _I3)


def process_noise(dt: float, sigma_a: float) -> np.ndarray:
    # white acceleration noise driving [pos, vel, accel]
    g3 = np.array([[0.5 * dt * dt], [dt], [1.0]])
    q3 = (g3 @ g3.T) * sigma_a**2
    return np.kron(q3, _I3)


_H = np.hstack([_I3, np.zeros((3, 6))])


def initial_state(pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros(9)
    x[:3] = pos
    cov = np.diag([0.25] * 3 + [4.0] * 3 + [4.0] * 3)
    return x, cov


def kf_predict(x: np.ndarray, cov: np.ndarray, dt: float, sigma_a: float) -> tuple[np.ndarray, np.ndarray]:
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return x.copy(), cov.copy()
    f = transition(dt)
    x2 = f @ x
    cov2 = f @ cov @ f.T + process_noise(dt, sigma_a)
    return x2, 0.5 * (cov2 + cov2.T)


def kf_update(x: np.ndarray, cov: np.ndarray, meas_pos: np.ndarray, sigma_z: float) -> tuple[np.ndarray, np.ndarray]:
    """Position-only update; non-finite measurements must be filtered by the caller."""
    r = np.eye(3) * max(sigma_z, 1e-4) ** 2
    s = _H @ cov @ _H.T + r
    k = cov @ _H.T @ np.linalg.inv(s)
    x2 = x + k @ (np.asarray(meas_pos, dtype=float) - _H @ x)
    ikh = np.eye(9) - k @ _H
    cov2 = ikh @ cov @ ikh.T + k @ r @ k.T
    return x2, 0.5 * (cov2 + cov2.T)
