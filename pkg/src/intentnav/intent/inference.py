"""Short-horizon intent inference for tracked obstacles.

Each obstacle carries a probability distribution over four motion intents,
ordered (forward, left, right, stop). The single-step likelihood comes from
the turn angle between the last two displacement vectors and the current
speed; a persistence step then boosts whichever intent dominated the
previous tick, so the distribution integrates evidence over the retained
history instead of reacting to one noisy step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import IntentParams

INTENTS = ("forward", "left", "right", "stop")
FORWARD, LEFT, RIGHT, STOP = range(4)
UNIFORM = np.full(4, 0.25)


@dataclass
class MotionAngle:
    theta: float
    confident: bool


def motion_angle(history, min_disp: float = 1e-6, smooth: bool = False) -> MotionAngle:
    """Signed turn angle between the last two displacement vectors.

    Positive means a left turn. Needs >= 3 history points with nonzero
    planar displacements; otherwise returns 0 with confident=False.
    With `smooth`, the angle is averaged over up to the last 3 steps.
    """
    pts = [np.asarray(p, dtype=float)[:2] for _, p in history]
    if len(pts) < 3:
        return MotionAngle(0.0, False)
    disps = []
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        if np.linalg.norm(d) > min_disp:
            disps.append(d)
    if len(disps) < 2:
        return MotionAngle(0.0, False)
    n_steps = min(3, len(disps) - 1) if smooth else 1
    angles = []
    for i in range(len(disps) - n_steps, len(disps)):
        u, v = disps[i - 1], disps[i]
        angles.append(float(np.arctan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])))
    return MotionAngle(float(np.mean(angles)), True)


def raw_intent_probability(theta: float, speed: float, params: IntentParams) -> np.ndarray:
    """Single-step intent likelihood from turn angle and speed, L1-normalized.

    Unnormalized components, in intent order:
      forward: exp(-alpha * theta^2)       favors straight motion
      left:    beta * (1 + sin(theta))     grows with left turns
      right:   beta * (1 - sin(theta))     grows with right turns
      stop:    1 - tanh(gamma * |v|)       grows as speed vanishes
    """
    raw = np.array([
        np.exp(-params.alpha * theta * theta),
        params.beta * (1.0 + np.sin(theta)),
        params.beta * (1.0 - np.sin(theta)),
        1.0 - np.tanh(params.gamma * abs(speed)),
    ])
    total = raw.sum()
    if total <= 0 or not np.isfinite(total):
        return UNIFORM.copy()
    return raw / total


def intent_posterior(prev: np.ndarray | None, prev_argmax: int | None,
                     raw: np.ndarray, s: float) -> np.ndarray:
    """One persistence step: multiply the previously dominant entry of the
    raw distribution by s and renormalize. At the first step (no previous
    posterior) the prior is uniform and no boost applies, so the posterior
    equals the raw distribution."""
    raw = np.asarray(raw, dtype=float)
    if prev is None or prev_argmax is None:
        return raw / raw.sum()
    boosted = raw.copy()
    boosted[prev_argmax] *= s
    return boosted / boosted.sum()


class IntentEstimator:
    """Per-track intent state advanced once per tick."""

    def __init__(self, params: IntentParams | None = None):
        self.params = params or IntentParams()
        self._state: dict[int, tuple[np.ndarray, int]] = {}

    def update(self, track_id: int, history, speed: float) -> np.ndarray:
        angle = motion_angle(history, smooth=self.params.smooth_motion_angle)
        raw = raw_intent_probability(angle.theta, speed, self.params)
        prev = self._state.get(track_id)
        if prev is None:
            posterior = intent_posterior(None, None, raw, self.params.s)
        else:
            posterior = intent_posterior(prev[0], prev[1], raw, self.params.s)
        self._state[track_id] = (posterior, int(np.argmax(posterior)))
        return posterior

    def distribution(self, track_id: int) -> np.ndarray:
        state = self._state.get(track_id)
        return UNIFORM.copy() if state is None else state[0]

    def prune(self, live_ids) -> None:
        live = set(live_ids)
        self._state = {k: v for k, v in self._state.items() if k in live}
