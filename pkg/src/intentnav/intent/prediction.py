"""Per-intent trajectory forecasting for tracked obstacles.

For every intent a family of constant-control rollouts is sampled and
reduced to a mean trajectory with risk sizes inflated by the sample spread:

  stop          — hold position; risk grows with capped speed and elapsed time
  forward       — linear accelerations spanning a range around the current one
  left / right  — a (linear x angular) acceleration grid, turn sign per intent

Rollouts integrate a planar unicycle under constant linear and angular
acceleration and stop early at static boxes (the position holds from the
step before the hit). Predictions are produced for all four intents no
matter how the intent probabilities look.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import points_in_any_box
from ..params import IntentParams
from .inference import FORWARD, INTENTS, LEFT, RIGHT, STOP


@dataclass
class ControlSample:
    lin_acc: float
    ang_acc: float


@dataclass
class IntentPrediction:
    intent: str
    positions: np.ndarray        # (n_pred, 3)
    risk_sizes: np.ndarray       # (n_pred, 3) half-extents >= base size
    confident: bool = True


def linear_control_set(a: float, params: IntentParams) -> list[ControlSample]:
    """Evenly spaced linear accelerations around the current one, no turning."""
    lin = np.linspace(a + params.lin_acc_min, a + params.lin_acc_max, params.samples_per_intent)
    return [ControlSample(float(l), 0.0) for l in lin]


def turning_control_set(a: float, intent: int, params: IntentParams) -> list[ControlSample]:
    """(linear x angular) acceleration grid; left turns positive, right negative."""
    if intent not in (LEFT, RIGHT):
        raise ValueError(f"turning control set needs a turning intent, got {intent}")
    sign = 1.0 if intent == LEFT else -1.0
    lin = np.linspace(a + params.lin_acc_min, a + params.lin_acc_max, params.samples_per_intent)
    ang = sign * np.linspace(params.ang_acc_min, params.ang_acc_max, params.samples_per_intent)
    return [ControlSample(float(l), float(w)) for l in lin for w in ang]


def propagate_const_control(p, v, heading: float, control: ControlSample,
                            n_pred: int, pred_dt: float, static_boxes=()) -> np.ndarray:
    """Planar unicycle rollout under one constant control.

    Speed is clamped at >= 0; z stays fixed. If a step would enter a static
    box the rollout truncates there and holds the last free position.
    Returns (n_pred, 3) positions at t + pred_dt, ..., t + n_pred*pred_dt.
    """
    p = np.asarray(p, dtype=float)
    speed = float(np.hypot(v[0], v[1]))
    psi = float(heading)
    omega = 0.0
    out = np.empty((n_pred, 3))
    cur = p.copy()
    blocked = False
    for n in range(n_pred):
        if not blocked:
            omega += control.ang_acc * pred_dt
            psi += omega * pred_dt
            speed = max(0.0, speed + control.lin_acc * pred_dt)
            nxt = cur.copy()
            nxt[0] += speed * np.cos(psi) * pred_dt
            nxt[1] += speed * np.sin(psi) * pred_dt
            if static_boxes and bool(points_in_any_box(nxt[None, :], static_boxes)[0]):
                blocked = True
            else:
                cur = nxt
        out[n] = cur
    return out


def _rollout_batch(p, v, heading, controls, n_pred, pred_dt, static_boxes):
    """Vectorized version of propagate_const_control over a control set.
    Returns (n_samples, n_pred, 3)."""
    m = len(controls)
    lin = np.array([c.lin_acc for c in controls])
    ang = np.array([c.ang_acc for c in controls])
    speed = np.full(m, float(np.hypot(v[0], v[1])))
    psi = np.full(m, float(heading))
    omega = np.zeros(m)
    cur = np.tile(np.asarray(p, dtype=float), (m, 1))
    free = np.ones(m, dtype=bool)
    out = np.empty((m, n_pred, 3))
    for n in range(n_pred):
        omega = omega + np.where(free, ang * pred_dt, 0.0)
        psi = psi + np.where(free, omega * pred_dt, 0.0)
        speed = np.where(free, np.maximum(0.0, speed + lin * pred_dt), speed)
        nxt = cur.copy()
        nxt[:, 0] += np.where(free, speed * np.cos(psi) * pred_dt, 0.0)
        nxt[:, 1] += np.where(free, speed * np.sin(psi) * pred_dt, 0.0)
        if static_boxes:
            hits = points_in_any_box(nxt, static_boxes) & free
            free = free & ~hits
            nxt[hits] = cur[hits]  # hold the position from the step before the hit
        cur = nxt
        out[:, n, :] = cur
    return out


def predict_trajectories(track, static_boxes, params: IntentParams,
                         heading_hint: float | None = None) -> list[IntentPrediction]:
    """All-intent predictions for one track (see module docstring).

    `track` needs position, velocity, accel, risk_size and history. Falls
    back to stop-style predictions for every intent, flagged unconfident,
    when the history is too short to trust a heading.
    """
    pos = np.asarray(track.position, dtype=float)
    vel = np.asarray(track.velocity, dtype=float)
    acc = np.asarray(track.accel, dtype=float)
    base = np.asarray(track.risk_size, dtype=float)
    speed = float(np.hypot(vel[0], vel[1]))

    if speed >= params.min_heading_speed:
        heading = float(np.arctan2(vel[1], vel[0]))
    elif heading_hint is not None:
        heading = float(heading_hint)
    else:
        heading = 0.0

    confident = len(track.history) >= 2 and (speed >= params.min_heading_speed or heading_hint is not None)
    stop_pred = _stop_prediction(pos, speed, base, params)
    if not confident:
        return [IntentPrediction(name, stop_pred.positions.copy(), stop_pred.risk_sizes.copy(), False)
                for name in INTENTS]

    a_lin = float(acc[0] * np.cos(heading) + acc[1] * np.sin(heading))
    preds: list[IntentPrediction] = []
    for idx, name in enumerate(INTENTS):
        if idx == STOP:
            preds.append(stop_pred)
            continue
        if idx == FORWARD:
            controls = linear_control_set(a_lin, params)
        else:
            controls = turning_control_set(a_lin, idx, params)
        rollouts = _rollout_batch(pos, vel, heading, controls, params.n_pred, params.pred_dt, static_boxes)
        mean = rollouts.mean(axis=0)
        std = rollouts.std(axis=0)
        if static_boxes and bool(points_in_any_box(mean, static_boxes).any()):
            # mean cuts a corner: fall back to the sampled rollout nearest the mean
            dists = np.linalg.norm(rollouts - mean[None], axis=2).mean(axis=1)
            mean = rollouts[int(np.argmin(dists))]
        risk = params.lambda_inflate * std + base[None, :]
        preds.append(IntentPrediction(name, mean, risk))
    return preds


def _stop_prediction(pos, speed, base, params: IntentParams) -> IntentPrediction:
    n = params.n_pred
    positions = np.tile(pos, (n, 1))
    growth = params.pred_dt * min(speed, params.v_thresh)
    risk = base[None, :] + growth * np.arange(n, dtype=float)[:, None]
    return IntentPrediction("stop", positions, risk)
