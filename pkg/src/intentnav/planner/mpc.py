"""Single-shooting MPC over the discrete double integrator.

Decision variables are the N acceleration controls; states come from the
exact dynamics recursion, so the initial-state and dynamics constraints hold
by construction. Control bounds are enforced by projection, obstacle
constraints by an exterior quadratic penalty whose weight escalates across
outer iterations; feasibility is re-checked from the raw residuals after
convergence. The inner minimizer is projected gradient descent with a
backtracking line search. Everything is deterministic given the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..params import MpcParams
from .collision import ObstacleConstraintSet


@dataclass
class ReferenceTrajectory:
    positions: np.ndarray      # (N+1, 3)
    velocities: np.ndarray     # (N+1, 3)

    def __len__(self) -> int:
        return len(self.positions)


@dataclass
class PlanResult:
    positions: np.ndarray      # (N+1, 3)
    velocities: np.ndarray     # (N+1, 3)
    controls: np.ndarray       # (N, 3)
    feasible: bool
    objective: float
    min_residual: float
    raw_score: float = 0.0
    final_score: float = 0.0
    combination_prob: float = 1.0
    score_breakdown: dict = field(default_factory=dict)

    @property
    def first_control(self) -> np.ndarray:
        return self.controls[0]


@dataclass
class _Sensitivity:
    """Linear maps from the control stack to positions/velocities."""
    pos: np.ndarray
    vel: np.ndarray
    lipschitz: float


_SENS_CACHE: dict = {}


def _sensitivity(n: int, dt: float) -> _Sensitivity:
    key = (n, dt)
    if key not in _SENS_CACHE:
        k = np.arange(n + 1)[:, None]
        j = np.arange(n)[None, :]
        pos = np.where(j < k, dt * dt * (k - j - 0.5), 0.0)
        vel = np.where(j < k, dt, 0.0)
        lip = 2.0 * (np.linalg.norm(pos, 2) ** 2 + np.linalg.norm(vel, 2) ** 2)
        _SENS_CACHE[key] = _Sensitivity(pos, vel, lip)
    return _SENS_CACHE[key]


def rollout_states(p0, v0, controls: np.ndarray, dt: float):
    """Exact double-integrator recursion; returns ((N+1,3) pos, (N+1,3) vel)."""
    n = len(controls)
    pos = np.empty((n + 1, 3))
    vel = np.empty((n + 1, 3))
    pos[0], vel[0] = p0, v0
    for k in range(n):
        pos[k + 1] = pos[k] + dt * vel[k] + 0.5 * dt * dt * controls[k]
        vel[k + 1] = vel[k] + dt * controls[k]
    return pos, vel


def braking_trajectory(p0, v0, params: MpcParams) -> PlanResult:
    """Maximal deceleration to rest within the control bounds."""
    n, dt = params.n, params.dt
    controls = np.zeros((n, 3))
    v = np.asarray(v0, dtype=float).copy()
    for k in range(n):
        controls[k] = np.clip(-v / dt, params.u_min, params.u_max)
        v = v + dt * controls[k]
    pos, vel = rollout_states(p0, v0, controls, dt)
    return PlanResult(pos, vel, controls, feasible=False, objective=float("inf"), min_residual=float("-inf"))


def solve_mpc(p0, v0, ref: ReferenceTrajectory, obstacles: ObstacleConstraintSet,
              params: MpcParams, warm_start: np.ndarray | None = None) -> PlanResult:
    """Track the reference with least control effort while staying outside
    every obstacle ellipsoid. On a non-finite objective the solver aborts
    into a braking result flagged infeasible."""
    n, dt = params.n, params.dt
    if len(ref) != n + 1:
        raise ValueError(f"reference length {len(ref)} != horizon + 1 ({n + 1})")
    sens = _sensitivity(n, dt)
    p0 = np.asarray(p0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    free_pos = p0[None, :] + np.arange(n + 1)[:, None] * dt * v0[None, :]
    free_vel = np.tile(v0, (n + 1, 1))

    u = np.zeros((n, 3)) if warm_start is None else np.clip(warm_start, params.u_min, params.u_max)

    def states(ctrl):
        return free_pos + sens.pos @ ctrl, free_vel + sens.vel @ ctrl

    def objective_and_grad(ctrl, mu):
        pos, vel = states(ctrl)
        dp = pos - ref.positions
        dv = vel - ref.velocities
        f = float((dp * dp).sum() + (dv * dv).sum() + params.lambda_u * (ctrl * ctrl).sum())
        grad = 2.0 * (sens.pos.T @ dp) + 2.0 * (sens.vel.T @ dv) + 2.0 * params.lambda_u * ctrl
        if mu > 0.0 and not obstacles.empty:
            res, res_grad = obstacles.residual_gradients(pos)
            viol = np.maximum(0.0, -res)
            if viol.any():
                f += mu * float((viol * viol).sum())
                d_pos = -(2.0 * mu) * (viol[:, :, None] * res_grad).sum(axis=1)
                grad += sens.pos.T @ d_pos
        return f, grad, pos

    mu = 0.0 if obstacles.empty else params.penalty_init
    step = 1.0 / (sens.lipschitz + 2.0 * params.lambda_u)
    for outer in range(params.max_outer_iters if mu > 0 else 1):
        f, grad, pos = objective_and_grad(u, mu)
        if not np.isfinite(f):
            return braking_trajectory(p0, v0, params)
        for _ in range(params.max_inner_iters):
            trial = step
            improved = False
            for _ in range(30):
                u_new = np.clip(u - trial * grad, params.u_min, params.u_max)
                gap = u - u_new
                if float(np.abs(gap).max()) < 1e-9:
                    break
                f_new, grad_new, pos = objective_and_grad(u_new, mu)
                if not np.isfinite(f_new):
                    return braking_trajectory(p0, v0, params)
                if f_new <= f - 1e-4 * float((grad * gap).sum()):
                    u, f, grad = u_new, f_new, grad_new
                    improved = True
                    step = trial * 1.3
                    break
                trial *= 0.5
            if not improved:
                break
        if mu == 0.0:
            break
        pos, _ = states(u)
        res = obstacles.residuals(pos)
        if res.size == 0 or float(res.min()) >= -params.feas_tol:
            break
        mu *= params.penalty_growth

    pos, vel = states(u)
    res = obstacles.residuals(pos)
    min_res = float(res.min()) if res.size else float("inf")
    f_final = float(((pos - ref.positions) ** 2).sum() + ((vel - ref.velocities) ** 2).sum()
                    + params.lambda_u * float((u * u).sum()))
    return PlanResult(pos, vel, u, feasible=bool(min_res >= -params.feas_tol),
                      objective=f_final, min_residual=min_res)
