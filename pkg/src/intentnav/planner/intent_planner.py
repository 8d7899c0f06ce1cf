"""Intent-combination planning: one MPC solve per hypothesis, best score wins.

Each cycle enumerates the most probable joint intent assignments over the
nearby dynamic obstacles (probability = product of per-obstacle intent
probabilities), solves one MPC per combination against that combination's
predicted obstacle trajectories, scores every solve, and returns the
feasible result with the highest probability-weighted score. When every
combination is infeasible the planner degrades to a braking trajectory.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ..intent.inference import INTENTS
from ..intent.prediction import IntentPrediction, predict_trajectories
from ..params import EngineParams
from ..perception.static_map import OccupancyGrid, cluster_static_obstacles
from ..perception.tracker import Track, classify_dynamic
from .collision import build_constraints, resample_prediction
from .mpc import PlanResult, ReferenceTrajectory, braking_trajectory, solve_mpc
from .scoring import consistency_score, detour_score, safety_score, shift_previous_plan


def top_intent_combinations(dists: list, n_ic: int) -> list[tuple[tuple[int, ...], float]]:
    """The n_ic most probable joint intent assignments, one intent per
    obstacle. Sorted by probability descending; exact ties resolve toward
    the lexicographically smaller intent index tuple. With zero obstacles
    the single empty combination has probability 1.
    """
    if n_ic < 1:
        raise ValueError(f"n_ic must be >= 1, got {n_ic}")
    if not dists:
        return [((), 1.0)]
    ranked = []  # per obstacle: intent indices sorted by descending probability
    for dist in dists:
        p = np.asarray(dist, dtype=float)
        order = sorted(range(len(p)), key=lambda i: (-p[i], i))
        ranked.append([(i, float(p[i])) for i in order])

    def assemble(ranks):
        prob = 1.0
        intents = []
        for obs, r in zip(ranked, ranks):
            idx, p = obs[r]
            prob *= p
            intents.append(idx)
        return prob, tuple(intents)

    start = tuple([0] * len(ranked))
    prob, intents = assemble(start)
    heap = [(-prob, intents, start)]
    seen = {start}
    out = []
    while heap and len(out) < n_ic:
        neg, intents, ranks = heapq.heappop(heap)
        out.append((intents, -neg))
        for i in range(len(ranks)):
            if ranks[i] + 1 < len(ranked[i]):
                nxt = ranks[:i] + (ranks[i] + 1,) + ranks[i + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    p, ids = assemble(nxt)
                    heapq.heappush(heap, (-p, ids, nxt))
    return out


@dataclass
class PlanDebug:
    """Per-combination records for tracing."""
    combinations: list = field(default_factory=list)
    selected_index: int = -1
    static_boxes: list = field(default_factory=list)
    predictions: dict = field(default_factory=dict)


class IntentPlanner:
    """Receding-horizon planner; owns warm start and previous-plan state."""

    def __init__(self, params: EngineParams):
        self.params = params
        self._warm: np.ndarray | None = None
        self._prev_positions: np.ndarray | None = None
        self._prev_tick: int = 0
        self._cluster_cache: tuple[np.ndarray, list] | None = None

    def reset(self) -> None:
        self._warm = None
        self._prev_positions = None
        self._cluster_cache = None

    def plan(self, robot_p, robot_v, ref: ReferenceTrajectory, tracks: list[Track],
             grid: OccupancyGrid | None, intent_of, tick: int = 0,
             variant: str = "full", heading_hints=None) -> tuple[PlanResult, PlanDebug]:
        """One planning cycle.

        `intent_of(track_id) -> (4,) distribution`; `heading_hints` maps
        track id to a fallback heading for slow obstacles. `variant` is one
        of full | no-pred | no-safety | reactive.
        """
        if ref is None:
            raise ValueError("planner needs a reference trajectory")
        prm = self.params.planner
        mpc = self.params.mpc
        weights = self.params.score
        debug = PlanDebug()

        static_boxes = self._local_static(grid, robot_p)
        debug.static_boxes = static_boxes

        robot_p = np.asarray(robot_p, dtype=float)
        near: list[Track] = []
        passive: list[Track] = []
        for tr in tracks:
            if float(np.linalg.norm(tr.position[:2] - robot_p[:2])) > prm.risk_radius:
                continue
            if classify_dynamic(tr, self.params.tracker):
                near.append(tr)
            else:
                passive.append(tr)

        predictive = variant in ("full", "no-safety")
        hold_all = not predictive
        if variant == "reactive":
            combos = [((0,) * len(near), 1.0)] if near else [((), 1.0)]
        else:
            combos = top_intent_combinations([intent_of(tr.id) for tr in near], prm.n_ic)
            if hold_all and combos:
                combos = combos[:1]  # identical constraints per combination: one solve suffices

        all_preds: dict[int, list[IntentPrediction]] = {}
        if predictive:
            hints = heading_hints or {}
            for tr in near:
                all_preds[tr.id] = predict_trajectories(tr, static_boxes, self.params.intent,
                                                        heading_hint=hints.get(tr.id))
            debug.predictions = all_preds

        passive_preds = [_hold_prediction(tr, self.params.intent) for tr in passive]

        def predictions_for(intents: tuple[int, ...]) -> list[IntentPrediction]:
            if predictive:
                picked = [all_preds[tr.id][idx] for tr, idx in zip(near, intents)]
            else:
                picked = [_hold_prediction(tr, self.params.intent) for tr in near]
            return picked + passive_preds

        # safety distances are measured under the most likely combination
        top_preds = predictions_for(combos[0][0]) if combos else []
        safety_dyn = _predicted_centers(top_preds, mpc.n, mpc.dt, self.params.intent.pred_dt)
        static_centers = (np.array([b.center for b in static_boxes], dtype=float)
                          if static_boxes else np.empty((0, 3)))

        warm = self._shifted_warm(tick, mpc.n)
        prev_traj = None
        if self._prev_positions is not None:
            prev_traj = shift_previous_plan(self._prev_positions, max(tick - self._prev_tick, 0))

        lambda3 = 0.0 if variant == "no-safety" else weights.lambda3
        best: PlanResult | None = None
        best_key = None
        results = []
        for ci, (intents, prob) in enumerate(combos):
            cons_set = build_constraints(static_boxes, predictions_for(intents), mpc.n, mpc.dt,
                                         self.params.intent.pred_dt, margin=prm.obstacle_margin)
            result = solve_mpc(robot_p, robot_v, ref, cons_set, mpc, warm_start=warm)
            cons = consistency_score(result.positions, prev_traj, weights.cap)
            detour = detour_score(result.positions, ref.positions, weights.cap)
            safety = safety_score(result.positions, static_centers, safety_dyn, weights.cap)
            result.score_breakdown = {"consistency": cons, "detour": detour, "safety": safety}
            result.raw_score = weights.lambda1 * cons + weights.lambda2 * detour + lambda3 * safety
            result.combination_prob = prob
            result.final_score = prob * result.raw_score
            results.append((intents, result))
            if result.feasible:
                key = (result.final_score, result.combination_prob, -ci)
                if best_key is None or key > best_key:
                    best, best_key = result, key
                    debug.selected_index = ci
        debug.combinations = [
            {"intents": [INTENTS[i] for i in intents], "prob": r.combination_prob,
             "feasible": r.feasible, "scores": r.score_breakdown,
             "raw_score": r.raw_score, "final_score": r.final_score}
            for intents, r in results
        ]

        if best is None:
            best = braking_trajectory(robot_p, robot_v, mpc)
            debug.selected_index = -1

        self._warm = best.controls.copy()
        self._prev_positions = best.positions.copy()
        self._prev_tick = tick
        return best, debug

    def _shifted_warm(self, tick: int, n: int) -> np.ndarray | None:
        if self._warm is None:
            return None
        shift = max(tick - self._prev_tick, 0)
        if shift >= n:
            return None
        warm = np.zeros_like(self._warm)
        warm[: n - shift] = self._warm[shift:]
        return warm

    def _local_static(self, grid: OccupancyGrid | None, robot_p) -> list:
        if grid is None or len(grid.occupied) == 0:
            return []
        prm = self.params.planner
        robot_xy = np.asarray(robot_p, dtype=float)[:2]
        if self._cluster_cache is not None:
            anchor, boxes = self._cluster_cache
            if float(np.linalg.norm(robot_xy - anchor)) <= prm.recluster_distance:
                return boxes
        boxes = cluster_static_obstacles(grid, robot_p, self.params.cluster,
                                         local_radius=prm.static_local_radius)
        self._cluster_cache = (robot_xy.copy(), boxes)
        return boxes


def _hold_prediction(track: Track, intent_params) -> IntentPrediction:
    """Current-position-hold constraint: no motion, risk size frozen."""
    n = intent_params.n_pred
    positions = np.tile(np.asarray(track.position, dtype=float), (n, 1))
    risk = np.tile(np.asarray(track.risk_size, dtype=float), (n, 1))
    return IntentPrediction("hold", positions, risk)


def _predicted_centers(predictions: list[IntentPrediction], n: int, dt: float, pred_dt: float) -> np.ndarray:
    """Predicted obstacle centers resampled on the MPC grid: (N+1, D, 3)."""
    if not predictions:
        return np.empty((n + 1, 0, 3))
    taus = np.arange(n + 1) * dt
    out = np.empty((n + 1, len(predictions), 3))
    for j, pred in enumerate(predictions):
        pos, _ = resample_prediction(pred.positions, pred.risk_sizes, pred_dt, taus)
        out[:, j, :] = pos
    return out
