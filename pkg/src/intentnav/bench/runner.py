"""Closed-loop scenario execution.

One run wires the full stack per tick: virtual sensing, tracking with
lost-view coasting, intent inference, per-intent prediction, and
intent-combination MPC planning; the selected plan's first control drives
the robot. Variants:

  full       — the whole pipeline
  no-pred    — obstacle predictions replaced by current-position holds
  no-safety  — safety score weight zeroed during selection
  reactive   — single MPC against current obstacle positions

Given (scenario, seed, variant) the produced trace is bit-identical across
reruns.
"""

from __future__ import annotations

import time

import numpy as np

from ..intent.inference import INTENTS, IntentEstimator
from ..params import EngineParams, apply_overrides, env_overrides
from ..perception.static_map import rasterize_boxes
from ..perception.tracker import ObstacleTracker, classify_dynamic
from ..planner.intent_planner import IntentPlanner
from ..planner.reference import PathReference
from ..sim.scenario import WorldConfig
from ..sim.sensor import sense_detections, visible
from ..sim.world import WorldState, step_world
from .trace import RunTrace

VARIANTS = ("full", "no-pred", "no-safety", "reactive")


def build_engine(config: WorldConfig, overrides: dict | None = None,
                 use_env: bool = True) -> EngineParams:
    """Engine parameters for a run: defaults, env overrides, then explicit
    overrides. Tracker measurement noise follows the scenario sensor unless
    overridden."""
    merged: dict = {}
    if use_env:
        merged.update(env_overrides())
    if overrides:
        merged.update(overrides)
    engine = apply_overrides(EngineParams(), merged)
    if "tracker.measurement_noise" not in merged:
        engine.tracker.measurement_noise = max(config.sensor.pos_noise_sigma, 0.01)
    return engine


def run_scenario(config: WorldConfig, variant: str = "full", ticks: int | None = None,
                 engine: EngineParams | None = None, overrides: dict | None = None,
                 record: str = "full") -> RunTrace:
    """Run one scenario to the goal or the tick limit; returns the trace."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if engine is None:
        engine = build_engine(config, overrides)
    max_ticks = config.max_ticks if ticks is None else int(ticks)

    world = WorldState(config)
    tracker = ObstacleTracker(engine.tracker)
    estimator = IntentEstimator(engine.intent)
    planner = IntentPlanner(engine)
    path = PathReference(np.vstack([config.robot_start, config.robot_goal]),
                         cruise_speed=min(engine.planner.cruise_speed, config.v_max),
                         slowdown=engine.planner.goal_slowdown)
    grid = rasterize_boxes(config.static_boxes, config.map_extent, config.grid_resolution)

    trace = RunTrace(config=config, seed=config.seed, variant=variant, engine=engine.to_dict())
    heading_hints: dict[int, float] = {}
    dt = config.tick_dt
    reached = False

    for tick in range(max_ticks):
        robot = world.robot
        heading = world.robot_heading

        t0 = time.perf_counter()
        detections, _ = sense_detections(world, robot, heading)
        tracks = tracker.step(
            detections, world.time, dt,
            in_view_fn=lambda pos: visible(world, robot.p, heading, pos))
        t_perception = time.perf_counter() - t0

        t0 = time.perf_counter()
        for tr in tracks:
            estimator.update(tr.id, tr.history, tr.planar_speed)
            if tr.planar_speed >= engine.intent.min_heading_speed:
                heading_hints[tr.id] = float(np.arctan2(tr.velocity[1], tr.velocity[0]))
        estimator.prune([tr.id for tr in tracks])
        live = set(tr.id for tr in tracks)
        heading_hints = {k: v for k, v in heading_hints.items() if k in live}
        t_intent = time.perf_counter() - t0

        ref = path.sample(robot.p, engine.mpc.n, dt)
        t0 = time.perf_counter()
        plan, debug = planner.plan(robot.p, robot.v, ref, tracks, grid,
                                   intent_of=estimator.distribution, tick=tick,
                                   variant=variant, heading_hints=heading_hints)
        t_planning = time.perf_counter() - t0

        command = plan.first_control.copy()
        trace.append(_tick_record(world, detections, tracks, estimator, engine, plan, debug,
                                  command, record,
                                  {"perception": t_perception * 1e3,
                                   "prediction": t_intent * 1e3,
                                   "planning": t_planning * 1e3}))

        world.last_command = command
        step_world(world, dt)
        if float(np.linalg.norm(world.robot.p[:2] - config.robot_goal[:2])) <= config.goal_tolerance:
            reached = True
            break

    trace.outcome = {"reached_goal": reached, "timeout": not reached, "ticks": len(trace.ticks)}
    return trace


def _tick_record(world: WorldState, detections, tracks, estimator: IntentEstimator,
                 plan, debug, command, record: str, timing_ms: dict) -> dict:
    rec = {
        "tick": world.tick,
        "t": world.time,
        "robot": {"p": world.robot.p, "v": world.robot.v, "heading": world.robot_heading},
        "agents": [{"id": a.index, "p": a.pos, "v": a.velocity} for a in world.agents],
        "tracks": [{
            "id": tr.id,
            "p": tr.position,
            "v": tr.velocity,
            "size": tr.size,
            "risk_size": tr.risk_size,
            "in_view": tr.in_view,
            "coast_time": tr.coast_time,
            "dynamic": classify_dynamic(tr, None) if False else tr.planar_speed > 0,  # replaced below
            "intent": estimator.distribution(tr.id),
        } for tr in tracks],
        "candidates": debug.combinations,
        "selected": {
            "index": debug.selected_index,
            "feasible": plan.feasible,
            "first_control": plan.first_control,
            "final_score": plan.final_score,
        },
        "command": command,
        "timing_ms": timing_ms,
    }
    if record == "full":
        rec["detections"] = [{"pos": d.pos, "dim": d.dim, "cloud_len": d.cloud_len,
                              "cloud_std": d.cloud_std} for d in detections]
        rec["selected"]["positions"] = plan.positions
        rec["selected"]["velocities"] = plan.velocities
        rec["selected"]["controls"] = plan.controls
        rec["predictions"] = {
            str(tid): {p.intent: {"positions": p.positions, "risk_sizes": p.risk_sizes}
                       for p in preds}
            for tid, preds in debug.predictions.items()
        }
    return rec
