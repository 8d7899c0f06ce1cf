"""Deterministic 2.5D world: scripted agents plus a point-mass robot.

The robot follows the discrete double-integrator

    p_k = p_{k-1} + dt * v_{k-1} + dt^2/2 * a_{k-1}
    v_k = v_{k-1} + dt * a_{k-1}

with per-axis speed clamping. Agents move in the xy plane per their script
and never pass through static boxes or the map boundary (a blocked move is
dropped for that tick). All randomness (waypoint shuffling) is drawn from
per-agent streams derived from the scenario seed, so traces are
reproducible bit for bit.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..geometry import point_in_box, wrap_angle
from .scenario import AgentScript, WorldConfig

WAYPOINT_REACHED = 0.15

# rng stream salts: one per subsystem so toggling noise in one leaves the others intact
_AGENT_SALT = 0xA6E17
_SENSOR_SALT = 0x5E15


@dataclass
class RobotState:
    p: np.ndarray               # (3,) position
    v: np.ndarray               # (3,) velocity

    def copy(self) -> "RobotState":
        return RobotState(self.p.copy(), self.v.copy())


def step_robot(state: RobotState, accel: np.ndarray, dt: float, v_max: float) -> RobotState:
    accel = np.asarray(accel, dtype=float)
    p = state.p + dt * state.v + 0.5 * dt * dt * accel
    v = np.clip(state.v + dt * accel, -v_max, v_max)
    return RobotState(p, v)


@dataclass
class AgentState:
    index: int
    script: AgentScript
    pos: np.ndarray             # (3,) center; z fixed at half height
    heading: float
    target_idx: int             # waypointChain: current waypoint target
    rng: np.random.Generator
    arc_center: np.ndarray | None = None
    blocked: bool = False
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def copy(self) -> "AgentState":
        return AgentState(
            index=self.index,
            script=self.script,
            pos=self.pos.copy(),
            heading=self.heading,
            target_idx=self.target_idx,
            rng=copy.deepcopy(self.rng),
            arc_center=None if self.arc_center is None else self.arc_center.copy(),
            blocked=self.blocked,
            velocity=self.velocity.copy(),
        )


class WorldState:
    """Value-semantics world snapshot; `copy()` yields an independent clone."""

    def __init__(self, config: WorldConfig):
        self.config = config
        self.tick = 0
        self.robot = RobotState(config.robot_start.copy(), np.zeros(3))
        goal_dir = config.robot_goal[:2] - config.robot_start[:2]
        self.robot_heading = float(np.arctan2(goal_dir[1], goal_dir[0])) if np.linalg.norm(goal_dir) > 1e-9 else 0.0
        self.last_command = np.zeros(3)
        self.agents = [_init_agent(i, a, config) for i, a in enumerate(config.agents)]

    def copy(self) -> "WorldState":
        clone = object.__new__(WorldState)
        clone.config = self.config
        clone.tick = self.tick
        clone.robot = self.robot.copy()
        clone.robot_heading = self.robot_heading
        clone.last_command = self.last_command.copy()
        clone.agents = [a.copy() for a in self.agents]
        return clone

    @property
    def time(self) -> float:
        return self.tick * self.config.tick_dt


def _init_agent(index: int, script: AgentScript, config: WorldConfig) -> AgentState:
    start = script.waypoints[0]
    z = float(script.true_size[2])
    pos = np.array([start[0], start[1], z])
    if len(script.waypoints) > 1:
        d = script.waypoints[1] - start
        heading = float(np.arctan2(d[1], d[0]))
    else:
        heading = 0.0
    rng = np.random.default_rng((config.seed, _AGENT_SALT, index))
    state = AgentState(index=index, script=script, pos=pos, heading=heading,
                       target_idx=min(1, len(script.waypoints) - 1), rng=rng)
    if script.kind == "constantArc":
        # circle center perpendicular-left of the heading for positive turn rate
        radius = script.speed / script.turn_rate
        state.arc_center = np.array([
            pos[0] - radius * np.sin(heading),
            pos[1] + radius * np.cos(heading),
        ])
    _refresh_velocity(state, config.tick_dt, pos)
    return state


def step_world(world: WorldState, dt: float) -> WorldState:
    """Advance every agent per its script and the robot per the commanded accel."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    cfg = world.config
    for agent in world.agents:
        _step_agent(agent, dt, cfg)
    world.robot = step_robot(world.robot, world.last_command, dt, cfg.v_max)
    speed = float(np.linalg.norm(world.robot.v[:2]))
    if speed > 0.05:
        world.robot_heading = float(np.arctan2(world.robot.v[1], world.robot.v[0]))
    world.tick += 1
    return world


def _step_agent(agent: AgentState, dt: float, cfg: WorldConfig) -> None:
    script = agent.script
    old = agent.pos.copy()
    if script.kind == "linear":
        _step_linear(agent, dt)
    elif script.kind == "constantArc":
        _step_arc(agent, dt)
    else:
        _step_waypoints(agent, dt)
    _clamp_to_map(agent, cfg)
    agent.blocked = False
    if _agent_hits_static(agent, cfg):
        # blocked: stay put for this tick, retarget if waypoint-driven
        agent.pos[:2] = old[:2]
        agent.blocked = True
        if script.kind == "waypointChain" and len(script.waypoints) > 1:
            agent.target_idx = _next_waypoint(agent)
    _refresh_velocity(agent, dt, old)


def _step_linear(agent: AgentState, dt: float) -> None:
    step = agent.script.speed * dt
    agent.pos[0] += step * np.cos(agent.heading)
    agent.pos[1] += step * np.sin(agent.heading)


def _step_arc(agent: AgentState, dt: float) -> None:
    # exact circular integration: rotate about the arc center
    w = agent.script.turn_rate
    dth = w * dt
    c, s = np.cos(dth), np.sin(dth)
    rel = agent.pos[:2] - agent.arc_center
    agent.pos[0] = agent.arc_center[0] + c * rel[0] - s * rel[1]
    agent.pos[1] = agent.arc_center[1] + s * rel[0] + c * rel[1]
    agent.heading = wrap_angle(agent.heading + dth)


def _step_waypoints(agent: AgentState, dt: float) -> None:
    script = agent.script
    if len(script.waypoints) < 2 or script.speed <= 0:
        return
    target = script.waypoints[agent.target_idx]
    to_go = target - agent.pos[:2]
    dist = float(np.linalg.norm(to_go))
    if dist < WAYPOINT_REACHED:
        agent.target_idx = _next_waypoint(agent)
        target = script.waypoints[agent.target_idx]
        to_go = target - agent.pos[:2]
        dist = float(np.linalg.norm(to_go))
        if dist < 1e-9:
            return
    step = min(script.speed * dt, dist)
    direction = to_go / max(dist, 1e-12)
    agent.pos[:2] += step * direction
    agent.heading = float(np.arctan2(direction[1], direction[0]))


def _next_waypoint(agent: AgentState) -> int:
    """Shifting-goal behaviour: pick a random waypoint other than the current one."""
    n = len(agent.script.waypoints)
    if n <= 1:
        return 0
    if n == 2:
        return 1 - agent.target_idx
    choices = [i for i in range(n) if i != agent.target_idx]
    return int(choices[agent.rng.integers(len(choices))])


def _clamp_to_map(agent: AgentState, cfg: WorldConfig) -> None:
    (xmin, xmax), (ymin, ymax) = cfg.map_extent
    agent.pos[0] = min(max(agent.pos[0], xmin), xmax)
    agent.pos[1] = min(max(agent.pos[1], ymin), ymax)


def _agent_hits_static(agent: AgentState, cfg: WorldConfig) -> bool:
    pad = float(max(agent.script.true_size[:2]))
    for box in cfg.static_boxes:
        if point_in_box(agent.pos, box.center, box.half_extents, box.yaw, inflate=pad):
            return True
    return False


def _refresh_velocity(agent: AgentState, dt: float, old_pos: np.ndarray) -> None:
    agent.velocity = (agent.pos - old_pos) / dt if dt > 0 else np.zeros(3)


def rollout_agent(agent: AgentState, cfg: WorldConfig, steps: int, dt: float) -> np.ndarray:
    """Ground-truth future of one agent: clone it (rng included) and step alone.

    Returns (steps, 3) positions at t + dt, ..., t + steps*dt.
    """
    clone = agent.copy()
    out = np.empty((steps, 3))
    for i in range(steps):
        _step_agent(clone, dt, cfg)
        out[i] = clone.pos
    return out
