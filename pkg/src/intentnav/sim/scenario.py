"""Scenario configuration: schema, validation, JSON loading.

A scenario file is a single JSON object; see ``scenarios/`` for examples.
All distances are meters, angles radians, times seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

AGENT_KINDS = ("waypointChain", "constantArc", "linear")


class ScenarioError(ValueError):
    """Bad scenario config; message carries file/field context."""


@dataclass
class StaticBox:
    center: np.ndarray          # (3,)
    half_extents: np.ndarray    # (3,) strictly positive
    yaw: float = 0.0            # in [-pi/2, pi/2)

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.half_extents = np.asarray(self.half_extents, dtype=float)
        if np.any(self.half_extents <= 0):
            raise ScenarioError(f"static box half_extents must be positive, got {self.half_extents}")
        self.yaw = float((self.yaw + np.pi / 2) % np.pi - np.pi / 2)

    def to_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.center],
            "half_extents": [float(v) for v in self.half_extents],
            "yaw": float(self.yaw),
        }


@dataclass
class AgentScript:
    kind: str                   # waypointChain | constantArc | linear
    waypoints: list             # list of (x, y); first entry is the start
    speed: float = 1.0
    turn_rate: float = 0.0      # rad/s, constantArc only
    true_size: np.ndarray = field(default_factory=lambda: np.array([0.3, 0.3, 0.9]))  # half-extents

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ScenarioError(f"agent kind must be one of {AGENT_KINDS}, got {self.kind!r}")
        if not self.waypoints:
            raise ScenarioError("agent needs at least one waypoint (its start)")
        self.waypoints = [np.array([float(w[0]), float(w[1])]) for w in self.waypoints]
        self.true_size = np.asarray(self.true_size, dtype=float)
        if self.speed < 0:
            raise ScenarioError(f"agent speed must be >= 0, got {self.speed}")
        if self.kind == "constantArc" and self.turn_rate == 0.0:
            raise ScenarioError("constantArc agent needs a nonzero turn_rate")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "waypoints": [[float(w[0]), float(w[1])] for w in self.waypoints],
            "speed": float(self.speed),
            "turn_rate": float(self.turn_rate),
            "true_size": [float(v) for v in self.true_size],
        }


@dataclass
class SensorModel:
    fov_half_angle: float = 0.76   # planar cone half angle [rad]
    max_range: float = 6.0
    pos_noise_sigma: float = 0.05
    size_noise_sigma: float = 0.02
    detect_prob: float = 0.95

    def __post_init__(self):
        if not 0.0 <= self.detect_prob <= 1.0:
            raise ScenarioError(f"detect_prob must be in [0,1], got {self.detect_prob}")
        if self.max_range <= 0:
            raise ScenarioError("sensor max_range must be positive")

    def to_dict(self) -> dict:
        return {
            "fov_half_angle": float(self.fov_half_angle),
            "max_range": float(self.max_range),
            "pos_noise_sigma": float(self.pos_noise_sigma),
            "size_noise_sigma": float(self.size_noise_sigma),
            "detect_prob": float(self.detect_prob),
        }


@dataclass
class WorldConfig:
    map_extent: tuple              # ((xmin, xmax), (ymin, ymax))
    robot_start: np.ndarray        # (3,)
    robot_goal: np.ndarray         # (3,)
    static_boxes: list = field(default_factory=list)
    agents: list = field(default_factory=list)
    sensor: SensorModel = field(default_factory=SensorModel)
    seed: int = 0
    tick_dt: float = 0.1
    v_max: float = 1.5             # per-axis robot speed limit
    robot_radius: float = 0.3      # collision footprint sphere
    goal_tolerance: float = 0.5
    max_ticks: int = 600
    grid_resolution: float = 0.1
    name: str = "scenario"

    def __post_init__(self):
        (xmin, xmax), (ymin, ymax) = self.map_extent
        if not (xmax > xmin and ymax > ymin):
            raise ScenarioError(f"map_extent must be strictly positive, got {self.map_extent}")
        if self.tick_dt <= 0:
            raise ScenarioError(f"tick_dt must be > 0, got {self.tick_dt}")
        self.map_extent = ((float(xmin), float(xmax)), (float(ymin), float(ymax)))
        self.robot_start = np.asarray(self.robot_start, dtype=float)
        self.robot_goal = np.asarray(self.robot_goal, dtype=float)
        for label, p in (("robot_start", self.robot_start), ("robot_goal", self.robot_goal)):
            if not self._inside_xy(p):
                raise ScenarioError(f"{label} {p[:2].tolist()} lies outside map_extent")
        for i, a in enumerate(self.agents):
            if not self._inside_xy(np.array([a.waypoints[0][0], a.waypoints[0][1], 0.0])):
                raise ScenarioError(f"agents[{i}] start {a.waypoints[0].tolist()} lies outside map_extent")

    def _inside_xy(self, p) -> bool:
        (xmin, xmax), (ymin, ymax) = self.map_extent
        return xmin <= p[0] <= xmax and ymin <= p[1] <= ymax

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "map_extent": {"x": list(self.map_extent[0]), "y": list(self.map_extent[1])},
            "robot_start": [float(v) for v in self.robot_start],
            "robot_goal": [float(v) for v in self.robot_goal],
            "static_boxes": [b.to_dict() for b in self.static_boxes],
            "agents": [a.to_dict() for a in self.agents],
            "sensor": self.sensor.to_dict(),
            "seed": int(self.seed),
            "tick_dt": float(self.tick_dt),
            "v_max": float(self.v_max),
            "robot_radius": float(self.robot_radius),
            "goal_tolerance": float(self.goal_tolerance),
            "max_ticks": int(self.max_ticks),
            "grid_resolution": float(self.grid_resolution),
        }


def config_from_dict(obj: dict, name: str = "scenario") -> WorldConfig:
    """Build a WorldConfig from a parsed JSON object, with contextual errors."""
    def need(key):
        if key not in obj:
            raise ScenarioError(f"{name}: missing required field {key!r}")
        return obj[key]

    try:
        extent = need("map_extent")
        if isinstance(extent, dict):
            map_extent = (tuple(extent["x"]), tuple(extent["y"]))
        else:
            map_extent = (tuple(extent[0]), tuple(extent[1]))
        boxes = [StaticBox(**b) for b in obj.get("static_boxes", [])]
        agents = [AgentScript(**a) for a in obj.get("agents", [])]
        sensor = SensorModel(**obj.get("sensor", {}))
        return WorldConfig(
            map_extent=map_extent,
            robot_start=need("robot_start"),
            robot_goal=need("robot_goal"),
            static_boxes=boxes,
            agents=agents,
            sensor=sensor,
            seed=int(obj.get("seed", 0)),
            tick_dt=float(obj.get("tick_dt", 0.1)),
            v_max=float(obj.get("v_max", 1.5)),
            robot_radius=float(obj.get("robot_radius", 0.3)),
            goal_tolerance=float(obj.get("goal_tolerance", 0.5)),
            max_ticks=int(obj.get("max_ticks", 600)),
            grid_resolution=float(obj.get("grid_resolution", 0.1)),
            name=str(obj.get("name", name)),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{name}: {exc}") from exc


def load_scenario(path) -> WorldConfig:
    """Load a scenario JSON file; parse errors carry line/column context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ScenarioError(f"{path}: top-level value must be a JSON object")
    cfg = config_from_dict(obj, name=str(path))
    if "name" not in obj:
        cfg.name = path.stem
    return cfg
