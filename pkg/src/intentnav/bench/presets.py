"""Seeded scenario generators for the benchmark presets.

Density presets live on a 20m x 20m map and scale the obstacle counts to
desk size so a multi-seed suite finishes in minutes; the ablation targets
are relative orderings between planner variants, not absolute counts.
Dynamic agents are waypoint walkers with randomized goal order, which
produces non-linear paths from piecewise-constant velocities. Placement
never overlaps the robot start.

The prediction-evaluation presets use turning (constant-arc) agents, with
and without static boxes, under an omnidirectional noisy sensor so tracks
persist long enough to score prediction error.
"""

from __future__ import annotations

import numpy as np

from ..sim.scenario import AgentScript, ScenarioError, SensorModel, StaticBox, WorldConfig

# static / dynamic counts per density preset (20m x 20m map)
DENSITY_PRESETS = {
    "low": (2, 10),
    "mid": (8, 16),
    "high": (14, 22),
}

_PLACE_SALT = 0x9D5


def make_density_scenario(density: str, seed: int) -> WorldConfig:
    if density not in DENSITY_PRESETS:
        raise ScenarioError(f"unknown density preset {density!r}; options: {sorted(DENSITY_PRESETS)}")
    n_static, n_dynamic = DENSITY_PRESETS[density]
    rng = np.random.default_rng((seed, _PLACE_SALT))
    extent = ((-10.0, 10.0), (-10.0, 10.0))
    start = np.array([-9.0, 0.0, 1.0])
    goal = np.array([9.0, 0.0, 1.0])

    boxes = []
    while len(boxes) < n_static:
        center = rng.uniform([-7.5, -8.0], [7.5, 8.0])
        half = rng.uniform([0.3, 0.3], [0.8, 0.8])
        yaw = rng.uniform(-np.pi / 2, np.pi / 2)
        if _clear_of(center, max(half), start, 1.5) and _clear_of(center, max(half), goal, 1.5):
            boxes.append(StaticBox(center=np.array([center[0], center[1], 1.0]),
                                   half_extents=np.array([half[0], half[1], 1.0]), yaw=yaw))

    agents = []
    while len(agents) < n_dynamic:
        spawn = rng.uniform([-8.5, -8.5], [8.5, 8.5])
        if not _clear_of(spawn, 0.3, start, 2.0):
            continue
        if any(_point_in(spawn, b) for b in boxes):
            continue
        n_wp = int(rng.integers(3, 6))
        waypoints = [spawn]
        for _ in range(n_wp):
            waypoints.append(rng.uniform([-8.5, -8.5], [8.5, 8.5]))
        speed = float(rng.uniform(0.8, 1.3))
        agents.append(AgentScript(kind="waypointChain", waypoints=waypoints, speed=speed,
                                  true_size=np.array([0.3, 0.3, 0.9])))

    return WorldConfig(
        map_extent=extent,
        robot_start=start,
        robot_goal=goal,
        static_boxes=boxes,
        agents=agents,
        sensor=SensorModel(),
        seed=seed,
        max_ticks=500,
        name=f"{density}-density",
    )


def make_eval_scenario(with_static: bool, seed: int, n_agents: int = 6) -> WorldConfig:
    """Turning agents for displacement-error evaluation; ground truth comes
    from the simulator. The sensor is omnidirectional (mocap-like) but
    keeps Gaussian noise so prediction runs on filtered estimates."""
    rng = np.random.default_rng((seed, _PLACE_SALT, 1))
    extent = ((-10.0, 10.0), (-10.0, 10.0))
    start = np.array([0.0, -9.0, 1.0])

    boxes = []
    if with_static:
        for center in [(-4.0, 0.0), (4.0, 0.0), (0.0, 4.0), (0.0, -4.0),
                       (-4.0, 5.0), (4.0, -5.0), (5.5, 4.5), (-5.5, -4.5)]:
            boxes.append(StaticBox(center=np.array([center[0], center[1], 1.0]),
                                   half_extents=np.array([0.6, 1.6, 1.0]),
                                   yaw=float(rng.uniform(-np.pi / 4, np.pi / 4))))

    agents = []
    while len(agents) < n_agents:
        spawn = rng.uniform([-6.5, -6.5], [6.5, 6.5])
        if any(_point_in(spawn, b, pad=0.5) for b in boxes):
            continue
        toward = rng.uniform([-6.0, -6.0], [6.0, 6.0])
        turn = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 0.6))
        speed = float(rng.uniform(0.7, 1.1))
        agents.append(AgentScript(kind="constantArc", waypoints=[spawn, toward],
                                  speed=speed, turn_rate=turn,
                                  true_size=np.array([0.3, 0.3, 0.9])))

    sensor = SensorModel(fov_half_angle=np.pi, max_range=30.0,
                         pos_noise_sigma=0.05, size_noise_sigma=0.02, detect_prob=0.95)
    return WorldConfig(
        map_extent=extent,
        robot_start=start,
        robot_goal=np.array([0.0, 9.0, 1.0]),
        static_boxes=boxes,
        agents=agents,
        sensor=sensor,
        seed=seed,
        max_ticks=600,
        name=f"eval-{'static' if with_static else 'open'}",
    )


def resolve_scenario(ref: str, seed: int) -> WorldConfig:
    """Resolve `preset:<name>` strings or scenario file paths."""
    from ..sim.scenario import load_scenario

    if ref.startswith("preset:"):
        name = ref.split(":", 1)[1]
        if name in DENSITY_PRESETS:
            return make_density_scenario(name, seed)
        if name == "eval-open":
            return make_eval_scenario(False, seed)
        if name == "eval-static":
            return make_eval_scenario(True, seed)
        raise ScenarioError(f"unknown preset {name!r}")
    cfg = load_scenario(ref)
    cfg.seed = seed
    return cfg


def _clear_of(center, radius: float, point, clearance: float) -> bool:
    return float(np.hypot(center[0] - point[0], center[1] - point[1])) > radius + clearance


def _point_in(p, box: StaticBox, pad: float = 0.3) -> bool:
    from ..geometry import point_in_box

    return point_in_box(np.array([p[0], p[1], box.center[2]]), box.center, box.half_extents,
                        box.yaw, inflate=pad)
