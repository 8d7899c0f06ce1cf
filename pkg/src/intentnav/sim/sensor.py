"""Noisy, FOV-limited virtual detector standing in for onboard perception.

Emits one detection per agent whose center is inside the planar sensing cone
and within range, gated by a Bernoulli draw. Point-cloud statistics
(cloud_len, cloud_std) are synthesized from apparent size at range so the
8-dim association feature is fully exercised. Draws are reseeded per tick
from (seed, tick), so a detection sequence depends only on the scenario seed
and tick index, never on call history.
"""

from __future__ import annotations

import numpy as np

from ..geometry import wrap_angle
from ..perception.features import Detection
from .world import RobotState, WorldState, _SENSOR_SALT

# synthetic point-cloud density (points per m^2 of frontal area at 1 m)
_CLOUD_DENSITY = 400.0


def visible(world: WorldState, robot_p: np.ndarray, heading: float, agent_pos: np.ndarray) -> bool:
    """FOV-cone plus range test for one obstacle center (planar azimuth only)."""
    sensor = world.config.sensor
    rel = agent_pos[:2] - robot_p[:2]
    rng = float(np.linalg.norm(rel))
    if rng > sensor.max_range:
        return False
    if rng < 1e-9:
        return True
    bearing = np.arctan2(rel[1], rel[0])
    return abs(wrap_angle(bearing - heading)) <= sensor.fov_half_angle


def sense_detections(world: WorldState, robot: RobotState, heading: float) -> tuple[list[Detection], list[int]]:
    """Detections for the current tick plus the source agent index per detection.

    The source indices exist for evaluation bookkeeping only; the tracker
    never sees them.
    """
    sensor = world.config.sensor
    rng = np.random.default_rng((world.config.seed, _SENSOR_SALT, world.tick))
    detections: list[Detection] = []
    sources: list[int] = []
    for agent in world.agents:
        if not visible(world, robot.p, heading, agent.pos):
            continue
        # fixed draw layout per visible agent: gate, pos(3), dim(3), len, std
        gate = rng.random()
        pos_noise = rng.standard_normal(3)
        dim_noise = rng.standard_normal(3)
        len_noise = rng.standard_normal()
        std_noise = rng.standard_normal()
        if gate >= sensor.detect_prob:
            continue
        half = agent.script.true_size
        pos = agent.pos + sensor.pos_noise_sigma * pos_noise
        dim = np.maximum(2.0 * half + sensor.size_noise_sigma * dim_noise, 0.05)
        dist = max(float(np.linalg.norm(agent.pos[:2] - robot.p[:2])), 0.5)
        frontal_area = (2.0 * float(max(half[0], half[1]))) * (2.0 * float(half[2]))
        cloud_len = max(1, int(round(_CLOUD_DENSITY * frontal_area / dist**2 * (1.0 + 0.1 * len_noise))))
        cloud_std = max(0.01, 0.4 * float(np.mean(half)) + 0.5 * sensor.size_noise_sigma * std_noise)
        detections.append(Detection(pos=pos, dim=dim, cloud_len=cloud_len, cloud_std=cloud_std))
        sources.append(agent.index)
    return detections, sources
