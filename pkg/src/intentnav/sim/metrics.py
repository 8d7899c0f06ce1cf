"""Collision counting on recorded traces.

A collision is one contiguous episode of the robot center penetrating any
true obstacle volume (static box or agent box) inflated by the robot radius;
its duration does not multiply the count.
"""

from __future__ import annotations

import numpy as np

from ..geometry import point_in_box


def tick_in_collision(robot_p, static_boxes, agent_entries, robot_radius: float) -> bool:
    """Penetration test for one tick. `agent_entries` is a list of
    (position, half_extents) pairs; agent boxes are axis-aligned."""
    p = np.asarray(robot_p, dtype=float)
    for box in static_boxes:
        if point_in_box(p, box.center, box.half_extents, box.yaw, inflate=robot_radius):
            return True
    for pos, half in agent_entries:
        if point_in_box(p, pos, half, 0.0, inflate=robot_radius):
            return True
    return False


def collision_events(trace, robot_radius: float | None = None) -> int:
    """Number of contiguous penetration episodes in a RunTrace."""
    cfg = trace.config
    radius = cfg.robot_radius if robot_radius is None else robot_radius
    halves = [a.true_size for a in cfg.agents]
    count = 0
    inside_prev = False
    for rec in trace.ticks:
        robot_p = rec["robot"]["p"]
        agent_entries = [(np.asarray(a["p"], dtype=float), halves[a["id"]]) for a in rec["agents"]]
        inside = tick_in_collision(robot_p, cfg.static_boxes, agent_entries, radius)
        if inside and not inside_prev:
            count += 1
        inside_prev = inside
    return count
