"""Reference trajectory generation along a waypoint path.

The global path is a piecewise-linear polyline traversed at cruise speed.
Each planning cycle re-parameterizes from the point on the path closest to
the robot and samples horizon+1 states on the MPC grid; the profile ramps to
rest over the final approach so the tail of the reference is reachable.
"""

from __future__ import annotations

import numpy as np

from .mpc import ReferenceTrajectory


class PathReference:
    def __init__(self, waypoints, cruise_speed: float, slowdown: float = 1.5):
        pts = np.atleast_2d(np.asarray(waypoints, dtype=float))
        if len(pts) < 2:
            raise ValueError("reference path needs at least two waypoints")
        self.points = pts
        self.cruise = float(cruise_speed)
        self.slowdown = max(float(slowdown), 1e-6)
        seg = np.diff(pts, axis=0)
        self.seg_len = np.linalg.norm(seg, axis=1)
        keep = self.seg_len > 1e-9
        if not keep.all():
            self.points = np.vstack([pts[0], pts[1:][keep]])
            seg = np.diff(self.points, axis=0)
            self.seg_len = np.linalg.norm(seg, axis=1)
        self.seg_dir = seg / self.seg_len[:, None]
        self.cum = np.concatenate([[0.0], np.cumsum(self.seg_len)])
        self.total = float(self.cum[-1])

    def locate(self, p) -> float:
        """Arc length of the path point closest to p."""
        p = np.asarray(p, dtype=float)
        best_s, best_d = 0.0, np.inf
        for i in range(len(self.seg_len)):
            rel = p - self.points[i]
            t = float(np.clip(rel @ self.seg_dir[i], 0.0, self.seg_len[i]))
            closest = self.points[i] + t * self.seg_dir[i]
            d = float(np.linalg.norm(p - closest))
            if d < best_d - 1e-12:
                best_d, best_s = d, self.cum[i] + t
        return best_s

    def point_at(self, s: float):
        s = float(np.clip(s, 0.0, self.total))
        i = int(np.searchsorted(self.cum[1:], s, side="right"))
        i = min(i, len(self.seg_len) - 1)
        return self.points[i] + (s - self.cum[i]) * self.seg_dir[i], self.seg_dir[i]

    def speed_at(self, s: float) -> float:
        """Cruise speed, ramping linearly to zero over the final slowdown span."""
        remaining = max(self.total - s, 0.0)
        return self.cruise * min(1.0, remaining / self.slowdown)

    def sample(self, robot_p, n: int, dt: float) -> ReferenceTrajectory:
        """Horizon reference starting at the closest path point."""
        positions = np.empty((n + 1, 3))
        velocities = np.empty((n + 1, 3))
        s = self.locate(robot_p)
        for k in range(n + 1):
            point, direction = self.point_at(s)
            speed = self.speed_at(s)
            positions[k] = point
            velocities[k] = direction * speed
            s = min(s + speed * dt, self.total)
        at_end = np.isclose(positions[:, :2], self.points[-1][None, :2]).all(axis=1)
        velocities[at_end] = 0.0
        return ReferenceTrajectory(positions, velocities)
