"""Planar rotation and oriented-box helpers shared across the stack.

Boxes are 2.5D: oriented in the xy plane (yaw about z), axis-aligned in z.
"""

from __future__ import annotations

import numpy as np


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return float((a + np.pi) % (2.0 * np.pi) - np.pi)


def rot2(yaw: float) -> np.ndarray:
    """2x2 rotation matrix for a yaw angle."""
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, -s], [s, c]])


def points_in_box(
    points: np.ndarray,
    center: np.ndarray,
    half_extents: np.ndarray,
    yaw: float = 0.0,
    inflate: float = 0.0,
) -> np.ndarray:
    """Strict containment test of (M,3) points against one oriented box.

    `inflate` grows the box half-extents on every axis (used for robot
    footprint inflation). Boundary contact does not count as containment.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rel = pts - np.asarray(center, dtype=float)
    c, s = np.cos(yaw), np.sin(yaw)
    # rotate xy into the box frame
    bx = c * rel[:, 0] + s * rel[:, 1]
    by = -s * rel[:, 0] + c * rel[:, 1]
    hx, hy, hz = np.asarray(half_extents, dtype=float) + inflate
    return (np.abs(bx) < hx) & (np.abs(by) < hy) & (np.abs(rel[:, 2]) < hz)


def point_in_box(point, center, half_extents, yaw: float = 0.0, inflate: float = 0.0) -> bool:
    return bool(points_in_box(np.asarray(point, dtype=float)[None, :], center, half_extents, yaw, inflate)[0])


def points_in_any_box(points: np.ndarray, boxes) -> np.ndarray:
    """Containment of (M,3) points against a list of objects with
    center / half_extents / yaw attributes. Returns an (M,) bool mask."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    hit = np.zeros(len(pts), dtype=bool)
    for b in boxes:
        hit |= points_in_box(pts, b.center, b.half_extents, b.yaw)
    return hit
