"""Static occupancy handling: rasterization and clustering into oriented boxes.

Occupied cells near the robot are clustered with DBSCAN; each cluster box is
recursively split with a two-centroid k-means (centroids seeded at opposing
box corners) until the point density inside every box clears a threshold,
then the box yaw is swept over discrete angles to maximize density. The
returned boxes jointly contain every clustered point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import ClusterParams
from ..sim.scenario import StaticBox


@dataclass
class OccupancyGrid:
    origin: np.ndarray          # (2,) world xy of cell (0, 0) center
    resolution: float
    occupied: np.ndarray        # (M, 2) world xy of occupied cell centers
    z_center: float = 1.0
    z_half: float = 1.0


def rasterize_boxes(boxes: list, map_extent, resolution: float = 0.1) -> OccupancyGrid:
    """Mark every grid cell whose center falls inside a box footprint."""
    (xmin, xmax), (ymin, ymax) = map_extent
    xs = np.arange(xmin + resolution / 2, xmax, resolution)
    ys = np.arange(ymin + resolution / 2, ymax, resolution)
    occupied = []
    z_top = 2.0
    for box in boxes:
        z_top = max(z_top, float(box.center[2] + box.half_extents[2]))
        hx, hy = float(box.half_extents[0]), float(box.half_extents[1])
        reach = np.hypot(hx, hy)
        cx, cy = float(box.center[0]), float(box.center[1])
        sub_x = xs[(xs >= cx - reach - resolution) & (xs <= cx + reach + resolution)]
        sub_y = ys[(ys >= cy - reach - resolution) & (ys <= cy + reach + resolution)]
        if len(sub_x) == 0 or len(sub_y) == 0:
            continue
        gx, gy = np.meshgrid(sub_x, sub_y)
        rel_x, rel_y = gx - cx, gy - cy
        c, s = np.cos(box.yaw), np.sin(box.yaw)
        bx = c * rel_x + s * rel_y
        by = -s * rel_x + c * rel_y
        mask = (np.abs(bx) <= hx) & (np.abs(by) <= hy)
        occupied.append(np.column_stack([gx[mask], gy[mask]]))
    pts = np.vstack(occupied) if occupied else np.empty((0, 2))
    if len(pts):
        pts = np.unique(pts, axis=0)
    return OccupancyGrid(origin=np.array([xs[0] if len(xs) else xmin, ys[0] if len(ys) else ymin]),
                         resolution=resolution, occupied=pts,
                         z_center=z_top / 2.0, z_half=z_top / 2.0)


def _dbscan_grid(points: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """DBSCAN specialized to grid-spaced points; hash-grid neighbor lookup.

    Returns labels, -1 for noise. Deterministic: cluster growth follows
    lexicographic point order.
    """
    n = len(points)
    labels = np.full(n, -1, dtype=int)
    if n == 0:
        return labels
    order = np.lexsort((points[:, 1], points[:, 0]))
    cell = {}
    keys = np.floor(points / eps).astype(int)
    for i in range(n):
        cell.setdefault((keys[i, 0], keys[i, 1]), []).append(i)

    def neighbors(i):
        kx, ky = keys[i]
        out = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                out.extend(cell.get((kx + dx, ky + dy), ()))
        out = [j for j in out if np.hypot(*(points[j] - points[i])) <= eps]
        return out

    cluster = 0
    visited = np.zeros(n, dtype=bool)
    for seed in order:
        if visited[seed]:
            continue
        visited[seed] = True
        nbrs = neighbors(seed)
        if len(nbrs) < min_pts:
            continue
        labels[seed] = cluster
        queue = sorted(nbrs)
        qi = 0
        while qi < len(queue):
            j = queue[qi]
            qi += 1
            if labels[j] == -1:
                labels[j] = cluster
            if visited[j]:
                continue
            visited[j] = True
            nbrs_j = neighbors(j)
            if len(nbrs_j) >= min_pts:
                queue.extend(sorted(nbrs_j))
        cluster += 1
    return labels


def _two_means(points: np.ndarray, seeds: np.ndarray, iters: int = 20):
    """Two-centroid Lloyd iterations; returns the two index partitions."""
    c = seeds.astype(float).copy()
    assign = None
    for _ in range(iters):
        d0 = np.linalg.norm(points - c[0], axis=1)
        d1 = np.linalg.norm(points - c[1], axis=1)
        new_assign = (d1 < d0).astype(int)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for k in (0, 1):
            grp = points[assign == k]
            if len(grp):
                c[k] = grp.mean(axis=0)
    idx0 = np.flatnonzero(assign == 0)
    idx1 = np.flatnonzero(assign == 1)
    return idx0, idx1


def _fit_box(points: np.ndarray, yaw: float, pad: float):
    """Oriented bounding box of points at a given yaw; returns
    (center(2,), half_extents(2,), density)."""
    c, s = np.cos(yaw), np.sin(yaw)
    bx = c * points[:, 0] + s * points[:, 1]
    by = -s * points[:, 0] + c * points[:, 1]
    lo = np.array([bx.min(), by.min()]) - pad
    hi = np.array([bx.max(), by.max()]) + pad
    half = (hi - lo) / 2.0
    mid = (hi + lo) / 2.0
    center = np.array([c * mid[0] - s * mid[1], s * mid[0] + c * mid[1]])
    area = 4.0 * half[0] * half[1]
    return center, half, len(points) / max(area, 1e-9)


def _best_yaw_box(points: np.ndarray, pad: float, step_deg: float):
    """Sweep yaw over [-90, 90) deg; maximal density, ties prefer small |yaw|."""
    best = None
    for deg in np.arange(-90.0, 90.0, step_deg):
        yaw = np.deg2rad(deg)
        center, half, density = _fit_box(points, yaw, pad)
        key = (density, -abs(deg))
        if best is None or key > best[0]:
            best = (key, center, half, yaw, density)
    _, center, half, yaw, density = best
    return center, half, float(yaw), density


def cluster_static_obstacles(grid: OccupancyGrid, robot_pos, params: ClusterParams | None = None,
                             local_radius: float = np.inf) -> list[StaticBox]:
    """Oriented boxes covering occupied cells within `local_radius` of the robot."""
    params = params or ClusterParams()
    pts = grid.occupied
    if len(pts) == 0:
        return []
    if np.isfinite(local_radius):
        rel = pts - np.asarray(robot_pos, dtype=float)[:2]
        pts = pts[np.hypot(rel[:, 0], rel[:, 1]) <= local_radius]
        if len(pts) == 0:
            return []
    eps = params.eps_cells * grid.resolution
    labels = _dbscan_grid(pts, eps, params.min_pts)
    pad = grid.resolution / 2.0

    clusters = [pts[labels == k] for k in range(labels.max() + 1)] if labels.max() >= 0 else []
    # points DBSCAN calls noise still must be covered: make them singleton clusters
    noise = pts[labels == -1]
    for p in noise:
        clusters.append(p[None, :])
    if not clusters:
        return []

    densities = [_best_yaw_box(c, pad, params.yaw_step_deg)[3] for c in clusters]
    threshold = params.density_fraction * max(densities)

    def emit(bc, bh, yaw):
        boxes.append(StaticBox(center=np.array([bc[0], bc[1], grid.z_center]),
                               half_extents=np.array([bh[0], bh[1], grid.z_half]),
                               yaw=yaw))

    boxes: list[StaticBox] = []
    for cluster_pts in clusters:
        stack = [(cluster_pts, 0)]
        while stack:
            group, depth = stack.pop()
            bc, bh, yaw, density = _best_yaw_box(group, pad, params.yaw_step_deg)
            if density >= threshold or depth >= params.max_splits or len(group) < 2 * params.min_pts:
                emit(bc, bh, yaw)
                continue
            center, half, _ = _fit_box(group, 0.0, pad)
            idx0, idx1 = _two_means(group, np.array([center - half, center + half]))
            if len(idx0) == 0 or len(idx1) == 0:
                emit(bc, bh, yaw)
                continue
            stack.append((group[idx0], depth + 1))
            stack.append((group[idx1], depth + 1))
    return boxes
