"""Persistent obstacle tracks: association, filtering, lost-view coasting.

Association is greedy best-first on the feature similarity: all
(track, detection) pairs are ranked by similarity and accepted in descending
order while both sides are unused, rejecting pairs below the threshold.
Tracks that go unmatched (missed or out of the sensing cone) coast on their
constant-acceleration estimate with a linearly growing risk size and expire
after `max_coast` seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..params import TrackerParams
from .features import Detection, feature_of, similarity
from .kalman import initial_state, kf_predict, kf_update


@dataclass
class Track:
    id: int
    x: np.ndarray                  # (9,) [pos, vel, accel]
    cov: np.ndarray                # (9,9)
    size: np.ndarray               # (3,) half-extents
    risk_size: np.ndarray          # (3,) half-extents, >= size
    cloud_len: float
    cloud_std: float
    in_view: bool = True
    coast_time: float = 0.0
    updates: int = 0
    history: list = field(default_factory=list)   # [(t, pos(3))], span-limited

    @property
    def position(self) -> np.ndarray:
        return self.x[:3]

    @property
    def velocity(self) -> np.ndarray:
        return self.x[3:6]

    @property
    def accel(self) -> np.ndarray:
        return self.x[6:9]

    @property
    def planar_speed(self) -> float:
        return float(np.hypot(self.x[3], self.x[4]))

    def feature(self) -> np.ndarray:
        return np.concatenate([self.position, 2.0 * self.size, [self.cloud_len], [self.cloud_std]])

    def push_history(self, t: float, window: float) -> None:
        if self.history and t <= self.history[-1][0]:
            return
        self.history.append((t, self.position.copy()))
        while self.history and self.history[-1][0] - self.history[0][0] > window:
            self.history.pop(0)


def associate(tracks: list, detections: list, params: TrackerParams):
    """Greedy best-first matching. Returns (pairs, unmatched_tracks,
    unmatched_detections) where pairs is a list of (track_idx, det_idx)."""
    w = params.weight_diagonal()
    scored = []
    det_feats = [feature_of(d) for d in detections]
    for ti, track in enumerate(tracks):
        tf = track.feature()
        for di, df in enumerate(det_feats):
            s = similarity(tf, df, w)
            if s >= params.sim_threshold:
                # similarity desc; index order breaks exact ties deterministically
                scored.append((-s, ti, di))
    scored.sort()
    used_t: set[int] = set()
    used_d: set[int] = set()
    pairs = []
    for _, ti, di in scored:
        if ti in used_t or di in used_d:
            continue
        pairs.append((ti, di))
        used_t.add(ti)
        used_d.add(di)
    unmatched_tracks = [i for i in range(len(tracks)) if i not in used_t]
    unmatched_dets = [i for i in range(len(detections)) if i not in used_d]
    return pairs, unmatched_tracks, unmatched_dets


def classify_dynamic(track: Track, params: TrackerParams) -> bool:
    """Dynamic iff the filtered planar speed exceeds the threshold; needs a
    minimum number of updates before the velocity estimate is trusted."""
    if track.updates < params.min_updates_for_class:
        return False
    return track.planar_speed > params.dyn_vel_threshold


def compensate_out_of_view(track: Track, dt: float, params: TrackerParams) -> Track | None:
    """Coast an unmatched track on its constant-acceleration state; grow the
    risk size to cover motion uncertainty. Returns None once expired."""
    track.coast_time += dt
    if track.coast_time > params.max_coast + 1e-9:
        return None
    track.x, track.cov = kf_predict(track.x, track.cov, dt, params.process_noise)
    track.risk_size = track.risk_size + params.risk_growth_rate * dt
    return track


class ObstacleTracker:
    """Owns the track table; one `step` per sensing tick."""

    def __init__(self, params: TrackerParams | None = None):
        self.params = params or TrackerParams()
        self.tracks: list[Track] = []
        self._next_id = 0

    def step(self, detections: list[Detection], t: float, dt: float,
             in_view_fn=None) -> list[Track]:
        """Advance all tracks by dt, associate the new detections, coast the
        rest. `in_view_fn(position) -> bool` tells whether a track position
        currently falls inside the sensing cone (defaults to always True)."""
        prm = self.params
        for track in self.tracks:
            track.x, track.cov = kf_predict(track.x, track.cov, dt, prm.process_noise)

        detections = [d for d in detections if np.all(np.isfinite(d.pos))]
        pairs, unmatched_tracks, unmatched_dets = associate(self.tracks, detections, prm)

        survivors: list[Track] = []
        for ti, di in pairs:
            track, det = self.tracks[ti], detections[di]
            track.x, track.cov = kf_update(track.x, track.cov, det.pos, prm.measurement_noise)
            track.size = 0.7 * track.size + 0.3 * (det.dim / 2.0)
            track.risk_size = track.size.copy()
            track.cloud_len = 0.7 * track.cloud_len + 0.3 * det.cloud_len
            track.cloud_std = 0.7 * track.cloud_std + 0.3 * det.cloud_std
            track.in_view = True
            track.coast_time = 0.0
            track.updates += 1
            track.push_history(t, prm.history_window)
            survivors.append(track)

        for ti in unmatched_tracks:
            track = self.tracks[ti]
            track.in_view = bool(in_view_fn(track.position)) if in_view_fn else True
            # state was already propagated by the shared predict above
            track.coast_time += dt
            if track.coast_time > prm.max_coast + 1e-9:
                continue
            track.risk_size = track.risk_size + prm.risk_growth_rate * dt
            track.push_history(t, prm.history_window)
            survivors.append(track)

        for di in unmatched_dets:
            survivors.append(self._spawn(detections[di], t))

        survivors.sort(key=lambda tr: tr.id)
        self.tracks = survivors
        return self.tracks

    def _spawn(self, det: Detection, t: float) -> Track:
        x, cov = initial_state(det.pos)
        track = Track(
            id=self._next_id,
            x=x,
            cov=cov,
            size=det.dim / 2.0,
            risk_size=det.dim / 2.0,
            cloud_len=float(det.cloud_len),
            cloud_std=float(det.cloud_std),
            updates=1,
        )
        track.push_history(t, self.params.history_window)
        self._next_id += 1
        return track

    def dynamic_tracks(self) -> list[Track]:
        return [tr for tr in self.tracks if classify_dynamic(tr, self.params)]
