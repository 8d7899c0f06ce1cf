"""Engine parameter bundles and the dotted-key override scheme.

Every numeric knob of the perception / intent / planning stack lives here so
runs are reproducible from a single config. Overrides come either from an
explicit ``{"section.field": value}`` mapping (service requests, scenario
files) or from environment variables: ``INTENTNAV_<SECTION>__<FIELD>`` maps
to ``section.field``, e.g. ``INTENTNAV_MPC__LAMBDA_U=0.2``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields


ENV_PREFIX = "INTENTNAV_"


@dataclass
class TrackerParams:
    # diagonal feature weights: pos(3), dim(3), cloud len, cloud std
    w_pos: float = 1.0
    w_dim: float = 0.5
    w_len: float = 0.01
    w_std: float = 1.0
    sim_threshold: float = 0.5
    process_noise: float = 1.0        # accel-driven white noise sigma [m/s^2]
    measurement_noise: float = 0.05   # position sigma [m]
    dyn_vel_threshold: float = 0.25   # planar speed for the dynamic flag [m/s]
    min_updates_for_class: int = 5
    max_coast: float = 2.0            # track expiry after this coast time [s]
    risk_growth_rate: float = 0.2     # risk half-extent growth while coasting [m/s]
    history_window: float = 3.0       # retained (t, pos) history span [s]

    def weight_diagonal(self):
        import numpy as np

        return np.array([self.w_pos] * 3 + [self.w_dim] * 3 + [self.w_len, self.w_std])


@dataclass
class IntentParams:
    alpha: float = 1.0                # forward-intent angle sharpness
    beta: float = 0.25                # turn-intent scale
    gamma: float = 1.0                # stop-intent speed sensitivity
    s: float = 2.0                    # persistence boost for the previous dominant intent (> 1)
    history_window: float = 3.0
    n_pred: int = 30
    pred_dt: float = 0.1
    v_thresh: float = 0.5             # stop-intent risk inflation speed cap [m/s]
    lambda_inflate: float = 1.0       # risk inflation per sample-position std
    lin_acc_min: float = -0.5
    lin_acc_max: float = 0.5
    ang_acc_min: float = 0.2          # magnitude range; sign set by intent
    ang_acc_max: float = 1.0
    samples_per_intent: int = 5
    min_heading_speed: float = 0.05   # below this, reuse the last confident heading
    smooth_motion_angle: bool = False # optional 3-step moving average of the turn angle

    def __post_init__(self):
        if self.s <= 1.0:
            raise ValueError(f"persistence weight s must be > 1, got {self.s}")

    @property
    def horizon(self) -> float:
        return self.n_pred * self.pred_dt


@dataclass
class MpcParams:
    n: int = 30                       # horizon steps
    dt: float = 0.1
    lambda_u: float = 0.1             # control effort weight
    u_min: float = -2.0               # per-axis accel bounds [m/s^2]
    u_max: float = 2.0
    penalty_init: float = 10.0
    penalty_growth: float = 5.0
    max_outer_iters: int = 5
    max_inner_iters: int = 100
    feas_tol: float = 1e-3


@dataclass
class ScoreWeights:
    lambda1: float = 0.3              # consistency
    lambda2: float = 0.3              # detour
    lambda3: float = 0.4              # safety
    cap: float = 100.0


@dataclass
class PlannerParams:
    n_ic: int = 4                     # intent combinations evaluated per cycle
    risk_radius: float = 5.0          # dynamic obstacles beyond this are ignored
    obstacle_margin: float = 0.3      # half-extent margin before ellipsoid fit [m]
    cruise_speed: float = 1.5
    static_local_radius: float = 8.0  # occupancy cells clustered within this radius
    recluster_distance: float = 0.5   # re-run static clustering after this much robot motion
    goal_slowdown: float = 1.5        # distance over which the reference ramps to rest [m]


@dataclass
class ClusterParams:
    eps_cells: float = 2.0            # DBSCAN radius in grid resolutions
    min_pts: int = 4
    density_fraction: float = 0.6     # split until density >= fraction of densest initial cluster
    yaw_step_deg: float = 5.0
    max_splits: int = 6


@dataclass
class EngineParams:
    tracker: TrackerParams = field(default_factory=TrackerParams)
    intent: IntentParams = field(default_factory=IntentParams)
    mpc: MpcParams = field(default_factory=MpcParams)
    score: ScoreWeights = field(default_factory=ScoreWeights)
    planner: PlannerParams = field(default_factory=PlannerParams)
    cluster: ClusterParams = field(default_factory=ClusterParams)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class OverrideError(ValueError):
    """Raised for unknown keys or non-numeric values in a parameter override."""


def apply_overrides(params: EngineParams, overrides: dict) -> EngineParams:
    """Return a copy of `params` with dotted-key overrides applied.

    Keys look like ``mpc.lambda_u``; values must be numeric (bools allowed
    for boolean fields). Unknown keys raise OverrideError.
    """
    out = EngineParams(**{
        f.name: dataclasses.replace(getattr(params, f.name)) for f in fields(params)
    })
    for key, value in overrides.items():
        try:
            section_name, field_name = key.split(".", 1)
        except ValueError:
            raise OverrideError(f"override key {key!r} is not of the form section.field") from None
        if not hasattr(out, section_name):
            raise OverrideError(f"unknown parameter section {section_name!r} in {key!r}")
        section = getattr(out, section_name)
        if field_name not in {f.name for f in fields(section)}:
            raise OverrideError(f"unknown parameter {key!r}")
        current = getattr(section, field_name)
        if isinstance(current, bool):
            setattr(section, field_name, _as_bool(key, value))
        elif isinstance(current, int) and not isinstance(current, bool):
            setattr(section, field_name, int(_as_number(key, value)))
        else:
            setattr(section, field_name, _as_number(key, value))
    # re-validate invariants that __post_init__ guards
    IntentParams(**dataclasses.asdict(out.intent))
    return out


def env_overrides(environ=None) -> dict:
    """Collect ``INTENTNAV_SECTION__FIELD`` environment overrides."""
    environ = os.environ if environ is None else environ
    found = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):]
        if "__" not in rest:
            continue
        section, field_name = rest.split("__", 1)
        found[f"{section.lower()}.{field_name.lower()}"] = raw
    return found


def _as_number(key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise OverrideError(f"override {key!r} needs a numeric value, got {value!r}") from None


def _as_bool(key: str, value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise OverrideError(f"override {key!r} needs a boolean value, got {value!r}")
