"""Run traces: schema-versioned newline-delimited JSON, one record per tick.

Layout: a header record (schema version, scenario, engine params, seed,
variant), then tick records, then an end record with run outcome flags.
Floats are emitted with Python's shortest round-trip repr, so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..sim.scenario import WorldConfig, config_from_dict

SCHEMA_VERSION = 1


def jsonable(obj):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def dump_record(obj: dict) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


@dataclass
class RunTrace:
    config: WorldConfig
    seed: int
    variant: str
    engine: dict = field(default_factory=dict)
    ticks: list = field(default_factory=list)
    outcome: dict = field(default_factory=dict)

    def header(self) -> dict:
        return {
            "type": "header",
            "schema_version": SCHEMA_VERSION,
            "scenario": self.config.to_dict(),
            "engine": self.engine,
            "seed": self.seed,
            "variant": self.variant,
        }

    def append(self, record: dict) -> None:
        record["type"] = "tick"
        self.ticks.append(record)

    def write(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            fh.write(dump_record(self.header()) + "\n")
            for rec in self.ticks:
                fh.write(dump_record(rec) + "\n")
            fh.write(dump_record({"type": "end", **self.outcome}) + "\n")

    @classmethod
    def read(cls, path) -> "RunTrace":
        path = Path(path)
        trace = None
        with path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                kind = rec.get("type")
                if kind == "header":
                    if rec.get("schema_version") != SCHEMA_VERSION:
                        raise ValueError(f"unsupported trace schema {rec.get('schema_version')}")
                    cfg = config_from_dict(rec["scenario"], name=str(path))
                    trace = cls(config=cfg, seed=rec["seed"], variant=rec["variant"],
                                engine=rec.get("engine", {}))
                elif kind == "tick":
                    if trace is None:
                        raise ValueError(f"{path}: tick record before header")
                    trace.ticks.append(rec)
                elif kind == "end":
                    if trace is None:
                        raise ValueError(f"{path}: end record before header")
                    trace.outcome = {k: v for k, v in rec.items() if k != "type"}
        if trace is None:
            raise ValueError(f"{path}: no header record found")
        return trace
