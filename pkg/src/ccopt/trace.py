"""Iteration traces, termination reasons and trace file writers."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TerminationReason",
    "IterationRecord",
    "IterationTrace",
    "TRACE_COLUMNS",
    "format_number",
    "trace_to_csv",
    "trace_to_json",
]

TRACE_COLUMNS = ("k", "f", "delta_f", "step_or_radius", "ratio", "stationarity", "subproblem_iters")


class TerminationReason(enum.Enum):
    STATIONARY = "Stationary"
    SURROGATE_VANISHED = "SurrogateVanished"
    NO_DESCENT_DIRECTION = "NoDescentDirection"
    OBJECTIVE_DIVERGING = "ObjectiveDiverging"
    UNBOUNDED_BELOW = "UnboundedBelow"
    MAX_ITERS = "MaxIters"
    ITER_LIMIT = "IterLimit"
    RADIUS_COLLAPSE = "RadiusCollapse"


@dataclass
class IterationRecord:
    k: int
    x: np.ndarray
    f: float
    delta_f: float | None = None
    step_norm: float | None = None
    step_or_radius: float | None = None
    ratio: float | None = None
    stationarity: float | None = None
    subproblem_iters: int = 0
    accepted: bool = False
    wall_time: float = 0.0

    def row(self):
        return [getattr(self, c) for c in TRACE_COLUMNS]


@dataclass
class IterationTrace:
    method: str
    records: list = field(default_factory=list)

    def append(self, rec: IterationRecord):
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def column(self, name):
        return [getattr(r, name) for r in self.records]


def format_number(v) -> str:
    """17 significant digits; ``None`` becomes the empty string."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def trace_to_csv(trace: IterationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rec in trace:
        w.writerow([format_number(v) for v in rec.row()])
    return buf.getvalue()


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(u) for u in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_value(str(k))}: {_json_value(u)}" for k, u in v.items()) + "}"
    v = float(v)
    if not math.isfinite(v):
        # JSON has no infinities
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def trace_to_json(trace: IterationTrace, summary: dict) -> str:
    records = [dict(zip(TRACE_COLUMNS, rec.row())) for rec in trace]
    lines = ["{", '  "records": [']
    lines += ["    " + _json_value(r) + ("," if i < len(records) - 1 else "") for i, r in enumerate(records)]
    lines += ["  ],", '  "summary": ' + _json_value(summary), "}"]
    return "\n".join(lines) + "\n"
