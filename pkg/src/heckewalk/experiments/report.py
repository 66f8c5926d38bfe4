"""Estimate reports and their bit-stable serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

__all__ = ["EstimateReport", "ExperimentResult", "report", "parse_report",
           "CSV_HEADER", "bernoulli_report"]

CSV_HEADER = ("estimate", "stderr", "trials", "discards", "theory", "zscore", "seed")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _canon(obj):
    """Params in a JSON-stable form (floats rounded to 12 significant digits)."""
    if isinstance(obj, Mapping):
        return {str(k): _canon(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(float(obj)))
    return str(obj)


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    stderr: float
    trials: int
    discards: int
    theory: float
    seed: int
    name: str = ""
    params: Mapping = field(default_factory=dict, compare=False)
    wall_time: float = field(default=0.0, compare=False)  # never serialized

    def __post_init__(self):
        # store what gets written, so that parse(report(r)) reproduces r
        for name in ("estimate", "stderr", "theory"):
            object.__setattr__(self, name, float(_fmt(float(getattr(self, name)))))

    @property
    def zscore(self) -> float:
        diff = self.estimate - self.theory
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    def row(self) -> list[str]:
        return [_fmt(self.estimate), _fmt(self.stderr), str(self.trials), str(self.discards),
                _fmt(self.theory), _fmt(self.zscore), str(self.seed)]

    def to_dict(self) -> dict:
        return {"name": self.name, "estimate": float(_fmt(self.estimate)),
                "stderr": float(_fmt(self.stderr)), "trials": self.trials,
                "discards": self.discards, "theory": float(_fmt(self.theory)),
                "zscore": float(_fmt(self.zscore)), "seed": self.seed,
                "params": _canon(self.params)}


@dataclass(frozen=True)
class ExperimentResult:
    reports: tuple[EstimateReport, ...]
    diagnostics: Mapping = field(default_factory=dict)
    wall_time: float = field(default=0.0, compare=False)

    def max_abs_z(self) -> float:
        return max(abs(r.zscore) for r in self.reports)


def bernoulli_report(hits: np.ndarray, theory: float, seed: int, discards: int = 0,
                     name: str = "", params: Mapping | None = None,
                     wall_time: float = 0.0) -> EstimateReport:
    """Frequency estimate with stderr = sample std / sqrt(trials)."""
    x = np.asarray(hits, dtype=float)
    n = x.size
    est = float(x.mean()) if n else math.nan
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return EstimateReport(est, se, n, discards, float(theory), seed, name, dict(params or {}), wall_time)


def report(result: Union[EstimateReport, ExperimentResult, Sequence[EstimateReport]],
           format: str = "csv") -> str:
    if isinstance(result, EstimateReport):
        reports, diagnostics = (result,), {}
    elif isinstance(result, ExperimentResult):
        reports, diagnostics = result.reports, result.diagnostics
    else:
        reports, diagnostics = tuple(result), {}
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow(r.row())
        return buf.getvalue()
    if format == "json":
        doc = {"reports": [r.to_dict() for r in reports], "diagnostics": _canon(diagnostics)}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


def parse_report(text: str, format: str = "csv") -> list[EstimateReport]:
    if format == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if tuple(rows[0]) != CSV_HEADER:
            raise ValueError(f"unexpected header {rows[0]}")
        return [EstimateReport(float(r[0]), float(r[1]), int(r[2]), int(r[3]), float(r[4]), int(r[6]))
                for r in rows[1:]]
    if format == "json":
        doc = json.loads(text)
        return [EstimateReport(d["estimate"], d["stderr"], d["trials"], d["discards"], d["theory"],
                               d["seed"], d["name"], d["params"]) for d in doc["reports"]]
    raise ValueError(f"unknown format {format!r}")
