"""Experiment configuration and verification-report records.

Configs serialize to versioned JSON (the `simulate` subcommand reads them
from disk); reports serialize deterministically so that reruns with the
same seed produce byte-identical output. Wall time is tracked on the
object but excluded from serialization by default for that reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cidlab.errors import ParameterError
from cidlab.processes import spec_from_json, spec_to_json
from cidlab.stats import Custom, Identity, Indicator, Power

CONFIG_VERSION = 1

SUMMARY_QUANTILES = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)

DISTRIBUTIONAL_TESTS = ("ks_one_sample", "ks_two_sample")
TESTS = DISTRIBUTIONAL_TESTS + ("variance_bound", "band_check", "symmetry_check")


def statistic_to_json(f) -> dict:
    if isinstance(f, Identity):
        return {"fn": "identity"}
    if isinstance(f, Indicator):
        return {"fn": "indicator", "t": f.t}
    if isinstance(f, Power):
        return {"fn": "power", "p": f.p}
    if isinstance(f, Custom):
        return {"fn": "custom", "table": [[a, b] for a, b in f.table]}
    raise ParameterError(f"unknown statistic descriptor: {f!r}")


def statistic_from_json(d: dict):
    kind = d.get("fn")
    if kind == "identity":
        return Identity()
    if kind == "indicator":
        return Indicator(t=float(d["t"]))
    if kind == "power":
        return Power(p=float(d["p"]))
    if kind == "custom":
        return Custom(table=tuple((float(a), float(b)) for a, b in d["table"]))
    raise ParameterError(f"unknown statistic descriptor: {d!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One runnable experiment: process, statistic, sizes, limit, and gate."""

    name: str
    process: object
    kind: str  # W | B | C | M | W-process | B-process | C-process
    n: int
    replicas: int
    seed: int
    statistic: object = None  # FunctionDescriptor, or None for process kinds
    limit: str = "normal"  # normal | kolmogorov | gf | sigma | none
    test: str = "ks_one_sample"
    tolerance: float = 0.05
    lane: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.test not in TESTS:
            raise ParameterError(f"unknown test: {self.test}")
        if self.tolerance <= 0:
            raise ParameterError(f"tolerance must be positive: {self.tolerance}")
        if self.test in DISTRIBUTIONAL_TESTS and self.replicas < 100:
            raise ParameterError(
                f"distributional tests need >= 100 replicas, got {self.replicas}"
            )
        if self.n < 1 or self.replicas < 1:
            raise ParameterError("n and replicas must be positive")

    def to_json(self) -> dict:
        d = {
            "version": CONFIG_VERSION,
            "name": self.name,
            "process": spec_to_json(self.process),
            "kind": self.kind,
            "n": self.n,
            "replicas": self.replicas,
            "seed": self.seed,
            "limit": self.limit,
            "test": self.test,
            "tolerance": self.tolerance,
            "lane": self.lane,
        }
        if self.statistic is not None:
            d["statistic"] = statistic_to_json(self.statistic)
        if self.options:
            d["options"] = dict(self.options)
        return d

    @staticmethod
    def from_json(d: dict) -> "ExperimentConfig":
        version = d.get("version")
        if version != CONFIG_VERSION:
            raise ParameterError(f"unsupported config version: {version!r}")
        return ExperimentConfig(
            name=d["name"],
            process=spec_from_json(d["process"]),
            kind=d["kind"],
            n=int(d["n"]),
            replicas=int(d["replicas"]),
            seed=int(d["seed"]),
            statistic=statistic_from_json(d["statistic"]) if "statistic" in d else None,
            limit=d.get("limit", "normal"),
            test=d.get("test", "ks_one_sample"),
            tolerance=float(d.get("tolerance", 0.05)),
            lane=int(d.get("lane", 0)),
            options=dict(d.get("options", {})),
        )


@dataclass(frozen=True)
class Check:
    """One gate inside a report: value compared against a threshold."""

    check_id: str
    description: str
    value: float
    threshold: float
    passed: bool
    comparison: str = "<"
    gating: bool = True


def summarize(samples) -> dict:
    """Count, mean, variance, and fixed quantiles of a sample vector."""
    xs = np.asarray(samples, dtype=float)
    if xs.size == 0:
        return {"count": 0}
    qs = np.quantile(xs, SUMMARY_QUANTILES)
    return {
        "count": int(xs.size),
        "mean": float(xs.mean()),
        "variance": float(xs.var(ddof=1)) if xs.size > 1 else 0.0,
        "quantiles": {repr(q): float(v) for q, v in zip(SUMMARY_QUANTILES, qs)},
    }


@dataclass
class VerificationReport:
    """Outcome of one experiment: checks, sample summary, diagnostics."""

    experiment: str
    seed: int
    checks: list
    summary: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    excluded: int = 0
    inconclusive: bool = False
    wall_time: float | None = None
    samples: np.ndarray | None = None  # retained for plots, not serialized

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "experiment": self.experiment,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "check_id": c.check_id,
                    "description": c.description,
                    "value": c.value,
                    "threshold": c.threshold,
                    "comparison": c.comparison,
                    "passed": c.passed,
                    "gating": c.gating,
                }
                for c in self.checks
            ],
            "summary": self.summary,
            "diagnostics": self.diagnostics,
            "excluded": self.excluded,
            "inconclusive": self.inconclusive,
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return jsonable(d)


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and Fractions for json."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    return obj


def dump_json(obj, fp) -> None:
    """Deterministic JSON: sorted keys, repr floats, trailing newline."""
    fp.write(json.dumps(jsonable(obj), sort_keys=True, indent=2))
    fp.write("\n")
