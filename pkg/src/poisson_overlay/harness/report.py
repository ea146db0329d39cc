"""Verification records and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

RULES = ("abs", "min", "max", "true")
PROVENANCE = ("paper", "derived", "trivial")


@dataclass(frozen=True)
class Target:
    """One checked number.

    rule "abs": pass iff |estimate - paper_value| <= tolerance.
    rule "min": pass iff estimate > tolerance (p-values).
    rule "max": pass iff estimate < tolerance (distances).
    rule "true": pass iff estimate == 1 (boolean properties stored as 0/1).
    """

    name: str
    estimate: float
    tolerance: float
    rule: str = "abs"
    paper_value: float | None = None
    stderr: float | None = None
    provenance: str = "paper"

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")
        if self.provenance not in PROVENANCE:
            raise ValueError(f"provenance must be one of {PROVENANCE}, got {self.provenance!r}")
        if self.rule == "abs" and self.paper_value is None:
            raise ValueError("an 'abs' target needs a reference value")

    @property
    def passed(self) -> bool:
        return target_passes(self.rule, self.estimate, self.tolerance, self.paper_value)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "paper_value": _finite_or_none(self.paper_value),
            "estimate": _finite_or_none(self.estimate),
            "stderr": _finite_or_none(self.stderr),
            "tolerance": _finite_or_none(self.tolerance),
            "rule": self.rule,
            "provenance": self.provenance,
            "pass": self.passed,
        }


def target_passes(rule: str, estimate, tolerance, paper_value=None) -> bool:
    """The pass flag as a function of the stored numbers alone."""
    if estimate is None or (isinstance(estimate, float) and math.isnan(estimate)):
        return False
    if rule == "abs":
        return abs(estimate - paper_value) <= tolerance
    if rule == "min":
        return estimate > tolerance
    if rule == "max":
        return estimate < tolerance
    if rule == "true":
        return estimate == 1
    raise ValueError(f"unknown rule {rule!r}")


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class VerificationReport:
    experiment: str
    lam: float | list[float] | None
    trials: int | None
    seed: int | None
    counts: dict[str, int] = field(default_factory=dict)
    targets: list[Target] = field(default_factory=list)
    measurements: list[dict[str, Any]] = field(default_factory=list)
    empty_data: bool = False

    @property
    def passed(self) -> bool:
        return not self.empty_data and all(t.passed for t in self.targets)

    def add(self, target: Target) -> None:
        self.targets.append(target)

    def measure(self, name: str, estimate: float, stderr: float | None = None) -> None:
        self.measurements.append({"name": name, "estimate": _finite_or_none(estimate),
                                  "stderr": _finite_or_none(stderr)})

    def failed(self) -> list[Target]:
        return [t for t in self.targets if not t.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "lambda": self.lam,
            "trials": self.trials,
            "seed": self.seed,
            "counts": dict(self.counts),
            "empty_data": self.empty_data,
            "pass": self.passed,
            "targets": [t.to_dict() for t in self.targets],
            "measurements": list(self.measurements),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def recheck(report_dict: dict[str, Any]) -> bool:
    """Recompute every pass flag of a parsed report; True iff all stored flags agree."""
    return all(
        target_passes(t["rule"], t["estimate"], t["tolerance"], t["paper_value"]) == t["pass"]
        for t in report_dict["targets"]
    )
