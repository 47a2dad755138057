"""Verification reports: named checks and ratio brackets, with stable JSON output."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

REPORT_SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    name: str
    passed: bool
    detail: str = ""
    value: float | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "value": _clean(self.value)}


@dataclass
class RatioSeries:
    """A ratio tracked along an index, with its running ``[min, max]`` bracket."""

    name: str
    index: list[int] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def add(self, i: int, value: float) -> None:
        self.index.append(i)
        self.values.append(value)

    @property
    def bracket(self) -> tuple[float, float]:
        if not self.values:
            return (math.nan, math.nan)
        return min(self.values), max(self.values)

    @property
    def width(self) -> float:
        lo, hi = self.bracket
        return hi / lo if lo > 0 else math.inf

    def running(self) -> list[tuple[float, float]]:
        out, lo, hi = [], math.inf, -math.inf
        for v in self.values:
            lo, hi = min(lo, v), max(hi, v)
            out.append((lo, hi))
        return out

    def to_dict(self) -> dict:
        lo, hi = self.bracket
        return {"name": self.name, "index": self.index, "values": [_clean(v) for v in self.values],
                "min": _clean(lo), "max": _clean(hi), "width": _clean(self.width)}


@dataclass
class VerificationReport:
    checks: list[CheckRecord] = field(default_factory=list)
    ratios: dict[str, RatioSeries] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, passed: bool, detail: str = "", value: float | None = None) -> CheckRecord:
        rec = CheckRecord(name, bool(passed), detail, value)
        self.checks.append(rec)
        return rec

    def ratio(self, name: str) -> RatioSeries:
        if name not in self.ratios:
            self.ratios[name] = RatioSeries(name)
        return self.ratios[name]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "ratios": {k: v.to_dict() for k, v in sorted(self.ratios.items())},
            "meta": _clean(self.meta),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _clean(x):
    """Make values JSON-safe: non-finite floats become strings, tuples become lists."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x
