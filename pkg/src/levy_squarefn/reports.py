"""Verification reports and their deterministic JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["VerificationReport", "SuiteResult", "to_json"]


def _plain(obj):
    """Recursively convert numpy scalars/arrays for JSON output."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


@dataclass
class VerificationReport:
    """A single named check: lhs vs rhs with tolerance and verdict."""

    name: str
    lhs: float
    rhs: float
    rel_error: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self, with_metadata: bool = True) -> dict:
        out = {"name": self.name, "lhs": _plain(self.lhs),
               "rhs": _plain(self.rhs), "rel_error": _plain(self.rel_error),
               "tol": self.tol, "passed": bool(self.passed),
               "details": _plain(self.details)}
        if with_metadata:
            out["metadata"] = _plain(self.metadata)
        return out


@dataclass
class SuiteResult:
    """Aggregate of the reports produced by one verification suite."""

    suite: str
    reports: list
    wall_clock_s: float = 0.0
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self, with_metadata: bool = True) -> dict:
        out = {"suite": self.suite,
               "passed": self.passed,
               "reports": [r.to_dict(with_metadata) for r in self.reports],
               "parameters": _plain(self.parameters)}
        if with_metadata:
            out["metadata"] = {"wall_clock_s": self.wall_clock_s}
        return out


def to_json(obj, path=None, indent: int = 2) -> str:
    """Serialize a report (or dict) with stable key order."""
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    text = json.dumps(_plain(obj), indent=indent, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
