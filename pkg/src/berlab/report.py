"""Structured results of inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MODES = ("certified", "tight")
# "bound": lhs <= rhs is an inequality; "identity": lhs is a residual that must vanish
KINDS = ("bound", "identity")


@dataclass(frozen=True)
class CheckReport:
    checker: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float
    mode: str
    provenance: dict = field(default_factory=dict)
    children: tuple = ()
    kind: str = "bound"

    @property
    def ratio(self) -> float:
        """``lhs / rhs``; a parent takes the largest ratio among its bound children."""
        if self.children:
            bounds = [c.ratio for c in self.children if c.kind == "bound"]
            if bounds:
                return max(bounds)
        if self.rhs == 0.0:
            return 1.0 if self.lhs <= self.tol else math.inf
        return self.lhs / self.rhs

    def to_dict(self) -> dict:
        out = {
            "checker": self.checker,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "tol": self.tol,
            "mode": self.mode,
            "kind": self.kind,
            "provenance": self.provenance,
        }
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def make_report(checker, lhs, rhs, tol, mode="certified", provenance=None, kind="bound") -> CheckReport:
    if kind not in KINDS:
        raise ValueError(f"report kind must be one of {KINDS}")
    lhs, rhs = float(lhs), float(rhs)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise ValueError(f"{checker}: non-finite side (lhs={lhs}, rhs={rhs})")
    slack = rhs - lhs
    return CheckReport(checker, lhs, rhs, slack, slack >= -tol, float(tol), mode, dict(provenance or {}), (), kind)


def combine(checker, children, mode="certified", provenance=None) -> CheckReport:
    """Fold sub-reports into one, carrying the sides of the most critical child.

    The most critical child is the one with the smallest ``slack + tol``, so
    the parent passes exactly when every child passes. While everything
    passes, identity residuals step aside so the parent shows a real bound.
    """
    children = tuple(children)
    if not children:
        raise ValueError("combine needs at least one sub-report")
    pool = children
    if all(c.passed for c in children):
        pool = tuple(c for c in children if c.kind == "bound") or children
    worst = min(pool, key=lambda c: c.slack + c.tol)
    prov = dict(provenance or {})
    prov.setdefault("critical", worst.checker)
    return CheckReport(
        checker, worst.lhs, worst.rhs, worst.slack, worst.passed, worst.tol, mode, prov, children
    )
