"""Checks for the three ordered-box-dimension conditions.

For a candidate exponent gamma and constant rho, a family of resolution-m
coverings (r^m parts each, lexicographic order) must satisfy:

  (i)   every part side <= rho * r^(-m/gamma),
  (ii)  each resolution-(m+1) part sits inside its length-m prefix part,
  (iii) parts (i, j-1, r) and (i, j, 1) intersect for consecutive j.

Only the decision "at most gamma" is implemented; the infimum itself has no
algorithm here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .geometry import (
    CoveringPart,
    GEOM_TOL,
    OrderedIFS,
    box_contains,
    boxes_intersect,
    lex_rank,
    resolution_covering,
)


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of one condition at one resolution."""

    condition: str
    m: int
    passed: bool
    counterexample: dict | None = None

    def to_record(self) -> dict:
        rec = {"condition": self.condition, "m": self.m, "pass": self.passed}
        if self.counterexample is not None:
            rec["counterexample"] = self.counterexample
        return rec


@dataclass(frozen=True)
class HbdReport:
    name: str
    gamma: float
    rho: float
    max_resolution: int
    conditions: tuple[ConditionResult, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def first_failure(self) -> ConditionResult | None:
        for c in self.conditions:
            if not c.passed:
                return c
        return None

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "gamma": self.gamma,
            "rho": self.rho,
            "max_resolution": self.max_resolution,
            "pass": self.passed,
            "conditions": [c.to_record() for c in self.conditions],
        }


def _resolution_of(covering: Sequence[CoveringPart]) -> int:
    ms = {p.resolution for p in covering}
    if len(ms) != 1:
        raise ValueError(f"covering mixes resolutions {sorted(ms)}")
    return ms.pop()


def check_diameters(
    covering: Sequence[CoveringPart], rho: float, c: float, tol: float = GEOM_TOL
) -> ConditionResult:
    """Condition (i): every side <= rho * c^m, c = r^(-1/gamma)."""
    m = _resolution_of(covering)
    bound = rho * c**m
    for part in covering:
        if part.side > bound + tol:
            return ConditionResult(
                "i",
                m,
                False,
                {"index": list(part.index.entries), "side": part.side, "bound": bound},
            )
    return ConditionResult("i", m, True)


def check_nesting(
    parent: Sequence[CoveringPart], child: Sequence[CoveringPart], tol: float = GEOM_TOL
) -> ConditionResult:
    """Condition (ii): positional prefix parts contain their children."""
    m = _resolution_of(parent)
    if _resolution_of(child) != m + 1:
        raise ValueError("child covering must be one resolution deeper")
    if len(parent) == 0 or len(child) % len(parent) != 0:
        raise ValueError("child count must be r x parent count")
    r = len(child) // len(parent)
    for pos, part in enumerate(child):
        parent_part = parent[pos // r]
        if part.index.entries[:-1] != parent_part.index.entries:
            return ConditionResult(
                "ii",
                m + 1,
                False,
                {
                    "index": list(part.index.entries),
                    "expected_prefix": list(parent_part.index.entries),
                    "reason": "wrong prefix",
                },
            )
        if not box_contains(parent_part, part, tol):
            return ConditionResult(
                "ii",
                m + 1,
                False,
                {
                    "index": list(part.index.entries),
                    "parent": list(parent_part.index.entries),
                    "reason": "box escapes parent",
                },
            )
    return ConditionResult("ii", m + 1, True)


def check_adjacency(
    covering: Sequence[CoveringPart], r: int, tol: float = GEOM_TOL
) -> ConditionResult:
    """Condition (iii): box of (i, j-1, r) meets box of (i, j, 1)."""
    m = _resolution_of(covering)
    if m < 2:
        raise ValueError("adjacency needs resolution >= 2")
    if len(covering) != r**m:
        raise ValueError(f"expected {r ** m} parts, got {len(covering)}")
    for prefix_rank in range(r ** (m - 2)):
        for j in range(2, r + 1):
            # ranks of (prefix, j-1, r) and (prefix, j, 1)
            rank_a = (prefix_rank * r + (j - 2)) * r + (r - 1)
            rank_b = (prefix_rank * r + (j - 1)) * r
            a, b = covering[rank_a], covering[rank_b]
            if lex_rank(a.index) != rank_a or lex_rank(b.index) != rank_b:
                raise ValueError("covering is not in lexicographic order")
            if not boxes_intersect(a, b, tol):
                return ConditionResult(
                    "iii",
                    m,
                    False,
                    {"left": list(a.index.entries), "right": list(b.index.entries)},
                )
    return ConditionResult("iii", m, True)


def hbd_report(
    source: OrderedIFS | Sequence[Sequence[CoveringPart]],
    gamma: float,
    rho: float,
    m_max: int,
    name: str | None = None,
    budget: int | None = None,
    tol: float = GEOM_TOL,
) -> HbdReport:
    """Run all three checks for every resolution up to m_max.

    source is either an ordered system (coverings are generated) or a
    pre-built list of coverings indexed by resolution 0..m_max.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if isinstance(source, OrderedIFS):
        coverings = [resolution_covering(source, m, budget) for m in range(m_max + 1)]
        label = name or source.name
    else:
        coverings = [list(cov) for cov in source]
        if len(coverings) < m_max + 1:
            raise ValueError("need coverings for every resolution 0..m_max")
        label = name or ""
    r = len(coverings[1])
    c = r ** (-1.0 / gamma)

    results: list[ConditionResult] = []
    for m in range(m_max + 1):
        results.append(check_diameters(coverings[m], rho, c, tol))
    for m in range(m_max):
        results.append(check_nesting(coverings[m], coverings[m + 1], tol))
    for m in range(2, m_max + 1):
        results.append(check_adjacency(coverings[m], r, tol))
    return HbdReport(label, gamma, rho, m_max, tuple(results))
