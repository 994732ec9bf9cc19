"""Planar similarity maps, ordered multi-indices, and resolution coverings.

Conventions used throughout the package:

- Similarities contract the Euclidean norm exactly by their ratio; all
  parameter-space distances between covering parts use the max norm. The
  per-system constant rho absorbs the discrepancy.
- A covering part is the axis-aligned bounding *square* of the true image,
  anchored at the bottom-left corner of the tight bounding box, with side
  max(width, height). The bottom-left corner doubles as the part's tag.
- Multi-indices are 1-based tuples over {1..r} ordered lexicographically.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

DEFAULT_PART_BUDGET = 10**6
BUDGET_ENV_VAR = "HBD_COVER_BUDGET"

GEOM_TOL = 1e-9


class BudgetExceededError(RuntimeError):
    """A requested enumeration would exceed the configured part budget."""


class InvalidIndexError(ValueError):
    """A multi-index entry falls outside {1..arity}."""


def part_budget(override: int | None = None) -> int:
    """Active part budget: explicit override, else env var, else default."""
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_PART_BUDGET


def _check_budget(count: int, budget: int | None) -> None:
    limit = part_budget(budget)
    if count > limit:
        raise BudgetExceededError(f"{count} parts exceed budget {limit}")


@dataclass(frozen=True)
class Similarity:
    """Planar similarity p -> shift + ratio * R(angle) @ (reflect ? conj(p) : p).

    conj is the vertical reflection (x, y) -> (x, -y), applied before the
    rotation. ratio must lie strictly in (0, 1): these are contractions.
    """

    ratio: float
    angle: float
    reflect: bool
    shift: tuple[float, float]

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ratio must be in (0,1), got {self.ratio}")
        object.__setattr__(self, "shift", (float(self.shift[0]), float(self.shift[1])))

    def matrix(self) -> np.ndarray:
        """Linear part as a 2x2 array."""
        cos_a, sin_a = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[cos_a, -sin_a], [sin_a, cos_a]])
        if self.reflect:
            rot = rot @ np.array([[1.0, 0.0], [0.0, -1.0]])
        return self.ratio * rot

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply to one point (2,) or a stack of points (..., 2)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix().T + np.asarray(self.shift)

    def compose(self, other: "Similarity") -> "Similarity":
        """self after other: (self.compose(other)).apply(p) = self.apply(other.apply(p))."""
        sign = -1.0 if self.reflect else 1.0
        angle = self.angle + sign * other.angle
        shift = self.apply(np.asarray(other.shift, dtype=float))
        return Similarity(
            ratio=self.ratio * other.ratio,
            angle=angle,
            reflect=self.reflect != other.reflect,
            shift=(float(shift[0]), float(shift[1])),
        )


def apply_similarity(sim: Similarity, point: Sequence[float]) -> np.ndarray:
    return sim.apply(np.asarray(point, dtype=float))


@dataclass(frozen=True)
class MultiIndex:
    """Finite word (i_1, ..., i_m) over the alphabet {1..arity}."""

    entries: tuple[int, ...]
    arity: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(int(i) for i in self.entries))
        if self.arity < 1:
            raise InvalidIndexError(f"arity must be >= 1, got {self.arity}")
        for i in self.entries:
            if not 1 <= i <= self.arity:
                raise InvalidIndexError(f"entry {i} outside 1..{self.arity}")

    @property
    def length(self) -> int:
        return len(self.entries)

    def child(self, j: int) -> "MultiIndex":
        return MultiIndex(self.entries + (j,), self.arity)

    def prefix(self, length: int) -> "MultiIndex":
        return MultiIndex(self.entries[:length], self.arity)


def lex_rank(index: MultiIndex) -> int:
    """Position of the index in the lexicographic order of its length class.

    rank = sum_j (i_j - 1) * r^(m - j), a bijection onto {0, ..., r^m - 1}.
    """
    rank = 0
    for i in index.entries:
        rank = rank * index.arity + (i - 1)
    return rank


def lex_unrank(rank: int, length: int, arity: int) -> MultiIndex:
    """Inverse of lex_rank for the given word length."""
    if not 0 <= rank < arity**length:
        raise InvalidIndexError(f"rank {rank} outside 0..{arity**length - 1}")
    entries = []
    for _ in range(length):
        entries.append(rank % arity + 1)
        rank //= arity
    return MultiIndex(tuple(reversed(entries)), arity)


_TRIANGLE_HEIGHT = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class OrderedIFS:
    """Ordered list of equal-ratio similarities with a base set Lambda_0.

    The base is either the axis-aligned square [x, x+side] x [y, y+side]
    (shape "square") or the equilateral triangle on the bottom edge of that
    square (shape "triangle"). gamma is a dimension certificate (diameters
    decay like rho * r^(-m/gamma)); rho absorbs bounding-box inflation.
    """

    maps: tuple[Similarity, ...]
    shape: str
    corner: tuple[float, float]
    side: float
    gamma: float
    rho: float
    name: str = ""

    def __post_init__(self) -> None:
        if self.shape not in ("square", "triangle"):
            raise ValueError(f"unknown base shape {self.shape!r}")
        if self.side <= 0 or self.gamma <= 0 or self.rho <= 0:
            raise ValueError("side, gamma, rho must be positive")
        ratios = [m.ratio for m in self.maps]
        if max(ratios) - min(ratios) > 1e-12:
            raise ValueError("maps must share one contraction ratio")
        base_box_lo = np.asarray(self.corner, dtype=float)
        base_box_hi = base_box_lo + self.side
        for k, sim in enumerate(self.maps):
            img = sim.apply(self.base_vertices())
            lo, hi = img.min(axis=0), img.max(axis=0)
            if (lo < base_box_lo - GEOM_TOL).any() or (hi > base_box_hi + GEOM_TOL).any():
                raise ValueError(f"map {k + 1} does not keep the base inside its box")

    @property
    def r(self) -> int:
        return len(self.maps)

    @property
    def ratio(self) -> float:
        return self.maps[0].ratio

    def base_vertices(self) -> np.ndarray:
        x, y = self.corner
        s = self.side
        if self.shape == "square":
            return np.array([[x, y], [x + s, y], [x + s, y + s], [x, y + s]])
        return np.array([[x, y], [x + s, y], [x + s / 2.0, y + s * _TRIANGLE_HEIGHT]])


@dataclass(frozen=True)
class CoveringPart:
    """Bounding square of one image phi_{i_1} o ... o phi_{i_m}(Lambda_0).

    corner is the bottom-left point of the tight bounding box and serves as
    the part's tag; side = max(width, height) of that box.
    """

    index: MultiIndex
    corner: tuple[float, float]
    side: float
    resolution: int

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.corner, dtype=float)
        return lo, lo + self.side

    def contains_points(self, points: np.ndarray, tol: float = GEOM_TOL) -> np.ndarray:
        lo, hi = self.box()
        pts = np.atleast_2d(points)
        return ((pts >= lo - tol) & (pts <= hi + tol)).all(axis=1)


def part_from_vertices(index: MultiIndex, vertices: np.ndarray, resolution: int) -> CoveringPart:
    lo = vertices.min(axis=0)
    span = vertices.max(axis=0) - lo
    return CoveringPart(
        index=index,
        corner=(float(lo[0]), float(lo[1])),
        side=float(span.max()),
        resolution=resolution,
    )


def compose_part(ifs: OrderedIFS, index: MultiIndex) -> CoveringPart:
    """Bounding square of the image of the base under the composed map."""
    if index.arity != ifs.r:
        raise InvalidIndexError(f"index arity {index.arity} != system arity {ifs.r}")
    vertices = ifs.base_vertices()
    for i in reversed(index.entries):
        vertices = ifs.maps[i - 1].apply(vertices)
    return part_from_vertices(index, vertices, index.length)


_IDENTITY_LIKE = None  # sentinel for the empty composition


def _walk(ifs: OrderedIFS, depth: int, visit: Callable[[MultiIndex, np.ndarray], None]) -> None:
    """Depth-first lexicographic walk over words of the given length.

    Words extend on the right, so the composed map is built as
    (current) o phi_j: the new letter acts on the base first.
    """
    base = ifs.base_vertices()

    def rec(entries: tuple[int, ...], sim: Similarity | None) -> None:
        if len(entries) == depth:
            vertices = base if sim is None else sim.apply(base)
            visit(MultiIndex(entries, ifs.r), vertices)
            return
        for j in range(1, ifs.r + 1):
            step = ifs.maps[j - 1]
            rec(entries + (j,), step if sim is None else sim.compose(step))

    rec((), _IDENTITY_LIKE)


def resolution_covering(
    ifs: OrderedIFS, m: int, budget: int | None = None
) -> list[CoveringPart]:
    """All r^m parts of resolution m, in lexicographic index order."""
    if m < 0:
        raise ValueError(f"resolution must be >= 0, got {m}")
    _check_budget(ifs.r**m, budget)
    parts: list[CoveringPart] = []
    _walk(ifs, m, lambda idx, verts: parts.append(part_from_vertices(idx, verts, m)))
    return parts


def attractor_points(ifs: OrderedIFS, depth: int, budget: int | None = None) -> np.ndarray:
    """One representative point per depth-level part (its box center).

    Each point is within rho * ratio^depth of the attractor in the max norm.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    _check_budget(ifs.r**depth, budget)
    points: list[np.ndarray] = []

    def visit(_idx: MultiIndex, vertices: np.ndarray) -> None:
        lo = vertices.min(axis=0)
        span = vertices.max(axis=0) - lo
        points.append(lo + span.max() / 2.0)

    _walk(ifs, depth, visit)
    return np.asarray(points)


def iter_indices(length: int, arity: int) -> Iterator[MultiIndex]:
    """Lexicographic stream of all words of the given length."""
    for rank in range(arity**length):
        yield lex_unrank(rank, length, arity)


def boxes_intersect(a: CoveringPart, b: CoveringPart, tol: float = GEOM_TOL) -> bool:
    """Closed-box intersection test with tolerance inflation."""
    a_lo, a_hi = a.box()
    b_lo, b_hi = b.box()
    return bool(((a_lo <= b_hi + tol) & (b_lo <= a_hi + tol)).all())


def box_contains(outer: CoveringPart, inner: CoveringPart, tol: float = GEOM_TOL) -> bool:
    o_lo, o_hi = outer.box()
    i_lo, i_hi = inner.box()
    return bool(((i_lo >= o_lo - tol) & (i_hi <= o_hi + tol)).all())
