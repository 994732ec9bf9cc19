"""Ready-made ordered systems and Holder-curve dyadic coverings.

The four planar systems are wired exactly as ordered iterated function
systems whose lexicographic part order traces the classical curve orderings
(arrowhead order on the gasket, pseudo-Hilbert order on the square, path
order on the Koch curve and on the eight-edge sausage seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import (
    CoveringPart,
    MultiIndex,
    OrderedIFS,
    Similarity,
    part_from_vertices,
)

SQRT3 = math.sqrt(3.0)


def sierpinski_gasket(side: float = 1.0) -> OrderedIFS:
    """Gasket on the equilateral triangle of side `side`, barycenter at 0.

    Three ratio-1/2 maps in arrowhead order: the outer two reflect before
    rotating by +-pi/3 so consecutive images chain through edge midpoints.
    """
    if side <= 0:
        raise ValueError("side must be positive")
    ell = float(side)
    maps = (
        Similarity(0.5, math.pi / 3.0, True, (-ell / 4.0, -SQRT3 / 12.0 * ell)),
        Similarity(0.5, 0.0, False, (0.0, SQRT3 / 6.0 * ell)),
        Similarity(0.5, -math.pi / 3.0, True, (ell / 4.0, -SQRT3 / 12.0 * ell)),
    )
    return OrderedIFS(
        maps=maps,
        shape="triangle",
        corner=(-ell / 2.0, -SQRT3 / 6.0 * ell),
        side=ell,
        gamma=math.log(3.0) / math.log(2.0),
        rho=ell,
        name="sierpinski",
    )


def hilbert_square() -> OrderedIFS:
    """Unit square [-1/2,1/2]^2 split into quadrants in pseudo-Hilbert order."""
    maps = (
        Similarity(0.5, math.pi / 2.0, True, (-0.25, -0.25)),
        Similarity(0.5, 0.0, False, (-0.25, 0.25)),
        Similarity(0.5, 0.0, False, (0.25, 0.25)),
        Similarity(0.5, -math.pi / 2.0, True, (0.25, -0.25)),
    )
    return OrderedIFS(
        maps=maps,
        shape="square",
        corner=(-0.5, -0.5),
        side=1.0,
        gamma=2.0,
        rho=1.0,
        name="hilbert-square",
    )


def koch_curve() -> OrderedIFS:
    """Koch curve on the segment [0,1] with the 60-degree bump, ratio 1/3."""
    third = 1.0 / 3.0
    maps = (
        Similarity(third, 0.0, False, (0.0, 0.0)),
        Similarity(third, math.pi / 3.0, False, (third, 0.0)),
        Similarity(third, -math.pi / 3.0, False, (0.5, SQRT3 / 6.0)),
        Similarity(third, 0.0, False, (2.0 * third, 0.0)),
    )
    # rho: resolution-m boxes have side 3^-m * (|cos| + |sin|) at multiples
    # of pi/3, peaking at (1 + sqrt 3)/2.
    return OrderedIFS(
        maps=maps,
        shape="square",
        corner=(0.0, 0.0),
        side=1.0,
        gamma=math.log(4.0) / math.log(3.0),
        rho=(1.0 + SQRT3) / 2.0,
        name="koch",
    )


def minkowski_sausage() -> OrderedIFS:
    """Eight ratio-1/4 maps along the sausage seed on [0,1].

    The long middle edge counts double: maps 4 and 5 both point down, split
    at the axis crossing, keeping path order.
    """
    q = 0.25
    half_pi = math.pi / 2.0
    maps = (
        Similarity(q, 0.0, False, (0.0, 0.0)),
        Similarity(q, half_pi, False, (0.25, 0.0)),
        Similarity(q, 0.0, False, (0.25, 0.25)),
        Similarity(q, -half_pi, False, (0.5, 0.25)),
        Similarity(q, -half_pi, False, (0.5, 0.0)),
        Similarity(q, 0.0, False, (0.5, -0.25)),
        Similarity(q, half_pi, False, (0.75, -0.25)),
        Similarity(q, 0.0, False, (0.75, 0.0)),
    )
    side = 5.0 / 3.0
    return OrderedIFS(
        maps=maps,
        shape="square",
        corner=(-1.0 / 3.0, -5.0 / 6.0),
        side=side,
        gamma=1.5,
        rho=side,
        name="minkowski",
    )


def unit_interval() -> OrderedIFS:
    """Dyadic splitting of [0,1] embedded on the x-axis; the 1-D sanity system."""
    maps = (
        Similarity(0.5, 0.0, False, (0.0, 0.0)),
        Similarity(0.5, 0.0, False, (0.5, 0.0)),
    )
    return OrderedIFS(
        maps=maps,
        shape="square",
        corner=(0.0, 0.0),
        side=1.0,
        gamma=1.0,
        rho=1.0,
        name="unit-interval",
    )


def gap_dust() -> OrderedIFS:
    """Two ratio-1/4 maps with a gap: adjacency deliberately fails."""
    maps = (
        Similarity(0.25, 0.0, False, (0.0, 0.0)),
        Similarity(0.25, 0.0, False, (0.75, 0.0)),
    )
    return OrderedIFS(
        maps=maps,
        shape="square",
        corner=(0.0, 0.0),
        side=1.0,
        gamma=0.5,
        rho=1.0,
        name="gap-dust",
    )


@dataclass(frozen=True)
class CurveEvaluator:
    """A curve f: [0,1] -> R^2 with a Holder certificate.

    holder_beta/holder_rho certify ||f(x)-f(y)||_inf <= rho |x-y|^beta.
    breakpoints, when given, are the parameter values where a piecewise
    linear curve bends; bounding boxes over intervals then come out exact.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    holder_beta: float
    holder_rho: float
    name: str = ""
    breakpoints: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, ts: np.ndarray) -> np.ndarray:
        return self.eval(np.asarray(ts, dtype=float))


def diagonal_curve() -> CurveEvaluator:
    """f(t) = (t, t): the Lipschitz sanity curve."""

    def f(ts: np.ndarray) -> np.ndarray:
        return np.stack([ts, ts], axis=-1)

    return CurveEvaluator(f, holder_beta=1.0, holder_rho=1.0, name="holder-diag")


def _polyline_evaluator(
    vertices: np.ndarray, beta: float, rho: float, name: str
) -> CurveEvaluator:
    """Uniform-speed polygonal interpolant through equally spaced vertices."""
    n_seg = len(vertices) - 1
    ts_grid = np.linspace(0.0, 1.0, n_seg + 1)

    def f(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        x = np.interp(ts, ts_grid, vertices[:, 0])
        y = np.interp(ts, ts_grid, vertices[:, 1])
        return np.stack([x, y], axis=-1)

    return CurveEvaluator(f, holder_beta=beta, holder_rho=rho, name=name, breakpoints=ts_grid)


def _chain_vertices(ifs: OrderedIFS, start: np.ndarray, end: np.ndarray, order: int) -> np.ndarray:
    """Entry points of all depth-`order` parts in lexicographic order, plus the exit.

    Valid for systems whose maps chain phi_j(end) = phi_(j+1)(start); the
    returned polyline then visits the parts in covering order with segments
    of equal length ratio^order * |end - start|.
    """
    points: list[np.ndarray] = []

    def rec(sim: Similarity | None, depth: int) -> None:
        if depth == 0:
            points.append(start if sim is None else sim.apply(start))
            return
        for m in ifs.maps:
            rec(m if sim is None else sim.compose(m), depth - 1)

    rec(None, order)
    points.append(end)
    return np.asarray(points)


def arrowhead_pseudo(order: int) -> CurveEvaluator:
    """Order-m arrowhead polyline through the gasket parts, uniform speed.

    beta = log2/log3; rho = 4: parameter intervals of length 3^-k map into
    at most two chained parts of box side 2^-k, and within one segment the
    slope 1 * (3/2)^p * |x-y|^(1-beta) collapses to |x-y|^beta since
    3^beta = 2.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    ifs = sierpinski_gasket(1.0)
    verts = ifs.base_vertices()
    vertices = _chain_vertices(ifs, verts[0], verts[1], order)
    beta = math.log(2.0) / math.log(3.0)
    return _polyline_evaluator(vertices, beta, 4.0, f"arrowhead-pseudo:{order}")


def hilbert_pseudo(order: int) -> CurveEvaluator:
    """Order-m pseudo-Hilbert polyline; beta = 1/2, rho = 4."""
    if order < 1:
        raise ValueError("order must be >= 1")
    ifs = hilbert_square()
    start = np.array([-0.5, -0.5])
    end = np.array([0.5, -0.5])
    vertices = _chain_vertices(ifs, start, end, order)
    return _polyline_evaluator(vertices, 0.5, 4.0, f"hilbert-pseudo:{order}")


def _interval_samples(
    curve: CurveEvaluator, lo: float, hi: float, samples: int
) -> np.ndarray:
    ts = np.linspace(lo, hi, samples)
    if curve.breakpoints is not None:
        bp = curve.breakpoints
        inner = bp[(bp > lo) & (bp < hi)]
        if inner.size:
            ts = np.sort(np.concatenate([ts, inner]))
    return curve(ts)


def holder_dyadic_covering(
    curve: CurveEvaluator, m: int, samples_per_interval: int = 64
) -> list[CoveringPart]:
    """Bounding squares of f over the 2^m dyadic intervals, in dyadic order.

    Each part's side is at most rho * (2^-beta)^m by the Holder certificate.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    parts: list[CoveringPart] = []
    step = 0.5**m
    for j in range(2**m):
        entries = tuple((j >> (m - 1 - b)) % 2 + 1 for b in range(m))
        pts = _interval_samples(curve, j * step, (j + 1) * step, samples_per_interval)
        parts.append(part_from_vertices(MultiIndex(entries, 2), pts, m))
    return parts


def holder_covering_family(
    curve: CurveEvaluator, m_max: int, samples_per_interval: int = 64
) -> list[list[CoveringPart]]:
    """Coverings for every resolution 0..m_max; resolution 0 is one box."""
    pts = _interval_samples(curve, 0.0, 1.0, max(2, samples_per_interval) * 4)
    root = part_from_vertices(MultiIndex((), 2), pts, 0)
    out: list[list[CoveringPart]] = [[root]]
    for m in range(1, m_max + 1):
        out.append(holder_dyadic_covering(curve, m, samples_per_interval))
    return out


IFS_NAMES = ("sierpinski", "hilbert-square", "koch", "minkowski")


def zoo_ifs(name: str) -> OrderedIFS:
    """Look up a named system; raises KeyError for unknown names."""
    registry: dict[str, Callable[[], OrderedIFS]] = {
        "sierpinski": sierpinski_gasket,
        "hilbert-square": hilbert_square,
        "koch": koch_curve,
        "minkowski": minkowski_sausage,
    }
    if name not in registry:
        raise KeyError(name)
    return registry[name]()


def zoo_curve(name: str) -> CurveEvaluator:
    """Look up a named curve evaluator ("holder-diag", "arrowhead-pseudo:<order>")."""
    if name == "holder-diag":
        return diagonal_curve()
    if name.startswith("arrowhead-pseudo:"):
        return arrowhead_pseudo(int(name.split(":", 1)[1]))
    raise KeyError(name)


def zoo_names() -> list[str]:
    return list(IFS_NAMES) + ["holder-diag", "arrowhead-pseudo:<order>"]
