"""Constructive tagged covering with side schedule tau/(kN)^(1/gamma).

The construction covers the attractor by q = r^t squares Gamma_k anchored at
part corners, with t = r(r^s - 1)/(r - 1):

- Gamma_1 covers the first rank-s part with side tau/N^alpha = c^s rho.
- Stage j in {1..t} spends the indices k in (r^(j-1), r^j]: the next (r-1)
  pending rank-(s+1) parts are each covered through their r^(j-1)
  resolution-(s+j) descendants, one square per descendant, in lexicographic
  order. Sides shrink monotonically and land exactly on c^(s+j) rho at the
  stage ends k = r^j.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .geometry import (
    BudgetExceededError,
    CoveringPart,
    MultiIndex,
    OrderedIFS,
    compose_part,
    iter_indices,
    part_budget,
)
from .hbd import hbd_report

_S_TOL = 1e-9


@dataclass(frozen=True)
class BuilderParams:
    """Normalized construction parameters.

    tau and bigN must satisfy tau/N^alpha = c^s rho for an integer s >= 1;
    use normalize_tau (or from_stage) to produce such a pair. proof_safe
    additionally demands the safe-margin inequality 3(r-1)^alpha c^s <= 1
    and D >= rho/c^3; the construction itself only needs the exact side
    relation, and the worked small-q examples run with proof_safe False.
    """

    tau: float
    bigN: int
    D: float
    gamma: float
    r: int
    rho: float

    def __post_init__(self) -> None:
        if self.tau <= 0 or self.rho <= 0 or self.D <= 0 or self.gamma <= 0:
            raise ValueError("tau, rho, D, gamma must be positive")
        if self.bigN < 1 or self.r < 2:
            raise ValueError("bigN >= 1 and r >= 2 required")

    @property
    def alpha(self) -> float:
        return 1.0 / self.gamma

    @property
    def c(self) -> float:
        return self.r ** (-self.alpha)

    @property
    def s(self) -> int:
        """Integer s with tau/N^alpha = c^s rho; raises if none exists."""
        ratio = self.tau / self.bigN**self.alpha / self.rho
        s = math.log(ratio) / math.log(self.c)
        s_int = round(s)
        if s_int < 1 or abs(s - s_int) > 1e-6:
            raise ValueError(
                f"tau/N^alpha = {ratio * self.rho!r} is not c^s rho for integer s >= 1; "
                "apply normalize_tau first"
            )
        return s_int

    @property
    def proof_safe(self) -> bool:
        margin_ok = 3.0 * (self.r - 1) ** self.alpha * self.c**self.s <= 1.0 + _S_TOL
        d_ok = self.D >= self.rho / self.c**3 - _S_TOL
        return margin_ok and d_ok

    @classmethod
    def from_stage(
        cls, ifs: OrderedIFS, s: int, bigN: int, D: float | None = None
    ) -> "BuilderParams":
        """Exact parameters for a chosen subdivision depth s."""
        if s < 1:
            raise ValueError("s must be >= 1")
        alpha = 1.0 / ifs.gamma
        c = ifs.r ** (-alpha)
        tau = c**s * ifs.rho * bigN**alpha
        if D is None:
            D = ifs.rho / c**3
        return cls(tau=tau, bigN=bigN, D=D, gamma=ifs.gamma, r=ifs.r, rho=ifs.rho)


def normalize_tau(
    tau: float, bigN: int, rho: float, c: float, r: int, alpha: float
) -> tuple[int, float]:
    """Smallest s with c^s rho <= tau/N^alpha and 3(r-1)^alpha c^s <= 1.

    Returns (s, tau') with tau' = c^s rho N^alpha <= tau.
    """
    if tau <= 0 or rho <= 0:
        raise ValueError("tau and rho must be positive")
    target = tau / bigN**alpha
    margin = 3.0 * (r - 1) ** alpha
    s = 0
    while not (c**s * rho <= target * (1.0 + _S_TOL) and margin * c**s <= 1.0 + _S_TOL):
        s += 1
    return s, c**s * rho * bigN**alpha


@dataclass(frozen=True)
class FinenessGroup:
    """Contiguous k-span of squares covering one rank-`rank` subdivision part."""

    rank: int
    fineness: int
    ordinal: int
    k_from: int
    k_to: int

    @property
    def span(self) -> int:
        return self.k_to - self.k_from + 1

    def to_record(self) -> dict:
        return {
            "rank": self.rank,
            "fineness": self.fineness,
            "ordinal": self.ordinal,
            "k_from": self.k_from,
            "k_to": self.k_to,
        }


def fineness_schedule(
    r: int, s: int, budget: int | None = None
) -> tuple[list[FinenessGroup], int, int]:
    """Group bookkeeping for (r, s): returns (groups, t, q).

    Stage j contributes, for each of its (r-1) rank-(s+1) parts, one group of
    fineness r^(j-1) plus sub-groups at each deeper rank down to fineness 1.
    Ordinals count groups within each (rank, fineness) class. The group count
    scales with q, so the part budget is enforced before anything is built.
    """
    if r < 2 or s < 1:
        raise ValueError("need r >= 2 and s >= 1")
    assert (r**s - 1) % (r - 1) == 0
    t = r * (r**s - 1) // (r - 1)
    q = r**t
    limit = part_budget(budget)
    if q > limit:
        raise BudgetExceededError(f"q = r^t = {q} exceeds budget {limit}")
    groups: list[FinenessGroup] = [FinenessGroup(s, 1, 1, 1, 1)]
    ordinals: dict[tuple[int, int], int] = {}
    k = 2
    for j in range(1, t + 1):
        for _ in range(r - 1):
            for sub in range(1, j + 1):  # rank s+sub, fineness r^(j-sub)
                fineness = r ** (j - sub)
                rank = s + sub
                n_blocks = r ** (sub - 1)
                for b in range(n_blocks):
                    key = (rank, fineness)
                    ordinals[key] = ordinals.get(key, 0) + 1
                    k_from = k + b * fineness
                    groups.append(
                        FinenessGroup(rank, fineness, ordinals[key], k_from, k_from + fineness - 1)
                    )
            k += r ** (j - 1)
    assert k == q + 1
    return groups, t, q


@dataclass(frozen=True)
class TaggedSquare:
    """Square Gamma_k = [x, x+side] x [y, y+side] tagged at a part corner."""

    k: int
    tag: tuple[float, float]
    side: float
    covered_index: MultiIndex
    rank: int
    stage: int

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.tag, dtype=float)
        return lo, lo + self.side

    def corners(self) -> np.ndarray:
        lo, hi = self.box()
        return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])

    def to_record(self) -> dict:
        return {
            "k": self.k,
            "tag": [self.tag[0], self.tag[1]],
            "side": self.side,
            "rank": self.rank,
            "stage": self.stage,
            "covered_index": list(self.covered_index.entries),
        }


@dataclass(frozen=True)
class TaggedCovering:
    """The full output: q tagged squares plus schedule bookkeeping."""

    fractal: str
    tau: float
    bigN: int
    D: float
    gamma: float
    r: int
    rho: float
    s: int
    t: int
    q: int
    squares: tuple[TaggedSquare, ...]
    groups: tuple[FinenessGroup, ...] = field(repr=False)

    @property
    def alpha(self) -> float:
        return 1.0 / self.gamma

    @property
    def c(self) -> float:
        return self.r ** (-self.alpha)

    def tags(self) -> np.ndarray:
        return np.array([sq.tag for sq in self.squares])

    def sides(self) -> np.ndarray:
        return np.array([sq.side for sq in self.squares])

    def affine_scaled(self, sigma: float, offset: tuple[float, float]) -> "TaggedCovering":
        """Map every square by p -> offset + sigma * p; D and rho scale by sigma."""
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        off = np.asarray(offset, dtype=float)
        squares = tuple(
            TaggedSquare(
                k=sq.k,
                tag=(float(off[0] + sigma * sq.tag[0]), float(off[1] + sigma * sq.tag[1])),
                side=sigma * sq.side,
                covered_index=sq.covered_index,
                rank=sq.rank,
                stage=sq.stage,
            )
            for sq in self.squares
        )
        return TaggedCovering(
            fractal=self.fractal,
            tau=sigma * self.tau,
            bigN=self.bigN,
            D=sigma * self.D,
            gamma=self.gamma,
            r=self.r,
            rho=sigma * self.rho,
            s=self.s,
            t=self.t,
            q=self.q,
            squares=squares,
            groups=self.groups,
        )

    def to_record(self) -> dict:
        return {
            "fractal": self.fractal,
            "tau": self.tau,
            "bigN": self.bigN,
            "D": self.D,
            "gamma": self.gamma,
            "r": self.r,
            "rho": self.rho,
            "s": self.s,
            "t": self.t,
            "q": self.q,
            "squares": [sq.to_record() for sq in self.squares],
            "groups": [g.to_record() for g in self.groups],
        }


def pending_after_stage(r: int, s: int, j: int) -> int:
    """Rank-(s+1) parts still uncovered once stage j is done."""
    return r * (r**s - 1) - j * (r - 1)


def build_tagged_covering(
    ifs: OrderedIFS,
    params: BuilderParams,
    budget: int | None = None,
    check_hbd: bool = True,
) -> TaggedCovering:
    """Run the construction; raises on bad parameters or budget overrun."""
    if params.r != ifs.r:
        raise ValueError(f"params.r={params.r} but system has r={ifs.r}")
    if abs(params.gamma - ifs.gamma) > 1e-12 or abs(params.rho - ifs.rho) > 1e-12:
        raise ValueError("params gamma/rho must match the system")
    if params.D < params.rho / params.c**3 - _S_TOL:
        raise ValueError(
            f"D={params.D} below rho/c^3={params.rho / params.c ** 3}; "
            "the separation bound needs the full constant (no recursive splitting here)"
        )
    s = params.s  # validates the exact side relation
    groups, t, q = fineness_schedule(params.r, s, budget)
    if check_hbd:
        report = hbd_report(ifs, params.gamma, params.rho, max(2, s + t), budget=budget)
        if not report.passed:
            fail = report.first_failure()
            raise ValueError(f"system fails dimension condition {fail.condition} at m={fail.m}")

    r, alpha = params.r, params.alpha
    scale = params.tau / params.bigN**alpha  # = c^s rho

    def side_of(k: int) -> float:
        return params.tau / (k * params.bigN) ** alpha

    first_index = MultiIndex((1,) * s, r)
    first_part = compose_part(ifs, first_index)
    squares = [
        TaggedSquare(1, first_part.corner, scale, first_index, s, 0)
    ]
    if first_part.side > scale + _S_TOL:
        raise AssertionError("rank-s part exceeds its covering square")

    skip = first_index.entries
    pending = deque(
        idx for idx in iter_indices(s + 1, r) if idx.entries[: s] != skip
    )
    k = 2
    for j in range(1, t + 1):
        for _ in range(r - 1):
            parent = pending.popleft()
            for suffix in iter_indices(j - 1, r):
                child = MultiIndex(parent.entries + suffix.entries, r)
                part = compose_part(ifs, child)
                side = side_of(k)
                if part.side > side + _S_TOL:
                    raise AssertionError(f"square {k} smaller than its covered part")
                squares.append(TaggedSquare(k, part.corner, side, child, s + j, j))
                k += 1
    assert not pending and k == q + 1

    return TaggedCovering(
        fractal=ifs.name,
        tau=params.tau,
        bigN=params.bigN,
        D=params.D,
        gamma=params.gamma,
        r=params.r,
        rho=params.rho,
        s=s,
        t=t,
        q=q,
        squares=tuple(squares),
        groups=tuple(groups),
    )
