"""Ordered self-similar coverings and weighted-shift universality experiments.

The package is organized around one pipeline:

- ``geometry``: planar similarities, lexicographic multi-indices, box coverings.
- ``zoo``: ready-made ordered systems (gasket, Hilbert square, Koch, sausage)
  and Holder-curve dyadic coverings.
- ``hbd``: the three ordered-box-dimension conditions (diameter decay, nesting,
  consecutive-part adjacency) and their report.
- ``tagging``: the tagged covering with side schedule tau/(kN)^(1/gamma) and its
  rank/fineness bookkeeping.
- ``separation``: brute-force verification of the tagged covering's form, the
  pairwise separation inequality, and the jump-counting bound.
- ``shifts``: weighted backward/forward shift powers on truncated sequence
  spaces, the summability/Lipschitz checks, and the common-vector experiment.
- ``cli``: command-line front end (``orderedcover --help``).
"""

from __future__ import annotations

__version__ = "0.1.0"

from .geometry import (
    BudgetExceededError,
    CoveringPart,
    InvalidIndexError,
    MultiIndex,
    OrderedIFS,
    Similarity,
    apply_similarity,
    attractor_points,
    compose_part,
    lex_rank,
    lex_unrank,
    part_budget,
    resolution_covering,
)
from .hbd import hbd_report
from .separation import (
    coverage_check,
    verify_form,
    verify_jump_lemma,
    verify_separation,
)
from .shifts import (
    check_cs1_bounds,
    check_cs2_lipschitz,
    run_dynamics_experiment,
    weight_family,
)
from .tagging import (
    BuilderParams,
    build_tagged_covering,
    fineness_schedule,
    normalize_tau,
)
from .zoo import zoo_curve, zoo_ifs, zoo_names

__all__ = [
    "BudgetExceededError",
    "BuilderParams",
    "CoveringPart",
    "InvalidIndexError",
    "MultiIndex",
    "OrderedIFS",
    "Similarity",
    "apply_similarity",
    "attractor_points",
    "build_tagged_covering",
    "check_cs1_bounds",
    "check_cs2_lipschitz",
    "compose_part",
    "coverage_check",
    "fineness_schedule",
    "hbd_report",
    "lex_rank",
    "lex_unrank",
    "normalize_tau",
    "part_budget",
    "resolution_covering",
    "run_dynamics_experiment",
    "verify_form",
    "verify_jump_lemma",
    "verify_separation",
    "weight_family",
    "zoo_curve",
    "zoo_ifs",
    "zoo_names",
    "__version__",
]
