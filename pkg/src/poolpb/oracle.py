"""Exhaustive solvers over every project subset.

These are the ground truth for tests and for the welfare-ratio
denominators of the experiment harness. Ties go to the subset with fewer
projects, then to the lexicographically smallest sorted index tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from poolpb import kernels
from poolpb.core import Instance, from_mask, to_mask
from poolpb.errors import TooManyProjects

MAX_PROJECTS = 25

_UWO, _UWO_WP, _MAXPE = 0, 1, 2


@dataclass(frozen=True)
class OracleResult:
    best: frozenset
    objective: Fraction
    tie_count: int


def _search(I: Instance, mode: int, required=(), backend=None) -> OracleResult:
    if I.m > MAX_PROJECTS:
        raise TooManyProjects(f"brute force is capped at {MAX_PROJECTS} projects, instance has {I.m}")
    S = kernels.ScaledInstance(I)
    mask, obj, ties = kernels.subset_search(S, mode, to_mask(required, I.m), backend=backend)
    if mask < 0:
        return None
    return OracleResult(from_mask(int(mask)), S.unscale(int(obj)), int(ties))


def brute_uwo(I: Instance, backend=None) -> OracleResult:
    """Welfare-optimal subset among those the pooled budget can pay for."""
    return _search(I, _UWO, backend=backend)


def brute_uwo_wp(I: Instance, backend=None, superset_of=()) -> OracleResult:
    """Welfare-optimal subset among those with non-negative payment excess.

    ``superset_of`` restricts the search to supersets of the given projects;
    ``None`` is returned if no such superset is fundable.
    """
    return _search(I, _UWO_WP, superset_of, backend=backend)


def brute_maxpe(I: Instance, backend=None) -> OracleResult:
    """Subset maximising the payment excess (the empty set scores 0)."""
    return _search(I, _MAXPE, backend=backend)
