"""Backend selection for the hot loops, plus exact rational-to-integer scaling.

The compiled module is used when it imported cleanly and every scaled
quantity fits comfortably in a signed 64-bit integer; otherwise the
pure-Python reference runs on arbitrary-precision ints. Set
``POOLPB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm

from poolpb import _pykernels
from poolpb.core import Additive, Instance, SingleMinded, Symmetric, Table
from poolpb.errors import TableTooLarge

try:
    if os.environ.get("POOLPB_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    import numpy as np

    from poolpb import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"
INT64_SAFE = 1 << 61
DP_CELL_LIMIT = 40_000_000


def common_denominator(values) -> int:
    d = 1
    for x in values:
        d = lcm(d, Fraction(x).denominator)
    return d


def scale(values, denom: int) -> list:
    out = []
    for x in values:
        x = Fraction(x)
        out.append(x.numerator * (denom // x.denominator))
    return out


class ScaledInstance:
    """Integer image of an instance: every quantity multiplied by ``denom``.

    Agents are grouped by valuation class so the search kernel can stream
    through them without dispatch.
    """

    def __init__(self, I: Instance):
        nums = list(I.costs) + list(I.budgets)
        for a in I.agents:
            nums.extend(a.valuation.numbers())
        self.denom = d = common_denominator(nums)
        self.m = I.m
        self.costs = scale(I.costs, d)
        self.add_b, self.add_v = [], []
        self.sm_b, self.sm_mask, self.sm_z = [], [], []
        self.sym_b, self.sym_v = [], []
        self.tab_b, self.tab_v = [], []
        bound = sum(abs(c) for c in self.costs)
        for a in I.agents:
            b = a.budget.numerator * (d // a.budget.denominator)
            v = a.valuation
            bound += b
            if isinstance(v, Additive):
                row = scale(v.values, d)
                self.add_b.append(b)
                self.add_v.extend(row)
                bound += sum(row)
            elif isinstance(v, SingleMinded):
                self.sm_b.append(b)
                self.sm_mask.append(v.demand_mask)
                z = scale([v.value], d)[0]
                self.sm_z.append(z)
                bound += z
            elif isinstance(v, Symmetric):
                row = scale(v.by_count, d)
                self.sym_b.append(b)
                self.sym_v.extend(row)
                bound += max(row)
            elif isinstance(v, Table):
                row = scale(v.entries, d)
                self.tab_b.append(b)
                self.tab_v.extend(row)
                bound += max(row)
            else:  # pragma: no cover - closed union
                raise TypeError(type(v))
        self.cap = sum(self.add_b) + sum(self.sm_b) + sum(self.sym_b) + sum(self.tab_b)
        self.bound = bound
        self.fits_int64 = bound < INT64_SAFE

    def unscale(self, x: int) -> Fraction:
        return Fraction(x, self.denom)

    def excess_and_welfare(self, mask: int) -> tuple:
        """Scaled ``(payment excess, welfare)`` of one subset, in Python ints."""
        m = self.m
        cost = 0
        bits = []
        for j in range(m):
            if mask >> j & 1:
                cost += self.costs[j]
                bits.append(j)
        cnt = len(bits)
        val = pe = 0
        for i, b in enumerate(self.add_b):
            base = i * m
            v = sum(self.add_v[base + j] for j in bits)
            val += v
            pe += v if v < b else b
        for b, d, z in zip(self.sm_b, self.sm_mask, self.sm_z):
            if mask & d == d:
                val += z
                pe += z if z < b else b
        for i, b in enumerate(self.sym_b):
            v = self.sym_v[i * (m + 1) + cnt]
            val += v
            pe += v if v < b else b
        size = 1 << m
        for i, b in enumerate(self.tab_b):
            v = self.tab_v[i * size + mask]
            val += v
            pe += v if v < b else b
        return pe - cost, val - cost


def _i64(xs):
    return np.asarray(xs, dtype=np.int64) if xs else np.zeros(0, dtype=np.int64)


def subset_search(S: ScaledInstance, mode: int, required: int = 0, backend: str | None = None):
    """Exhaustive search over all project subsets; see ``_pykernels.subset_search``."""
    args = (S.costs, S.add_b, S.add_v, S.sm_b, S.sm_mask, S.sm_z, S.sym_b, S.sym_v, S.tab_b, S.tab_v)
    use_c = _choose(backend) and S.fits_int64 and S.m <= 40
    if use_c:
        return _ckernels.subset_search(mode, S.m, S.cap, required, *[_i64(a) for a in args])
    return _pykernels.subset_search(mode, S.m, S.cap, required, *args)


def skip_knapsack(weights, profits, jump, capacity, backend: str | None = None):
    """Integer knapsack where taking item ``i`` continues at ``jump[i]``."""
    n = len(weights)
    if any(w < 0 for w in weights) or any(p < 0 for p in profits):
        raise ValueError("weights and profits must be non-negative")
    if any(not i < j <= n for i, j in enumerate(jump)):
        raise ValueError("jump targets must move forward")
    cells = (n + 1) * (sum(profits) + 1)
    if cells > DP_CELL_LIMIT:
        raise TableTooLarge(f"dynamic program needs {cells} cells (limit {DP_CELL_LIMIT}); raise epsilon")
    weights = [min(w, capacity + 1) for w in weights]
    if _choose(backend) and capacity < INT64_SAFE:
        best, chosen = _ckernels.skip_knapsack(_i64(weights), _i64(profits), _i64(jump), capacity)
        return int(best), [int(i) for i in chosen]
    return _pykernels.skip_knapsack(weights, profits, jump, capacity)


def _choose(backend):
    if backend == "python":
        return False
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return True
    return _ckernels is not None
