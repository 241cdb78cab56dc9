"""Data model for pooled-budget instances, and the shared welfare primitives.

Every money or utility quantity is a :class:`fractions.Fraction`. Project
subsets are passed around as ``frozenset`` of project indices in the public
API; the valuation classes also accept bitmasks internally (bit ``j`` set
means project ``j`` is funded).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Union

from poolpb.errors import (
    ArityMismatch,
    IndexOutOfRange,
    NegativeQuantity,
    NonMonotoneValuation,
    NotWpFundable,
    UncoverableProject,
)

log = logging.getLogger(__name__)

TABLE_MAX_PROJECTS = 20

RationalLike = Union[int, str, Fraction]


def as_rational(x) -> Fraction:
    """Coerce ``x`` to an exact Fraction. Floats are refused on purpose."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not quantities")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {x!r}") from exc
    if isinstance(x, float):
        raise TypeError(f"floating point value {x!r} refused; pass a string or Fraction")
    try:
        return Fraction(x)  # Decimal and friends
    except TypeError:
        raise TypeError(f"cannot interpret {x!r} as a rational") from None


def _rationals(xs) -> tuple:
    return tuple(as_rational(x) for x in xs)


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# Valuations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Additive:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", _rationals(self.values))

    kind = "additive"

    def arity(self) -> Optional[int]:
        return len(self.values)

    def value_mask(self, mask: int) -> Fraction:
        total = Fraction(0)
        j = 0
        while mask:
            if mask & 1:
                total += self.values[j]
            mask >>= 1
            j += 1
        return total

    def singleton(self, j: int) -> Fraction:
        return self.values[j]

    def numbers(self):
        return self.values

    def restrict(self, keep: Sequence[int]) -> "Additive":
        return Additive(tuple(self.values[j] for j in keep))


@dataclass(frozen=True)
class SingleMinded:
    """Worth ``value`` once every project of ``demand`` is funded, zero before."""

    demand: frozenset
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "demand", frozenset(int(j) for j in self.demand))
        object.__setattr__(self, "value", as_rational(self.value))

    kind = "single_minded"

    def arity(self) -> Optional[int]:
        return None

    @property
    def demand_mask(self) -> int:
        mask = 0
        for j in self.demand:
            mask |= 1 << j
        return mask

    def value_mask(self, mask: int) -> Fraction:
        d = self.demand_mask
        return self.value if mask & d == d else Fraction(0)

    def singleton(self, j: int) -> Fraction:
        return self.value if self.demand <= {j} else Fraction(0)

    def numbers(self):
        return (self.value,)

    def restrict(self, keep: Sequence[int]) -> "SingleMinded":
        where = {old: new for new, old in enumerate(keep)}
        if all(j in where for j in self.demand):
            return SingleMinded(frozenset(where[j] for j in self.demand), self.value)
        # a dropped project can never be funded, so the demand is unreachable
        return SingleMinded(frozenset(where[j] for j in self.demand if j in where), Fraction(0))


@dataclass(frozen=True)
class Symmetric:
    """Value depends only on how many projects are funded: ``by_count[len(W)]``."""

    by_count: tuple

    def __post_init__(self):
        object.__setattr__(self, "by_count", _rationals(self.by_count))

    kind = "symmetric"

    def arity(self) -> Optional[int]:
        return len(self.by_count) - 1

    def value_mask(self, mask: int) -> Fraction:
        return self.by_count[bin(mask).count("1")]

    def singleton(self, j: int) -> Fraction:
        return self.by_count[1]

    def numbers(self):
        return self.by_count

    def restrict(self, keep: Sequence[int]) -> "Symmetric":
        return Symmetric(self.by_count[: len(keep) + 1])


@dataclass(frozen=True)
class Table:
    """Explicit valuation; ``entries[mask]`` is the value of the subset ``mask``."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", _rationals(self.entries))
        size = len(self.entries)
        if size == 0 or size & (size - 1):
            raise ArityMismatch(f"table valuation needs 2^m entries, got {size}")

    kind = "table"

    @classmethod
    def from_function(cls, m: int, fn) -> "Table":
        return cls(tuple(fn(frozenset(j for j in range(m) if mask >> j & 1)) for mask in range(1 << m)))

    def arity(self) -> Optional[int]:
        return len(self.entries).bit_length() - 1

    def value_mask(self, mask: int) -> Fraction:
        return self.entries[mask]

    def singleton(self, j: int) -> Fraction:
        return self.entries[1 << j]

    def numbers(self):
        return self.entries

    def restrict(self, keep: Sequence[int]) -> "Table":
        out = []
        for mask in range(1 << len(keep)):
            old = 0
            for new, j in enumerate(keep):
                if mask >> new & 1:
                    old |= 1 << j
            out.append(self.entries[old])
        return Table(tuple(out))


Valuation = Union[Additive, SingleMinded, Symmetric, Table]


# --------------------------------------------------------------------------
# Instances and outcomes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Project:
    cost: Fraction
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "cost", as_rational(self.cost))


@dataclass(frozen=True)
class Agent:
    budget: Fraction
    valuation: Valuation

    def __post_init__(self):
        object.__setattr__(self, "budget", as_rational(self.budget))


@dataclass(frozen=True)
class Instance:
    projects: tuple
    agents: tuple

    def __post_init__(self):
        projects = tuple(p if isinstance(p, Project) else Project(p) for p in self.projects)
        object.__setattr__(self, "projects", projects)
        object.__setattr__(self, "agents", tuple(self.agents))

    @classmethod
    def build(cls, costs, budgets, valuations, names=None) -> "Instance":
        """Shorthand: parallel lists of costs, budgets and valuations.

        Plain sequences given as valuations are read as additive rows.
        """
        names = names or [None] * len(costs)
        vals = [v if isinstance(v, (Additive, SingleMinded, Symmetric, Table)) else Additive(v) for v in valuations]
        return cls(
            tuple(Project(c, nm) for c, nm in zip(costs, names)),
            tuple(Agent(b, v) for b, v in zip(budgets, vals)),
        )

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.projects)

    @property
    def costs(self) -> tuple:
        return tuple(p.cost for p in self.projects)

    @property
    def budgets(self) -> tuple:
        return tuple(a.budget for a in self.agents)

    @property
    def valuations(self) -> tuple:
        return tuple(a.valuation for a in self.agents)

    def total_budget(self) -> Fraction:
        return sum(self.budgets, Fraction(0))

    def cost_of(self, W) -> Fraction:
        mask = to_mask(W, self.m)
        return sum((p.cost for j, p in enumerate(self.projects) if mask >> j & 1), Fraction(0))

    def project_index(self, name: str) -> int:
        for j, p in enumerate(self.projects):
            if p.name == name:
                return j
        raise KeyError(name)

    def valuation_kinds(self) -> set:
        return {a.valuation.kind for a in self.agents}


@dataclass(frozen=True)
class Outcome:
    funded: frozenset
    payments: tuple

    def __post_init__(self):
        object.__setattr__(self, "funded", frozenset(self.funded))
        object.__setattr__(self, "payments", _rationals(self.payments))


@dataclass(frozen=True)
class SolveReport:
    outcome: Outcome
    welfare: Fraction
    excess: Fraction
    algorithm: str
    epsilon: Optional[Fraction] = None
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def funded(self) -> frozenset:
        return self.outcome.funded


# --------------------------------------------------------------------------
# Subset helpers
# --------------------------------------------------------------------------


def to_mask(W, m: Optional[int] = None) -> int:
    if isinstance(W, int) and not isinstance(W, bool):
        if W < 0 or (m is not None and W >> m):
            raise IndexOutOfRange(f"mask {W} outside {m} projects")
        return W
    mask = 0
    for j in W:
        j = int(j)
        if j < 0 or (m is not None and j >= m):
            raise IndexOutOfRange(f"project index {j} outside [0, {m})")
        mask |= 1 << j
    return mask


def from_mask(mask: int) -> frozenset:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


def _check_valuation(i: int, v: Valuation, m: int) -> None:
    ar = v.arity()
    if isinstance(v, SingleMinded):
        bad = [j for j in v.demand if j < 0 or j >= m]
        if bad:
            raise ArityMismatch(f"agent {i}: demand set mentions projects {sorted(bad)} but m={m}")
    elif ar != m:
        raise ArityMismatch(f"agent {i}: {v.kind} valuation has arity {ar}, expected {m}")
    for x in v.numbers():
        if x < 0:
            raise NegativeQuantity(f"agent {i}: negative valuation entry {x}")
    if isinstance(v, Symmetric):
        bc = v.by_count
        if bc[0] != 0 or any(bc[k] > bc[k + 1] for k in range(len(bc) - 1)):
            raise NonMonotoneValuation(f"agent {i}: symmetric profile {tuple(map(str, bc))} must start at 0 and not decrease")
    elif isinstance(v, Table):
        if m > TABLE_MAX_PROJECTS:
            raise ArityMismatch(f"agent {i}: table valuations are capped at {TABLE_MAX_PROJECTS} projects")
        e = v.entries
        if e[0] != 0:
            raise NonMonotoneValuation(f"agent {i}: table value of the empty set must be 0")
        for mask in range(len(e)):
            for j in range(m):
                if not mask >> j & 1 and e[mask] > e[mask | 1 << j]:
                    raise NonMonotoneValuation(f"agent {i}: table decreases when adding project {j} to {sorted(from_mask(mask))}")


def validate_instance(raw: Instance, drop_uncoverable: bool = True, check_coverage: bool = True) -> Instance:
    """Check an instance and optionally drop projects nobody values enough.

    A project ``j`` is *uncoverable* when ``sum_i v_i({j}) < C_j``. With
    ``drop_uncoverable`` such projects are removed (remaining projects are
    re-indexed in order, and a warning is logged); otherwise
    :class:`UncoverableProject` is raised. ``check_coverage=False`` skips the
    test entirely, which is what complementary valuations (single-minded
    demand sets of size two or more) need since their singleton values are 0.
    """
    m = raw.m
    for j, p in enumerate(raw.projects):
        if p.cost < 0:
            raise NegativeQuantity(f"project {j}: negative cost {p.cost}")
    for i, a in enumerate(raw.agents):
        if a.budget < 0:
            raise NegativeQuantity(f"agent {i}: negative budget {a.budget}")
        _check_valuation(i, a.valuation, m)
    if not check_coverage:
        return raw

    uncovered = []
    for j, p in enumerate(raw.projects):
        if sum((a.valuation.singleton(j) for a in raw.agents), Fraction(0)) < p.cost:
            uncovered.append(j)
    if not uncovered:
        return raw
    if not drop_uncoverable:
        raise UncoverableProject(f"projects {uncovered} cost more than their total value")
    labels = [raw.projects[j].name if raw.projects[j].name is not None else j for j in uncovered]
    log.warning("dropping %d uncoverable project(s): %s", len(uncovered), labels)
    keep = [j for j in range(m) if j not in set(uncovered)]
    return Instance(
        tuple(raw.projects[j] for j in keep),
        tuple(Agent(a.budget, a.valuation.restrict(keep)) for a in raw.agents),
    )


# --------------------------------------------------------------------------
# Welfare primitives
# --------------------------------------------------------------------------


def eval_valuation(v: Valuation, W, m: Optional[int] = None) -> Fraction:
    if m is None:
        m = v.arity()
    return v.value_mask(to_mask(W, m))


def social_welfare(I: Instance, W) -> Fraction:
    """Total value of ``W`` minus its cost. Can be negative."""
    mask = to_mask(W, I.m)
    total = sum((a.valuation.value_mask(mask) for a in I.agents), Fraction(0))
    return total - I.cost_of(mask)


def payment_excess(I: Instance, W) -> Fraction:
    """Money left over after funding ``W`` with every agent capped by both
    budget and value. Non-negative exactly when ``W`` can be paid for without
    anyone paying more than they gain."""
    mask = to_mask(W, I.m)
    total = Fraction(0)
    for a in I.agents:
        total += min(a.budget, a.valuation.value_mask(mask))
    return total - I.cost_of(mask)


def prefix_fill(caps: Sequence[Fraction], target: Fraction) -> tuple:
    """Pay ``caps`` in order until ``target`` is reached exactly; the rest pay 0."""
    out = []
    remaining = target
    for c in caps:
        pay = min(c, remaining) if remaining > 0 else Fraction(0)
        out.append(pay)
        remaining -= pay
    if remaining > 0:
        raise NotWpFundable(f"caps fall short of {target} by {remaining}")
    return tuple(out)


def wp_payments(I: Instance, W) -> tuple:
    """Budget-balanced payments for ``W`` under which nobody loses utility."""
    mask = to_mask(W, I.m)
    caps = [min(a.budget, a.valuation.value_mask(mask)) for a in I.agents]
    cost = I.cost_of(mask)
    if sum(caps, Fraction(0)) < cost:
        raise NotWpFundable(f"{sorted(from_mask(mask))} has negative payment excess")
    return prefix_fill(caps, cost)


def agent_utility(I: Instance, o: Outcome, i: int) -> Fraction:
    if not 0 <= i < I.n:
        raise IndexOutOfRange(f"agent index {i} outside [0, {I.n})")
    return I.agents[i].valuation.value_mask(to_mask(o.funded, I.m)) - o.payments[i]


def outcome_problems(I: Instance, o: Outcome, require_wp: bool = False) -> list:
    """List every violated outcome invariant (empty list means valid)."""
    problems = []
    if len(o.payments) != I.n:
        return [f"payment vector has length {len(o.payments)}, expected {I.n}"]
    try:
        mask = to_mask(o.funded, I.m)
    except IndexOutOfRange as exc:
        return [str(exc)]
    for i, (x, a) in enumerate(zip(o.payments, I.agents)):
        if x < 0:
            problems.append(f"agent {i} pays a negative amount {x}")
        if x > a.budget:
            problems.append(f"agent {i} pays {x} above budget {a.budget}")
        if require_wp and x > a.valuation.value_mask(mask):
            problems.append(f"agent {i} pays {x} above value {a.valuation.value_mask(mask)}")
    paid = sum(o.payments, Fraction(0))
    if paid != I.cost_of(mask):
        problems.append(f"payments total {paid} but funded cost is {I.cost_of(mask)}")
    return problems


def make_report(I: Instance, W, payments, algorithm: str, epsilon=None, **notes) -> SolveReport:
    W = frozenset(W)
    return SolveReport(
        outcome=Outcome(W, payments),
        welfare=social_welfare(I, W),
        excess=payment_excess(I, W),
        algorithm=algorithm,
        epsilon=None if epsilon is None else as_rational(epsilon),
        notes=notes,
    )
