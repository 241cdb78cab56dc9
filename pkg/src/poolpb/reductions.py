"""Instance transformations: knapsack encodings used by the solvers, and the
hardness constructions kept as adversarial instance generators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from poolpb import kernels
from poolpb.core import Additive, Agent, Instance, Project, SingleMinded, Symmetric, Table, as_rational
from poolpb.errors import ArityMismatch, InputError, UniverseNotDivisibleBy3, WrongValuationClass
from poolpb.knapsack import KcgInstance, KnapsackInstance, LaminarForest
from poolpb.solvers import SingleMindedView, SukpInstance


@dataclass(frozen=True)
class PartitionInstance:
    numbers: tuple

    def __post_init__(self):
        object.__setattr__(self, "numbers", tuple(int(a) for a in self.numbers))
        if any(a <= 0 for a in self.numbers):
            raise InputError("partition numbers must be positive integers")

    def has_equal_split(self) -> bool:
        total = sum(self.numbers)
        if total % 2:
            return False
        reachable = {0}
        for a in self.numbers:
            reachable |= {r + a for r in reachable}
        return total // 2 in reachable


@dataclass(frozen=True)
class X3cInstance:
    universe_size: int
    triples: tuple

    def __post_init__(self):
        triples = tuple(frozenset(t) for t in self.triples)
        for t in triples:
            if len(t) != 3 or any(not 0 <= z < self.universe_size for z in t):
                raise InputError(f"triple {sorted(t)} is not 3 distinct elements of the universe")
        object.__setattr__(self, "triples", triples)

    def has_exact_cover(self) -> bool:
        n = self.universe_size
        if n % 3:
            return False
        q = n // 3
        full = frozenset(range(n))
        for pick in combinations(range(len(self.triples)), q):
            covered = frozenset().union(*(self.triples[k] for k in pick))
            if covered == full:
                return True
        return False


# --------------------------------------------------------------------------
# Knapsack encoding of unconstrained welfare maximisation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UwoKnapsack:
    knapsack: KnapsackInstance
    projects: tuple  # knapsack item k is project projects[k]
    denom: int

    def welfare(self, items) -> Fraction:
        return Fraction(sum(self.knapsack.profits[k] for k in items), self.denom)


def uwo_to_knapsack(I: Instance) -> UwoKnapsack:
    """Items are projects: weight = cost, profit = welfare (floored at 0),
    capacity = pooled budget. All money is scaled by one common denominator."""
    if any(a.valuation.kind != "additive" for a in I.agents):
        raise WrongValuationClass("the knapsack encoding needs additive valuations")
    welfare = [sum((a.valuation.values[j] for a in I.agents), Fraction(0)) - I.costs[j] for j in range(I.m)]
    profits = [max(Fraction(0), w) for w in welfare]
    cap = I.total_budget()
    denom = kernels.common_denominator(list(I.costs) + profits + [cap])
    K = KnapsackInstance(
        tuple(kernels.scale(I.costs, denom)),
        tuple(kernels.scale(profits, denom)),
        kernels.scale([cap], denom)[0],
    )
    return UwoKnapsack(K, tuple(range(I.m)), denom)


# --------------------------------------------------------------------------
# Gap-introducing transformation
# --------------------------------------------------------------------------


def _shift(v, m: int):
    """Re-express ``v`` over ``m + 1`` projects with a worthless new project 0."""
    if isinstance(v, Additive):
        return Additive((Fraction(0),) + v.values)
    if isinstance(v, SingleMinded):
        return SingleMinded(frozenset(j + 1 for j in v.demand), v.value)
    if isinstance(v, Symmetric):
        if m + 1 > 20:
            raise WrongValuationClass("symmetric valuations cannot absorb a new project beyond 20 projects")
        v = Table.from_function(m, lambda W: v.by_count[len(W)])
    if isinstance(v, Table):
        return Table(tuple(v.entries[mask >> 1] for mask in range(1 << (m + 1))))
    raise TypeError(type(v))


def gap_transform(I: Instance, t, gap_factor) -> Instance:
    """Add a budgetless agent who alone values a new project of cost ``t``.

    The new agent and project are inserted at index 0. The new agent values
    the new project at ``2 * gap_factor * sum_i v_i(M)``, so funding it
    dwarfs everything else exactly when ``t`` can be extracted from the
    original agents.
    """
    t = as_rational(t)
    g = as_rational(gap_factor)
    if g <= 0:
        raise InputError("gap factor must be positive")
    full = (1 << I.m) - 1
    total = sum((a.valuation.value_mask(full) for a in I.agents), Fraction(0))
    big = 2 * g * total
    if I.agents and all(a.valuation.kind == "single_minded" for a in I.agents):
        newcomer = SingleMinded(frozenset({0}), big)
    else:
        newcomer = Additive((big,) + (Fraction(0),) * I.m)
    projects = (Project(t, "gap"),) + I.projects
    agents = (Agent(Fraction(0), newcomer),) + tuple(Agent(a.budget, _shift(a.valuation, I.m)) for a in I.agents)
    return Instance(projects, agents)


# --------------------------------------------------------------------------
# Hardness constructions
# --------------------------------------------------------------------------


def partition_to_maxpe(P: PartitionInstance):
    """One agent valuing item ``i`` at ``a_i`` with budget half the total;
    project ``i`` costs ``a_i / 2``. Returns ``(instance, threshold)``."""
    a = P.numbers
    gamma = Fraction(sum(a), 2)
    I = Instance.build([Fraction(x, 2) for x in a], [gamma], [Additive(a)])
    return I, gamma / 2


def x3c_to_maxpe(X: X3cInstance) -> Instance:
    """One agent per element, one unit-cost project per triple; the decision
    threshold is 1."""
    n = X.universe_size
    if n % 3:
        raise UniverseNotDivisibleBy3(f"universe size {n} is not a multiple of 3")
    share = Fraction(1, 3) + Fraction(1, n)
    valuations = [Additive(tuple(share if z in t else Fraction(0) for t in X.triples)) for z in range(n)]
    return Instance.build([1] * len(X.triples), [share] * n, valuations)


# --------------------------------------------------------------------------
# Knapsack-with-conflicts encodings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KcgReduction:
    kcg: KcgInstance
    forest: LaminarForest
    node_agents: tuple  # merged agent behind each node, None for node 0
    raw_profits: tuple  # profits before flooring at 0


def laminar_to_kcg(view: SingleMindedView, Q, pe_q, costs) -> KcgReduction:
    """Conflict-knapsack encoding of "extend the maximum-excess set ``Q``".

    Node 0 stands for everything already inside ``Q`` (profit: welfare of
    ``Q``, weight 0). Node ``a + 1`` stands for adding merged agent ``a``'s
    demand set: its profit is the value it unlocks outside ``Q`` minus the
    new cost, its weight is the new cost minus what the agents inside the
    demand set can pay. Capacity is the excess of ``Q``; comparable demand
    sets conflict. Negative profits are floored at 0 in the instance (such
    nodes never help) and kept verbatim in ``raw_profits``.
    """
    Q = frozenset(Q)
    pe_q = as_rational(pe_q)
    costs = [as_rational(c) for c in costs]
    if any(j >= len(costs) for d in view.demands for j in d):
        raise ArityMismatch("demand set mentions a project without a cost")

    def C(S):
        return sum((costs[j] for j in S), Fraction(0))

    k = len(view)
    outside = [a for a in range(k) if not view.demands[a] <= Q]
    caps = view.caps()
    profits = [sum((view.values[a] for a in range(k) if view.demands[a] <= Q), Fraction(0)) - C(Q)]
    weights = [Fraction(0)]
    for a in range(k):
        D = view.demands[a]
        new = D - Q
        profits.append(sum((view.values[b] for b in outside if view.demands[b] <= D | Q), Fraction(0)) - C(new))
        weights.append(C(new) - sum((caps[b] for b in outside if view.demands[b] <= D), Fraction(0)))
    if any(w < 0 for w in weights):
        raise InputError("negative node weight: Q is not a maximum-excess set")

    inner = LaminarForest.from_family(view.demands)
    parent = [None] + [None if p is None else p + 1 for p in inner.parent]
    forest = LaminarForest.from_parents(parent)
    graph = forest.containment_graph()
    kcg = KcgInstance(graph, tuple(max(p, Fraction(0)) for p in profits), tuple(weights), pe_q)
    return KcgReduction(kcg, forest, (None,) + tuple(range(k)), tuple(profits))


@dataclass(frozen=True)
class SukpReduction:
    kcg: KcgInstance
    forest: LaminarForest
    node_items: tuple  # item behind each node


def sukp_to_kcg(S: SukpInstance) -> SukpReduction:
    """Node per non-empty item: profit = total value of the non-empty items
    nested inside it, weight = weight of its elements, capacity unchanged.

    Empty items are left out; they cost nothing and every solution's closure
    picks them up, whereas counting them inside each node would credit them
    once per chosen node.
    """
    items = tuple(i for i, s in enumerate(S.item_sets) if s)
    sets = [S.item_sets[i] for i in items]
    forest = LaminarForest.from_family(sets)
    profits = [sum((S.item_values[j] for j in items if S.item_sets[j] <= s), Fraction(0)) for s in sets]
    weights = [sum((S.element_weights[e] for e in s), Fraction(0)) for s in sets]
    kcg = KcgInstance(forest.containment_graph(), tuple(profits), tuple(weights), S.capacity)
    return SukpReduction(kcg, forest, items)
