"""Polynomial-time solvers for the tractable cases, plus the greedy heuristic.

================================  ==========================================
function                          guarantee
================================  ==========================================
``uwo_additive_fptas``            welfare >= (1 - eps) * best affordable set
``uwo_identical_costs``           exact welfare optimum (no participation)
``maxpe_single_minded``           exact maximum payment excess
``uwowp_laminar_fptas``           welfare >= (1 - eps) * best WP-fundable set
``symmetric_uwowp``               exact best WP-fundable set
``greedy_uwowp``                  none; always WP-fundable
``sukp_laminar_fptas``            value >= (1 - eps) * set-union knapsack opt
================================  ==========================================
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from poolpb import kernels
from poolpb.core import (
    Instance,
    SolveReport,
    as_rational,
    from_mask,
    make_report,
    payment_excess,
    prefix_fill,
    social_welfare,
    wp_payments,
)
from poolpb.errors import CostsNotIdentical, InputError, NegativeQuantity, NotLaminar, WrongValuationClass
from poolpb.flow import FlowNetwork
from poolpb.knapsack import _check_eps, is_laminar, knapsack_fptas, laminar_conflict_knapsack


def _require(I: Instance, kind: str, what: str):
    bad = [i for i, a in enumerate(I.agents) if a.valuation.kind != kind]
    if bad:
        raise WrongValuationClass(f"{what} needs {kind} valuations; agents {bad[:5]} are not")


# --------------------------------------------------------------------------
# Additive welfare maximisation
# --------------------------------------------------------------------------


def uwo_additive_fptas(I: Instance, eps=Fraction(1, 10)) -> SolveReport:
    """Approximate welfare optimum subject only to the pooled budget.

    Payments fill budgets in agent order; nobody is protected from paying
    more than they gain.
    """
    from poolpb.reductions import uwo_to_knapsack

    eps = _check_eps(eps, allow_zero=False)
    _require(I, "additive", "uwo_additive_fptas")
    red = uwo_to_knapsack(I)
    chosen, _ = knapsack_fptas(red.knapsack, eps)
    W = frozenset(red.projects[k] for k in chosen)
    # a zero-profit item may only be carried by rounding; it never helps
    W = frozenset(j for j in W if social_welfare(I, {j}) >= 0)
    return make_report(I, W, prefix_fill(I.budgets, I.cost_of(W)), "uwo-fptas", eps)


def uwo_identical_costs(I: Instance) -> SolveReport:
    """Exact welfare optimum when every project costs the same."""
    _require(I, "additive", "uwo_identical_costs")
    costs = set(I.costs)
    if len(costs) > 1:
        raise CostsNotIdentical(f"found {len(costs)} distinct project costs")
    c = next(iter(costs), Fraction(0))
    welfare = [social_welfare(I, {j}) for j in range(I.m)]
    ranked = sorted(range(I.m), key=lambda j: (-welfare[j], j))
    budget = I.total_budget()
    W, spent = [], Fraction(0)
    for j in ranked:
        if welfare[j] < 0 or spent + c > budget:
            break
        W.append(j)
        spent += c
    return make_report(I, W, prefix_fill(I.budgets, spent), "identical-costs")


# --------------------------------------------------------------------------
# Single-minded agents
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SingleMindedView:
    """Agents sharing a demand set merged into one (values and budgets add up).

    ``demands[k]``, ``values[k]``, ``budgets[k]`` describe merged agent ``k``;
    ``agent_map[i]`` is the merged index of original agent ``i``.
    ``extractable[k]`` is the sum of ``min(b_i, z_i)`` over the merged
    agents, which can be less than ``min(budgets[k], values[k])``: an agent
    with a large budget but little value cannot pay for another's value.
    """

    demands: tuple
    values: tuple
    budgets: tuple
    agent_map: tuple
    extractable: tuple

    def __len__(self):
        return len(self.demands)

    def caps(self) -> list:
        return list(self.extractable)


def single_minded_view(I: Instance) -> SingleMindedView:
    _require(I, "single_minded", "single-minded solvers")
    index = {}
    demands, values, budgets, amap, extract = [], [], [], [], []
    for a in I.agents:
        d = a.valuation.demand
        if d not in index:
            index[d] = len(demands)
            demands.append(d)
            values.append(Fraction(0))
            budgets.append(Fraction(0))
            extract.append(Fraction(0))
        k = index[d]
        values[k] += a.valuation.value
        budgets[k] += a.budget
        extract[k] += min(a.budget, a.valuation.value)
        amap.append(k)
    return SingleMindedView(tuple(demands), tuple(values), tuple(budgets), tuple(amap), tuple(extract))


def maxpe_single_minded(I: Instance):
    """Maximum payment excess for single-minded agents, via minimum cut.

    The excess maximisation is a maximum-weight closure: an agent node
    (weight ``min(b_i, z_i)``) can only be kept if all projects of its demand
    set (weight ``-C_j``) are kept. Returns ``(W, PE)`` where ``W`` is the
    inclusion-minimal optimal project set.
    """
    view = single_minded_view(I)
    caps = view.caps()
    denom = kernels.common_denominator(list(caps) + list(I.costs))
    w_agent = kernels.scale(caps, denom)
    w_proj = kernels.scale(I.costs, denom)
    k, m = len(view), I.m
    s, t = k + m, k + m + 1
    net = FlowNetwork(k + m + 2)
    inf = sum(w_agent) + sum(w_proj) + 1
    for a in range(k):
        if w_agent[a] > 0:
            net.add_edge(s, a, w_agent[a])
        for j in view.demands[a]:
            net.add_edge(a, k + j, inf)
    for j in range(m):
        if w_proj[j] > 0:
            net.add_edge(k + j, t, w_proj[j])
    cut = net.max_flow(s, t)
    side = net.source_side(s)
    W = frozenset(j for j in range(m) if k + j in side)
    pe = Fraction(sum(w_agent) - cut, denom)
    assert payment_excess(I, W) == pe, "closure value disagrees with direct evaluation"
    return W, pe


def uwowp_laminar_fptas(I: Instance, eps=Fraction(1, 10)) -> SolveReport:
    """Approximate best WP-fundable set when demand sets form a laminar family.

    Computes a maximum-excess set ``Q``, then extends it with an antichain of
    demand sets chosen by the laminar conflict knapsack whose capacity is the
    excess of ``Q``.
    """
    from poolpb.reductions import laminar_to_kcg

    eps = _check_eps(eps, allow_zero=True)
    view = single_minded_view(I)
    if not is_laminar(view.demands):
        raise NotLaminar("demand sets are not laminar")
    Q, pe_q = maxpe_single_minded(I)
    red = laminar_to_kcg(view, Q, pe_q, I.costs)
    chosen, _ = laminar_conflict_knapsack(red.kcg, red.forest, eps)
    W = set(Q)
    for node in chosen:
        a = red.node_agents[node]
        if a is not None and red.raw_profits[node] >= 0:
            W |= view.demands[a]
    W = frozenset(W)
    return make_report(I, W, wp_payments(I, W), "laminar-fptas", eps, maxpe_set=Q, maxpe=pe_q)


# --------------------------------------------------------------------------
# Symmetric valuations
# --------------------------------------------------------------------------


def symmetric_uwowp(I: Instance) -> SolveReport:
    """Exact best WP-fundable set when values depend only on how many projects are funded.

    Only the ``k`` cheapest projects are worth considering for each size
    ``k``; pick the fundable prefix with the highest welfare.
    """
    _require(I, "symmetric", "symmetric_uwowp")
    order = sorted(range(I.m), key=lambda j: (I.costs[j], j))
    best_k, best_sw = 0, Fraction(0)
    cost = Fraction(0)
    for k in range(1, I.m + 1):
        cost += I.costs[order[k - 1]]
        vals = [a.valuation.by_count[k] for a in I.agents]
        if sum((min(v, a.budget) for v, a in zip(vals, I.agents)), Fraction(0)) < cost:
            continue
        sw = sum(vals, Fraction(0)) - cost
        if sw > best_sw:
            best_k, best_sw = k, sw
    W = frozenset(order[:best_k])
    return make_report(I, W, wp_payments(I, W), "symmetric")


# --------------------------------------------------------------------------
# Greedy heuristic
# --------------------------------------------------------------------------


def greedy_order(I: Instance) -> list:
    """Projects by singleton welfare per unit cost, best first.

    Free projects come first; ties go to the cheaper, then lower-indexed project.
    """
    welfare = [sum((a.valuation.singleton(j) for a in I.agents), Fraction(0)) - I.costs[j] for j in range(I.m)]

    def key(j):
        c = I.costs[j]
        if c == 0:
            return (0, -welfare[j], c, j)
        return (1, -welfare[j] / c, c, j)

    return sorted(range(I.m), key=key)


def greedy_uwowp(I: Instance, scaled: kernels.ScaledInstance | None = None) -> SolveReport:
    """One pass over :func:`greedy_order`, keeping each project that leaves
    the set WP-fundable and does not lower welfare."""
    S = scaled or kernels.ScaledInstance(I)
    mask = 0
    cur_sw = 0
    for j in greedy_order(I):
        cand = mask | 1 << j
        pe, sw = S.excess_and_welfare(cand)
        if sw < cur_sw or pe < 0:
            continue
        mask, cur_sw = cand, sw
    W = from_mask(mask)
    return make_report(I, W, wp_payments(I, W), "greedy")


# --------------------------------------------------------------------------
# Set-union knapsack
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SukpInstance:
    """Items are sets of elements; an element's weight is paid once however
    many chosen items contain it."""

    item_sets: tuple
    item_values: tuple
    element_weights: tuple
    capacity: Fraction

    def __post_init__(self):
        object.__setattr__(self, "item_sets", tuple(frozenset(s) for s in self.item_sets))
        object.__setattr__(self, "item_values", tuple(as_rational(v) for v in self.item_values))
        object.__setattr__(self, "element_weights", tuple(as_rational(w) for w in self.element_weights))
        object.__setattr__(self, "capacity", as_rational(self.capacity))
        if len(self.item_sets) != len(self.item_values):
            raise InputError("one value per item set is required")
        if any(v < 0 for v in self.item_values) or any(w < 0 for w in self.element_weights):
            raise NegativeQuantity("item values and element weights must be non-negative")
        u = len(self.element_weights)
        covered = set().union(*self.item_sets) if self.item_sets else set()
        if covered != set(range(u)):
            raise InputError(f"item sets must cover exactly the elements 0..{u - 1}")

    def union_weight(self, items) -> Fraction:
        elems = set()
        for i in items:
            elems |= self.item_sets[i]
        return sum((self.element_weights[e] for e in elems), Fraction(0))

    def value(self, items) -> Fraction:
        return sum((self.item_values[i] for i in items), Fraction(0))

    def closure(self, items) -> frozenset:
        """Every item whose elements are already paid for by ``items``."""
        elems = set()
        for i in items:
            elems |= self.item_sets[i]
        return frozenset(i for i, s in enumerate(self.item_sets) if s <= elems)


def sukp_laminar_fptas(S: SukpInstance, eps=Fraction(1, 10)):
    """(1 - eps)-approximate set-union knapsack for laminar item sets.

    Returns ``(items, value)``. ``eps = 0`` solves exactly.
    """
    from poolpb.reductions import sukp_to_kcg

    eps = _check_eps(eps, allow_zero=True)
    red = sukp_to_kcg(S)
    chosen, _ = laminar_conflict_knapsack(red.kcg, red.forest, eps)
    T = S.closure(red.node_items[v] for v in chosen)
    return T, S.value(T)
