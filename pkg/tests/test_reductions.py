import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from conftest import laminar_example, rand_additive, rand_single_minded, rand_symmetric
from hypothesis import given, settings
from hypothesis import strategies as st

from poolpb.core import Additive, Instance, SingleMinded, Symmetric, Table, payment_excess, social_welfare
from poolpb.errors import InputError, NotLaminar, UniverseNotDivisibleBy3, WrongValuationClass
from poolpb.knapsack import knapsack_exact
from poolpb.oracle import brute_maxpe, brute_uwo, brute_uwo_wp
from poolpb.reductions import (
    PartitionInstance,
    X3cInstance,
    gap_transform,
    laminar_to_kcg,
    partition_to_maxpe,
    sukp_to_kcg,
    uwo_to_knapsack,
    x3c_to_maxpe,
)
from poolpb.solvers import SukpInstance, maxpe_single_minded, single_minded_view


# ---------------------------------------------------------------- knapsack encoding


def test_uwo_to_knapsack_town_example(t1):
    red = uwo_to_knapsack(t1)
    K = red.knapsack
    assert (K.weights, K.profits, K.capacity) == ((5, 4, 2), (2, 2, 3), 6)
    chosen, _ = knapsack_exact(K)
    assert {red.projects[k] for k in chosen} == brute_uwo(t1).best
    assert red.welfare(chosen) == 5


def test_uwo_to_knapsack_no_agents():
    red = uwo_to_knapsack(Instance.build([1, 2], [], []))
    assert red.knapsack.profits == (0, 0)


def test_uwo_to_knapsack_needs_additive():
    with pytest.raises(WrongValuationClass):
        uwo_to_knapsack(laminar_example())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_uwo_knapsack_value_is_welfare(seed):
    rng = random.Random(seed)
    I = rand_additive(rng, rng.randint(0, 4), rng.randint(1, 7))
    red = uwo_to_knapsack(I)
    chosen, _ = knapsack_exact(red.knapsack)
    assert red.welfare(chosen) == brute_uwo(I).objective
    for k in range(I.m + 1):
        for S in combinations(range(I.m), k):
            if all(red.knapsack.profits[j] > 0 for j in S):
                assert red.welfare(S) == social_welfare(I, S)


# ---------------------------------------------------------------- gap transform


def test_gap_transform_example():
    I = Instance.build([1], [1], [(1,)])
    G = gap_transform(I, F(1, 2), 1)
    assert G.costs == (F(1, 2), 1)
    assert G.budgets == (0, 1)
    assert G.agents[0].valuation == Additive((2, 0))
    assert G.agents[1].valuation == Additive((0, 1))
    assert G.projects[0].name == "gap"


def test_gap_transform_free_project_always_funded():
    rng = random.Random(4)
    for _ in range(20):
        I = rand_additive(rng, 2, 3)
        assert 0 in brute_uwo_wp(gap_transform(I, 0, 1)).best


def test_gap_transform_shifts_every_class():
    I = Instance.build(
        [1, 2],
        [1, 1, 1],
        [SingleMinded({1}, 3), Symmetric((0, 1, 2)), Table((0, 1, 2, 4))],
    )
    G = gap_transform(I, 1, F(1, 2))
    assert G.agents[1].valuation == SingleMinded({2}, 3)
    for i in (2, 3):
        old, new = I.agents[i - 1].valuation, G.agents[i].valuation
        for mask in range(4):
            assert new.value_mask(mask << 1) == old.value_mask(mask)
            assert new.value_mask(mask << 1 | 1) == old.value_mask(mask)


def test_gap_transform_single_minded_newcomer():
    I = Instance.build([1], [1], [SingleMinded({0}, 2)])
    G = gap_transform(I, 1, 1)
    assert G.agents[0].valuation == SingleMinded({0}, 4)


def test_gap_transform_rejects_nonpositive_factor():
    with pytest.raises(InputError):
        gap_transform(Instance.build([1], [1], [(1,)]), 1, 0)


# ---------------------------------------------------------------- partition and X3C


@pytest.mark.parametrize(
    "a, yes, best",
    [((1, 1, 2), True, 1), ((1, 1, 1), False, None), ((2, 2), True, 1)],
)
def test_partition_examples(a, yes, best):
    P = PartitionInstance(a)
    I, t = partition_to_maxpe(P)
    assert P.has_equal_split() == yes
    pe = brute_maxpe(I).objective
    assert (pe >= t) == yes
    if best is not None:
        assert pe == best


def test_partition_construction():
    I, t = partition_to_maxpe(PartitionInstance((1, 1, 2)))
    assert I.costs == (F(1, 2), F(1, 2), 1)
    assert I.budgets == (2,)
    assert I.agents[0].valuation == Additive((1, 1, 2))
    assert t == 1


def test_partition_rejects_nonpositive():
    with pytest.raises(InputError):
        PartitionInstance((1, 0))


def test_x3c_examples():
    X = X3cInstance(3, [{0, 1, 2}])
    I = x3c_to_maxpe(X)
    assert I.budgets == (F(2, 3),) * 3 and I.costs == (1,)
    assert payment_excess(I, {0}) == 1
    X = X3cInstance(6, [{0, 1, 2}, {3, 4, 5}])
    assert X.has_exact_cover()
    assert payment_excess(x3c_to_maxpe(X), {0, 1}) == 1
    X = X3cInstance(6, [{0, 1, 2}, {2, 3, 4}])
    assert not X.has_exact_cover()
    assert brute_maxpe(x3c_to_maxpe(X)).objective < 1


def test_x3c_universe_must_divide_by_3():
    with pytest.raises(UniverseNotDivisibleBy3):
        x3c_to_maxpe(X3cInstance(4, [{0, 1, 2}]))
    with pytest.raises(InputError):
        X3cInstance(3, [{0, 1}])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_partition_biconditional(a):
    P = PartitionInstance(a)
    I, t = partition_to_maxpe(P)
    assert (brute_maxpe(I).objective >= t) == P.has_equal_split()


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3).flatmap(lambda q: st.tuples(st.just(q), st.lists(st.sets(st.integers(0, 3 * q - 1), min_size=3, max_size=3), max_size=6))))
def test_x3c_biconditional(data):
    q, triples = data
    X = X3cInstance(3 * q, triples)
    assert (brute_maxpe(x3c_to_maxpe(X)).objective >= 1) == X.has_exact_cover()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([1, F(3, 2), 3]))
def test_gap_biconditional(seed, g):
    rng = random.Random(seed)
    builder = rng.choice([rand_additive, rand_single_minded, rand_symmetric])
    I = builder(rng, rng.randint(1, 3), rng.randint(1, 4))
    full = (1 << I.m) - 1
    total = sum((a.valuation.value_mask(full) for a in I.agents), F(0))
    if total == 0:
        return
    t = F(rng.randint(0, 12), rng.choice((1, 2, 4)))
    G = gap_transform(I, t, g)
    assert (brute_uwo_wp(G).objective >= 2 * g * total) == (brute_maxpe(I).objective >= t)


# ---------------------------------------------------------------- laminar KCG


def test_laminar_to_kcg_example():
    I = laminar_example()
    view = single_minded_view(I)
    Q, pe = maxpe_single_minded(I)
    red = laminar_to_kcg(view, Q, pe, I.costs)
    assert red.kcg.profits == (2, 2, 4, 0)
    assert red.kcg.weights == (0, 0, 0, 0)
    assert red.kcg.capacity == 1
    assert red.kcg.graph.edges == ((1, 2),)


def test_laminar_to_kcg_empty_q():
    I = Instance.build([5], [1], [SingleMinded({0}, 2)])
    view = single_minded_view(I)
    red = laminar_to_kcg(view, frozenset(), 0, I.costs)
    assert red.kcg.profits[0] == 0 and red.kcg.capacity == 0


def test_laminar_to_kcg_rejects_non_maxpe_q():
    I = laminar_example()
    with pytest.raises(InputError):
        laminar_to_kcg(single_minded_view(I), frozenset(), 0, I.costs)


def test_laminar_to_kcg_requires_laminar():
    I = Instance.build([1, 1, 1], [1, 1], [SingleMinded({0, 1}, 2), SingleMinded({1, 2}, 2)])
    with pytest.raises(NotLaminar):
        laminar_to_kcg(single_minded_view(I), frozenset(), 0, I.costs)


def antichains(red):
    n = red.kcg.graph.node_count
    bad = set(red.kcg.graph.edges)
    for k in range(n + 1):
        for S in combinations(range(n), k):
            if not any(e in bad for e in combinations(S, 2)):
                yield S


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_laminar_kcg_objective_accounting(seed):
    rng = random.Random(seed)
    I = rand_single_minded(rng, rng.randint(1, 6), rng.randint(1, 6), laminar=True)
    view = single_minded_view(I)
    Q, pe_q = maxpe_single_minded(I)
    red = laminar_to_kcg(view, Q, pe_q, I.costs)
    raw, w, B = red.raw_profits, red.kcg.weights, red.kcg.capacity
    outside = [a for a in range(len(view)) if not view.demands[a] <= Q]
    best = None
    for S in antichains(red):
        if 0 not in S:
            continue
        W = set(Q)
        for v in S[1:]:
            W |= view.demands[red.node_agents[v]]
        W = frozenset(W)
        sw = social_welfare(I, W)
        assert sum(raw[v] for v in S) <= sw
        # canonical antichain: maximal outside demand sets inside W
        inside = [a for a in outside if view.demands[a] <= W]
        maximal = [a for a in inside if not any(view.demands[a] < view.demands[b] for b in inside)]
        canon = [0] + [a + 1 for a in maximal]
        assert sum(raw[v] for v in canon) == sw
        assert pe_q - sum(w[v] for v in canon) == payment_excess(I, W)
        if sum(w[v] for v in S) <= B:
            val = sum(raw[v] for v in S)
            best = val if best is None else max(best, val)
    assert best == brute_uwo_wp(I).objective


# ---------------------------------------------------------------- SUKP encoding


def test_sukp_to_kcg_example():
    red = sukp_to_kcg(SukpInstance(({0}, {0, 1}, {2}), (3, 5, 2), (2, 3, 1), 5))
    assert red.kcg.profits == (3, 8, 2)
    assert red.kcg.weights == (2, 5, 1)
    assert red.kcg.capacity == 5
    assert red.kcg.graph.edges == ((0, 1),)


def test_sukp_to_kcg_disjoint():
    red = sukp_to_kcg(SukpInstance(({0}, {1, 2}), (4, 6), (1, 2, 3), 5))
    assert red.kcg.graph.edges == ()
    assert red.kcg.profits == (4, 6) and red.kcg.weights == (1, 5)


def test_sukp_to_kcg_chain():
    red = sukp_to_kcg(SukpInstance(({0}, {0, 1}, {0, 1, 2}), (1, 1, 1), (1, 1, 1), 5))
    assert red.kcg.graph.edges == ((0, 1), (0, 2), (1, 2))


def test_sukp_to_kcg_requires_laminar():
    with pytest.raises(NotLaminar):
        sukp_to_kcg(SukpInstance(({0, 1}, {1, 2}), (1, 1), (1, 1, 1), 5))


def test_sukp_instance_must_cover_universe():
    with pytest.raises(InputError):
        SukpInstance(({0},), (1,), (1, 1), 5)
