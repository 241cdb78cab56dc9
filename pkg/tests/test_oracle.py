import random
from fractions import Fraction as F

import pytest
from conftest import BACKENDS, POOL, SHELTER, all_subsets, instances, rand_mixed, gap_example
from hypothesis import given, settings

from poolpb import kernels
from poolpb.core import Instance, payment_excess, social_welfare
from poolpb.errors import TooManyProjects
from poolpb.oracle import MAX_PROJECTS, brute_maxpe, brute_uwo, brute_uwo_wp


def naive(I, objective, feasible):
    """Independent reference: plain enumeration in canonical order."""
    best, best_val, ties = None, None, 0
    for W in all_subsets(I.m):
        if not feasible(W):
            continue
        v = objective(W)
        if best_val is None or v > best_val:
            best, best_val, ties = W, v, 1
        elif v == best_val:
            ties += 1
    return best, best_val, ties


def naive_uwo(I):
    return naive(I, lambda W: social_welfare(I, W), lambda W: I.cost_of(W) <= I.total_budget())


def naive_uwo_wp(I):
    return naive(I, lambda W: social_welfare(I, W), lambda W: payment_excess(I, W) >= 0)


def naive_maxpe(I):
    return naive(I, lambda W: payment_excess(I, W), lambda W: True)


@pytest.mark.parametrize("backend", BACKENDS)
def test_town_example(t1, backend):
    for fn in (brute_uwo, brute_uwo_wp):
        r = fn(t1, backend=backend)
        assert r.best == {SHELTER, POOL}
        assert r.objective == 5
        assert r.tie_count == 1
    r = brute_maxpe(t1, backend=backend)
    assert r.best == {POOL} and r.objective == 3


@pytest.mark.parametrize("backend", BACKENDS)
def test_gap_example(backend):
    r = brute_uwo_wp(gap_example(), backend=backend)
    assert r.best == {0, 3}
    assert r.objective == 100


def test_zero_budgets_fund_nothing():
    I = Instance.build([1, 2], [0, 0], [(3, 3), (1, 4)])
    r = brute_uwo(I)
    assert r.best == frozenset() and r.objective == 0


def test_single_coverable_project():
    r = brute_uwo(Instance.build([1], [1], [(3,)]))
    assert r.best == {0} and r.objective == 2


def test_uwo_wp_gap_instance():
    I = Instance.build([1], [0, 1], [(2,), (0,)])
    assert brute_uwo(I).best == {0}
    r = brute_uwo_wp(I)
    assert r.best == frozenset() and r.objective == 0


def test_maxpe_partition_example():
    I = Instance.build([F(1, 2), F(1, 2), 1], [2], [(1, 1, 2)])
    r = brute_maxpe(I)
    assert r.objective == 1 and r.best == {2}


def test_too_many_projects():
    I = Instance.build([1] * (MAX_PROJECTS + 1), [1], [(1,) * (MAX_PROJECTS + 1)])
    with pytest.raises(TooManyProjects):
        brute_uwo(I)


def test_superset_restriction(t1):
    r = brute_uwo_wp(t1, superset_of={POOL})
    assert r.best == {SHELTER, POOL}
    assert brute_uwo_wp(t1, superset_of={0}) is None


def test_tie_break_fewer_projects_then_lexicographic():
    # three free worthless projects: every subset ties at 0, empty set wins
    I = Instance.build([0, 0, 0], [1], [(0, 0, 0)])
    r = brute_uwo(I)
    assert r.best == frozenset() and r.tie_count == 8
    # {1} and {2} tie; in the second instance all five affordable pairs tie
    I = Instance.build([1, 1, 1, 1], [1], [(1, 2, 2, 1)])
    r = brute_uwo(I)
    assert r.objective == 1 and r.best == {1} and r.tie_count == 2
    I = Instance.build([2, 1, 1, 2], [3], [(3, 2, 2, 3)])
    r = brute_uwo(I)
    assert r.best == {0, 1} and r.tie_count == 5
    I = Instance.build([1, 1, 1, 1], [4], [(2, 2, 3, 1)])
    assert brute_uwo(I).best == {0, 1, 2}


@settings(max_examples=150, deadline=None)
@given(instances(max_n=4, max_m=6))
def test_matches_naive_enumeration(I):
    for fn, ref in ((brute_uwo, naive_uwo), (brute_uwo_wp, naive_uwo_wp), (brute_maxpe, naive_maxpe)):
        for backend in BACKENDS:
            r = fn(I, backend=backend)
            best, val, ties = ref(I)
            assert (r.best, r.objective, r.tie_count) == (best, val, ties)


@settings(max_examples=100, deadline=None)
@given(instances(max_n=4, max_m=6))
def test_oracle_invariants(I):
    uwo, wp, pe = brute_uwo(I), brute_uwo_wp(I), brute_maxpe(I)
    assert wp.objective <= uwo.objective
    assert pe.objective >= 0
    assert social_welfare(I, wp.best) == wp.objective
    assert payment_excess(I, pe.best) == pe.objective
    assert wp.tie_count >= 1


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
def test_backends_agree_on_larger_instances():
    rng = random.Random(11)
    for _ in range(30):
        I = rand_mixed(rng, rng.randint(1, 6), rng.randint(6, 10))
        for fn in (brute_uwo, brute_uwo_wp, brute_maxpe):
            assert fn(I, backend="python") == fn(I, backend="cython")


def test_large_numbers_fall_back_to_python():
    big = 10**30
    I = Instance.build([big, 1], [big + 1], [(2 * big, 3)])
    S = kernels.ScaledInstance(I)
    assert not S.fits_int64
    r = brute_uwo_wp(I)
    assert r.best == {0, 1} and r.objective == big + 2
