import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import strategies as st

from poolpb import kernels
from poolpb.core import Additive, Instance, SingleMinded, Symmetric, Table
from poolpb.knapsack import is_laminar

BACKENDS = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])

HALL, SHELTER, POOL = 0, 1, 2


def town_example():
    return Instance.build(
        [5, 4, 2],
        [2, 3, 1],
        [(2, 1, 2), (1, 2, 2), (4, 3, 1)],
        names=["hall", "shelter", "pool"],
    )


def gap_example(H=100, eps=F(1, 100)):
    return Instance.build(
        [1, 2, 1, 1],
        [2, 0],
        [(0, 20, 2 - eps, 2), (H, 0, 20, 0)],
        names=["P1", "P2", "P3", "P4"],
    )


def laminar_example():
    return Instance.build(
        [2, 1, 4],
        [1, 2, 5],
        [SingleMinded({1}, 3), SingleMinded({0, 1}, 4), SingleMinded({2}, 6)],
    )


@pytest.fixture
def t1():
    return town_example()


@pytest.fixture
def t3():
    return gap_example()


# ---------------------------------------------------------------- random builders


def small_rational(rng, top=6, denoms=(1, 2, 3)):
    return F(rng.randint(0, top * 6), 6) if rng.random() < 0.3 else F(rng.randint(0, top), rng.choice(denoms))


def rand_additive(rng, n, m, top=6):
    costs = [F(rng.randint(1, 2 * top), rng.choice((1, 2))) for _ in range(m)]
    budgets = [small_rational(rng, top) for _ in range(n)]
    vals = [Additive(tuple(small_rational(rng, top) for _ in range(m))) for _ in range(n)]
    return Instance.build(costs, budgets, vals)


def rand_subset(rng, m, p=0.4):
    return frozenset(j for j in range(m) if rng.random() < p)


def rand_laminar_family(rng, m, k):
    """Up to ``k`` distinct non-empty laminar subsets of ``range(m)``."""
    fam = []
    tries = 0
    while len(fam) < k and tries < 20 * k:
        tries += 1
        size = rng.randint(1, m)
        s = frozenset(rng.sample(range(m), size))
        if s in fam:
            continue
        if is_laminar(fam + [s]):
            fam.append(s)
    return fam


def rand_single_minded(rng, n, m, laminar=False):
    if laminar:
        fam = rand_laminar_family(rng, m, max(1, n))
        demands = [rng.choice(fam) for _ in range(n)]
    else:
        demands = [rand_subset(rng, m) or frozenset({rng.randrange(m)}) for _ in range(n)]
    costs = [F(rng.randint(0, 8), rng.choice((1, 2))) for _ in range(m)]
    budgets = [small_rational(rng) for _ in range(n)]
    vals = [SingleMinded(d, F(rng.randint(0, 12), rng.choice((1, 2)))) for d in demands]
    return Instance.build(costs, budgets, vals)


def rand_symmetric(rng, n, m):
    rows = []
    for _ in range(n):
        steps = [small_rational(rng, 4) for _ in range(m)]
        row = [F(0)]
        for s in steps:
            row.append(row[-1] + s)
        rows.append(Symmetric(tuple(row)))
    costs = [F(rng.randint(0, 8), rng.choice((1, 2))) for _ in range(m)]
    budgets = [small_rational(rng) for _ in range(n)]
    return Instance.build(costs, budgets, rows)


def rand_table(rng, n, m):
    vals = []
    for _ in range(n):
        add = [small_rational(rng, 4) for _ in range(m)]
        bonus = small_rational(rng, 3)
        vals.append(Table.from_function(m, lambda W, add=add, bonus=bonus: sum((add[j] for j in W), F(0)) + (bonus if len(W) == m else 0)))
    costs = [F(rng.randint(0, 8), rng.choice((1, 2))) for _ in range(m)]
    budgets = [small_rational(rng) for _ in range(n)]
    return Instance.build(costs, budgets, vals)


def rand_mixed(rng, n, m):
    """Agents of every valuation class in one instance."""
    kinds = [rand_additive, rand_single_minded, rand_symmetric, rand_table]
    parts = [rng.choice(kinds)(rng, 1, m) for _ in range(n)]
    costs = [F(rng.randint(0, 8), rng.choice((1, 2))) for _ in range(m)]
    return Instance.build(costs, [p.agents[0].budget for p in parts], [p.agents[0].valuation for p in parts])


def all_subsets(m):
    for k in range(m + 1):
        yield from (frozenset(c) for c in combinations(range(m), k))


# ---------------------------------------------------------------- hypothesis


@st.composite
def instances(draw, max_n=5, max_m=6, builder=None):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    rng = random.Random(seed)
    return (builder or rand_mixed)(rng, n, m)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
