"""Random instance families: uniform, normal and bernoulli additive valuations.

All draws come from numpy's PCG64 seeded with the config seed, in a fixed
order, so a config always yields the same instance. Real-valued samples are
rounded to multiples of ``1/QUANTUM`` before any further arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from statistics import NormalDist

import numpy as np

from poolpb.core import Additive, Agent, Instance, Project
from poolpb.errors import InputError

FAMILIES = ("uniform", "normal", "bernoulli")
QUANTUM = 10**9
_STD = NormalDist()


@dataclass(frozen=True)
class SyntheticConfig:
    family: str
    n: int
    m: int
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.n < 1 or self.m < 1:
            raise InputError("n and m must be at least 1")


def _q(x: float) -> int:
    return int(round(x * QUANTUM))


def _open_unit(rng) -> float:
    # inv_cdf needs 0 < u < 1
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return u


def _valuations(cfg: SyntheticConfig, rng) -> list:
    """Quantized numerators ``v[i][j]`` (true value is ``v / QUANTUM``)."""
    n, m = cfg.n, cfg.m
    if cfg.family == "uniform":
        return [[_q(rng.random()) for _ in range(m)] for _ in range(n)]
    v = [[0] * m for _ in range(n)]
    if cfg.family == "normal":
        for j in range(m):
            mu, sigma = rng.random(), 0.5 * rng.random()
            col = [_q(mu + sigma * _STD.inv_cdf(_open_unit(rng))) for _ in range(n)]
            shift = max(0, -min(col))
            for i in range(n):
                v[i][j] = col[i] + shift
        return v
    for j in range(m):
        p, nu = rng.random(), _q(rng.random())
        for i in range(n):
            v[i][j] = nu if rng.random() < p else 0
    return v


def _split(total: int, weights: list) -> list:
    """Integer parts proportional to ``weights`` summing exactly to ``total``
    (largest remainder, ties to the lower index)."""
    wsum = sum(weights)
    if wsum == 0:
        weights, wsum = [1] * len(weights), len(weights)
    parts = [total * w // wsum for w in weights]
    rema = [total * w % wsum for w in weights]
    short = total - sum(parts)
    for i in sorted(range(len(weights)), key=lambda i: (-rema[i], i))[:short]:
        parts[i] += 1
    return parts


def gen_synthetic(cfg: SyntheticConfig) -> Instance:
    rng = np.random.Generator(np.random.PCG64(cfg.seed % (1 << 64)))
    v = _valuations(cfg, rng)
    costs = []
    for j in range(cfg.m):
        s = sum(v[i][j] for i in range(cfg.n))
        lo = ceil(3 * s / 4)
        costs.append(int(rng.integers(lo, s + 1)))
    # budgets live on the 1/(2*QUANTUM) grid so that C(M)/2 is representable
    shares = [_q(rng.random()) for _ in range(cfg.n)]
    budgets = _split(sum(costs), shares)
    projects = tuple(Project(Fraction(c, QUANTUM)) for c in costs)
    agents = tuple(
        Agent(Fraction(b, 2 * QUANTUM), Additive(tuple(Fraction(x, QUANTUM) for x in row)))
        for b, row in zip(budgets, v)
    )
    return Instance(projects, agents)
