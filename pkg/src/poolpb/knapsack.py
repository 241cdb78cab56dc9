"""Knapsack engines: exact and FPTAS 0/1 knapsack, knapsack whose conflict
graph is the containment graph of a laminar family, and chordality testing.

All three dynamic programs share one kernel (:func:`poolpb.kernels.skip_knapsack`):
items are laid out in a fixed order and taking item ``i`` resumes the scan at
``jump[i]``. For plain knapsack ``jump[i] = i + 1``. For a laminar forest
laid out in preorder, ``jump[i]`` is the first position after ``i``'s
subtree, which is exactly the rule "at most one chosen set per root-to-leaf
path", i.e. an independent set of the containment graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Optional, Sequence

from poolpb import kernels
from poolpb.core import as_rational
from poolpb.errors import (
    BadEpsilon,
    CapacityNegative,
    GraphForestMismatch,
    InputError,
    NegativeQuantity,
    NotLaminar,
)


@dataclass(frozen=True)
class KnapsackInstance:
    weights: tuple
    profits: tuple
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "profits", tuple(int(p) for p in self.profits))
        if len(self.weights) != len(self.profits):
            raise InputError("weights and profits differ in length")
        if any(w < 0 for w in self.weights) or any(p < 0 for p in self.profits):
            raise NegativeQuantity("knapsack weights and profits must be non-negative")


@dataclass(frozen=True)
class ConflictGraph:
    node_count: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise InputError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise InputError(f"edge ({u}, {v}) outside {self.node_count} nodes")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise InputError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def adjacency(self) -> list:
        adj = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class KcgInstance:
    graph: ConflictGraph
    profits: tuple
    weights: tuple
    capacity: Fraction

    def __post_init__(self):
        object.__setattr__(self, "profits", tuple(as_rational(p) for p in self.profits))
        object.__setattr__(self, "weights", tuple(as_rational(w) for w in self.weights))
        object.__setattr__(self, "capacity", as_rational(self.capacity))
        n = self.graph.node_count
        if len(self.profits) != n or len(self.weights) != n:
            raise InputError("profit/weight vectors must match the node count")
        if any(p < 0 for p in self.profits) or any(w < 0 for w in self.weights):
            raise NegativeQuantity("node profits and weights must be non-negative")


def is_laminar(sets: Sequence[frozenset]) -> bool:
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            x, y = sets[a], sets[b]
            if x & y and not (x <= y or y <= x):
                return False
    return True


@dataclass(frozen=True)
class LaminarForest:
    """Containment forest of a laminar family.

    ``parent[i]`` is the index of the smallest set strictly above ``i`` (or
    ``None`` for a root). Identical sets are chained, the lower index on top,
    and an empty set sits above every other set of the family since it is
    comparable with all of them.
    """

    parent: tuple
    children: tuple

    @classmethod
    def from_parents(cls, parent: Sequence[Optional[int]]) -> "LaminarForest":
        n = len(parent)
        kids = [[] for _ in range(n)]
        for i, p in enumerate(parent):
            if p is not None:
                if not 0 <= p < n or p == i:
                    raise InputError(f"bad parent {p} for node {i}")
                kids[p].append(i)
        forest = cls(tuple(parent), tuple(tuple(k) for k in kids))
        # acyclicity: every node must reach a root
        for i in range(n):
            seen = 0
            j = i
            while j is not None:
                seen += 1
                if seen > n:
                    raise InputError("parent links contain a cycle")
                j = parent[j]
        return forest

    @classmethod
    def from_family(cls, sets: Sequence) -> "LaminarForest":
        sets = [frozenset(s) for s in sets]
        if not is_laminar(sets):
            raise NotLaminar("family has two overlapping sets that are not nested")
        n = len(sets)
        # empty sets go first: they contain nothing but are comparable with everything
        order = sorted(range(n), key=lambda i: (bool(sets[i]), -len(sets[i]), i))
        parent = [None] * n
        placed = []
        last_empty = None
        for i in order:
            for j in reversed(placed):
                if sets[i] <= sets[j] and sets[j]:
                    parent[i] = j
                    break
            else:
                parent[i] = last_empty
            if not sets[i]:
                last_empty = i
            placed.append(i)
        return cls.from_parents(parent)

    def __len__(self) -> int:
        return len(self.parent)

    def roots(self) -> list:
        return [i for i, p in enumerate(self.parent) if p is None]

    def preorder(self) -> tuple:
        """Return ``(order, end)`` with ``end[k]`` one past the subtree of ``order[k]``."""
        order = []
        end_of = {}
        stack = [(r, False) for r in reversed(self.roots())]
        while stack:
            node, done = stack.pop()
            if done:
                end_of[node] = len(order)
                continue
            order.append(node)
            stack.append((node, True))
            for c in reversed(self.children[node]):
                stack.append((c, False))
        return order, [end_of[v] for v in order]

    def comparable_pairs(self) -> set:
        pairs = set()
        for i in range(len(self.parent)):
            j = self.parent[i]
            while j is not None:
                pairs.add((min(i, j), max(i, j)))
                j = self.parent[j]
        return pairs

    def containment_graph(self) -> ConflictGraph:
        return ConflictGraph(len(self.parent), tuple(sorted(self.comparable_pairs())))


def _check_eps(eps, allow_zero: bool) -> Fraction:
    eps = as_rational(eps)
    if not (0 < eps < 1 or (allow_zero and eps == 0)):
        raise BadEpsilon(f"epsilon must lie in {'[0, 1)' if allow_zero else '(0, 1)'}, got {eps}")
    return eps


def _scaled_profits(profits, fits, eps: Fraction):
    """Round profits down onto a grid so the DP table stays polynomial.

    Grid step is ``eps * p_max / n`` where ``p_max`` is the largest profit
    among items that fit on their own; items that cannot fit get 0.
    """
    n = len(profits)
    pmax = max((p for p, ok in zip(profits, fits) if ok), default=Fraction(0))
    if pmax <= 0:
        return [0] * n
    k = eps * pmax / n
    return [floor(p / k) if ok else 0 for p, ok in zip(profits, fits)]


def knapsack_exact(K: KnapsackInstance, backend=None):
    """Optimal 0/1 knapsack by min-weight-per-profit dynamic programming.

    Returns ``(chosen_indices, total_profit)``.
    """
    if K.capacity < 0:
        raise CapacityNegative(f"capacity {K.capacity} < 0")
    n = len(K.weights)
    if n == 0:
        return frozenset(), 0
    best, chosen = kernels.skip_knapsack(list(K.weights), list(K.profits), list(range(1, n + 1)), K.capacity, backend=backend)
    return frozenset(chosen), sum(K.profits[i] for i in chosen)


def knapsack_fptas(K: KnapsackInstance, eps, backend=None):
    """(1 - eps)-approximate 0/1 knapsack via profit scaling."""
    eps = _check_eps(eps, allow_zero=False)
    if K.capacity < 0:
        raise CapacityNegative(f"capacity {K.capacity} < 0")
    n = len(K.weights)
    if n == 0:
        return frozenset(), 0
    fits = [w <= K.capacity for w in K.weights]
    scaled = _scaled_profits([Fraction(p) for p in K.profits], fits, eps)
    _, chosen = kernels.skip_knapsack(list(K.weights), scaled, list(range(1, n + 1)), K.capacity, backend=backend)
    return frozenset(chosen), sum(K.profits[i] for i in chosen)


def laminar_conflict_knapsack(K: KcgInstance, F: LaminarForest, eps=Fraction(1, 10), backend=None):
    """Knapsack over independent sets of the containment graph of ``F``.

    With ``eps > 0`` the result is within a ``(1 - eps)`` factor of optimal;
    ``eps = 0`` solves exactly (profits are then scaled to a common
    denominator, so keep them small). Returns ``(chosen_nodes, total_profit)``.
    """
    eps = _check_eps(eps, allow_zero=True)
    n = K.graph.node_count
    if len(F) != n:
        raise GraphForestMismatch(f"forest has {len(F)} nodes, graph has {n}")
    if set(K.graph.edges) != F.comparable_pairs():
        raise GraphForestMismatch("conflict graph is not the containment graph of the forest")
    if K.capacity < 0:
        raise CapacityNegative(f"capacity {K.capacity} < 0")
    if n == 0:
        return frozenset(), Fraction(0)

    denom = kernels.common_denominator(list(K.weights) + [K.capacity])
    weights = kernels.scale(K.weights, denom)
    cap = kernels.scale([K.capacity], denom)[0]
    fits = [w <= cap for w in weights]
    if eps == 0:
        pd = kernels.common_denominator(K.profits)
        profits = [p if ok else 0 for p, ok in zip(kernels.scale(K.profits, pd), fits)]
    else:
        profits = _scaled_profits(K.profits, fits, eps)

    order, end = F.preorder()
    _, picked = kernels.skip_knapsack(
        [weights[v] for v in order],
        [profits[v] for v in order],
        end,
        cap,
        backend=backend,
    )
    chosen = frozenset(order[k] for k in picked)
    return chosen, sum((K.profits[v] for v in chosen), Fraction(0))


def lex_bfs(G: ConflictGraph) -> list:
    """Lexicographic breadth-first search order (ties: lowest node index)."""
    n = G.node_count
    adj = G.adjacency()
    labels = [[] for _ in range(n)]
    done = [False] * n
    order = []
    for step in range(n, 0, -1):
        v = max((u for u in range(n) if not done[u]), key=lambda u: (labels[u], -u))
        done[v] = True
        order.append(v)
        for u in adj[v]:
            if not done[u]:
                labels[u].append(step)
    return order


def is_perfect_elimination_ordering(G: ConflictGraph, ordering: Sequence[int]) -> bool:
    """Check that each vertex's later neighbours form a clique."""
    adj = G.adjacency()
    pos = {v: k for k, v in enumerate(ordering)}
    if len(pos) != G.node_count:
        return False
    for v in ordering:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        for a in range(len(later)):
            for b in range(a + 1, len(later)):
                if later[b] not in adj[later[a]]:
                    return False
    return True


def is_chordal(G: ConflictGraph):
    """Return ``(True, peo)`` for chordal graphs, ``(False, None)`` otherwise.

    The reverse of a LexBFS order is a perfect elimination ordering exactly
    when the graph is chordal, so verifying that candidate decides the question.
    """
    peo = lex_bfs(G)[::-1]
    if is_perfect_elimination_ordering(G, peo):
        return True, peo
    return False, None
