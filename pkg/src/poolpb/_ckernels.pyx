# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the two hot loops (see poolpb/_pykernels.py for the
reference implementation; both must return identical results)."""

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long)
    int __builtin_popcountll(unsigned long long)


cdef inline bint _better(int64_t a, int64_t b):
    # canonical order: fewer projects first, then lexicographically smaller index set
    cdef int pa = __builtin_popcountll(<unsigned long long>a)
    cdef int pb = __builtin_popcountll(<unsigned long long>b)
    cdef int64_t d, low
    if pa != pb:
        return pa < pb
    d = a ^ b
    low = d & -d
    return (a & low) != 0


def subset_search(int mode, int m, int64_t cap, int64_t required,
                  const int64_t[::1] costs,
                  const int64_t[::1] add_b, const int64_t[::1] add_v,
                  const int64_t[::1] sm_b, const int64_t[::1] sm_mask, const int64_t[::1] sm_z,
                  const int64_t[::1] sym_b, const int64_t[::1] sym_v,
                  const int64_t[::1] tab_b, const int64_t[::1] tab_v):
    cdef Py_ssize_t n_add = add_b.shape[0]
    cdef Py_ssize_t n_sm = sm_b.shape[0]
    cdef Py_ssize_t n_sym = sym_b.shape[0]
    cdef Py_ssize_t n_tab = tab_b.shape[0]
    cdef int64_t total = (<int64_t>1) << m
    cdef int64_t size = total
    cdef int64_t *sums = <int64_t *>malloc((n_add + 1) * sizeof(int64_t))
    cdef int64_t mask = 0, cost = 0, t, v, b, val_sum, pe_sum, obj
    cdef int64_t best_mask = -1, best_obj = 0, ties = 0
    cdef int cnt = 0, bit
    cdef Py_ssize_t i
    cdef bint feasible, adding
    if sums == NULL:
        raise MemoryError()
    try:
        for i in range(n_add):
            sums[i] = 0
        t = 0
        while t < total:
            if t > 0:
                bit = __builtin_ctzll(<unsigned long long>t)
                mask ^= (<int64_t>1) << bit
                adding = (mask >> bit) & 1
                if adding:
                    cost += costs[bit]
                    cnt += 1
                    for i in range(n_add):
                        sums[i] += add_v[i * m + bit]
                else:
                    cost -= costs[bit]
                    cnt -= 1
                    for i in range(n_add):
                        sums[i] -= add_v[i * m + bit]
            t += 1
            if (mask & required) != required:
                continue
            val_sum = 0
            pe_sum = 0
            for i in range(n_add):
                v = sums[i]
                b = add_b[i]
                val_sum += v
                pe_sum += v if v < b else b
            for i in range(n_sm):
                if (mask & sm_mask[i]) == sm_mask[i]:
                    v = sm_z[i]
                    b = sm_b[i]
                    val_sum += v
                    pe_sum += v if v < b else b
            for i in range(n_sym):
                v = sym_v[i * (m + 1) + cnt]
                b = sym_b[i]
                val_sum += v
                pe_sum += v if v < b else b
            for i in range(n_tab):
                v = tab_v[i * size + mask]
                b = tab_b[i]
                val_sum += v
                pe_sum += v if v < b else b
            if mode == 0:
                feasible = cost <= cap
                obj = val_sum - cost
            elif mode == 1:
                feasible = pe_sum >= cost
                obj = val_sum - cost
            else:
                feasible = True
                obj = pe_sum - cost
            if not feasible:
                continue
            if best_mask < 0 or obj > best_obj:
                best_mask = mask
                best_obj = obj
                ties = 1
            elif obj == best_obj:
                ties += 1
                if _better(mask, best_mask):
                    best_mask = mask
    finally:
        free(sums)
    return best_mask, best_obj, ties


def skip_knapsack(const int64_t[::1] weights, const int64_t[::1] profits,
                  const int64_t[::1] jump, int64_t capacity):
    """Max profit over selections where taking item i skips to jump[i]."""
    cdef Py_ssize_t n = weights.shape[0]
    cdef Py_ssize_t P = 0, i, p, width
    cdef int64_t inf = capacity + 1
    cdef int64_t skip, take, w
    for i in range(n):
        P += profits[i]
    width = P + 1
    table = np.empty((n + 1) * width, dtype=np.int64)
    cdef int64_t[::1] f = table
    f[n * width] = 0
    for p in range(1, width):
        f[n * width + p] = inf
    for i in range(n - 1, -1, -1):
        w = weights[i]
        if w > inf:
            w = inf
        for p in range(width):
            skip = f[(i + 1) * width + p]
            if p >= profits[i]:
                take = w + f[jump[i] * width + p - profits[i]]
                if take > inf:
                    take = inf
            else:
                take = inf
            f[i * width + p] = take if take < skip else skip
    cdef Py_ssize_t best = 0
    for p in range(width - 1, -1, -1):
        if f[p] <= capacity:
            best = p
            break
    chosen = []
    i = 0
    p = best
    while i < n:
        if f[i * width + p] == f[(i + 1) * width + p]:
            i += 1
        else:
            chosen.append(i)
            p -= profits[i]
            i = jump[i]
    return best, chosen
