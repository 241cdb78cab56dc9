"""Reference implementation of the hot loops, in plain Python integers.

Used when the compiled extension is missing, when ``POOLPB_PURE_PYTHON`` is
set, or when scaled quantities do not fit in 64 bits.
"""


def _better(a, b):
    pa = bin(a).count("1")
    pb = bin(b).count("1")
    if pa != pb:
        return pa < pb
    d = a ^ b
    return bool(a & (d & -d))


def subset_search(mode, m, cap, required, costs, add_b, add_v, sm_b, sm_mask, sm_z,
                  sym_b, sym_v, tab_b, tab_v):
    """Scan all 2^m subsets in Gray-code order.

    mode 0 maximises welfare subject to ``cost <= cap``; mode 1 maximises
    welfare over subsets with non-negative payment excess; mode 2 maximises
    the payment excess itself. Only supersets of ``required`` are considered.
    Returns ``(best_mask, best_objective, tie_count)``; ``best_mask`` is -1
    when nothing is feasible.
    """
    n_add = len(add_b)
    size = 1 << m
    rows = [list(add_v[i * m:(i + 1) * m]) for i in range(n_add)]
    sums = [0] * n_add
    sm = list(zip(sm_b, sm_mask, sm_z))
    sym = [(sym_b[i], sym_v[i * (m + 1):(i + 1) * (m + 1)]) for i in range(len(sym_b))]
    tab = [(tab_b[i], tab_v[i * size:(i + 1) * size]) for i in range(len(tab_b))]
    mask = cost = cnt = 0
    best_mask, best_obj, ties = -1, 0, 0
    for t in range(size):
        if t:
            bit = (t & -t).bit_length() - 1
            mask ^= 1 << bit
            if mask >> bit & 1:
                cost += costs[bit]
                cnt += 1
                for i in range(n_add):
                    sums[i] += rows[i][bit]
            else:
                cost -= costs[bit]
                cnt -= 1
                for i in range(n_add):
                    sums[i] -= rows[i][bit]
        if mask & required != required:
            continue
        val_sum = 0
        pe_sum = 0
        for i in range(n_add):
            v = sums[i]
            val_sum += v
            pe_sum += min(v, add_b[i])
        for b, d, z in sm:
            if mask & d == d:
                val_sum += z
                pe_sum += min(z, b)
        for b, row in sym:
            v = row[cnt]
            val_sum += v
            pe_sum += min(v, b)
        for b, row in tab:
            v = row[mask]
            val_sum += v
            pe_sum += min(v, b)
        if mode == 0:
            if cost > cap:
                continue
            obj = val_sum - cost
        elif mode == 1:
            if pe_sum < cost:
                continue
            obj = val_sum - cost
        else:
            obj = pe_sum - cost
        if best_mask < 0 or obj > best_obj:
            best_mask, best_obj, ties = mask, obj, 1
        elif obj == best_obj:
            ties += 1
            if _better(mask, best_mask):
                best_mask = mask
    return best_mask, best_obj, ties


def skip_knapsack(weights, profits, jump, capacity):
    """Max-profit selection with min-weight-per-profit dynamic programming.

    Items are visited in order; taking item ``i`` continues at ``jump[i]``
    (``i + 1`` for plain 0/1 knapsack, the end of ``i``'s subtree for a
    pre-ordered forest). Returns ``(profit, chosen_indices)``.
    """
    n = len(weights)
    width = sum(profits) + 1
    inf = capacity + 1
    f = [None] * (n + 1)
    f[n] = [0] + [inf] * (width - 1)
    for i in range(n - 1, -1, -1):
        w = min(weights[i], inf)
        pi = profits[i]
        nxt = f[i + 1]
        jmp = f[jump[i]]
        row = list(nxt)
        for p in range(pi, width):
            take = w + jmp[p - pi]
            if take < row[p]:
                row[p] = take
        f[i] = row
    best = 0
    for p in range(width - 1, -1, -1):
        if f[0][p] <= capacity:
            best = p
            break
    chosen = []
    i, p = 0, best
    while i < n:
        if f[i][p] == f[i + 1][p]:
            i += 1
        else:
            chosen.append(i)
            p -= profits[i]
            i = jump[i]
    return best, chosen
