"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints the best-of-N wall time per workload for each available backend
and the speedup. Both backends are checked to return identical results.
"""

import argparse
import random
import time

from poolpb import kernels
from poolpb.genio import SyntheticConfig, gen_synthetic


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def subset_workloads():
    for family, n, m in [("uniform", 50, 10), ("normal", 100, 12), ("bernoulli", 200, 14)]:
        I = gen_synthetic(SyntheticConfig(family, n, m, 1))
        S = kernels.ScaledInstance(I)
        for mode, label in [(0, "uwo"), (1, "uwo-wp"), (2, "maxpe")]:
            yield f"subset_search {label} {family} n={n} m={m}", lambda b, S=S, mode=mode: kernels.subset_search(S, mode, backend=b)


def knapsack_workloads():
    rng = random.Random(0)
    for n, top in [(60, 200), (150, 400)]:
        w = [rng.randint(1, 100) for _ in range(n)]
        p = [rng.randint(0, top) for _ in range(n)]
        cap = sum(w) // 3
        plain = list(range(1, n + 1))
        yield f"skip_knapsack plain n={n}", lambda b, w=w, p=p, cap=cap, j=plain: kernels.skip_knapsack(w, p, j, cap, backend=b)
        jump = [rng.randint(i + 1, min(n, i + 6)) for i in range(n)]
        yield f"skip_knapsack laminar n={n}", lambda b, w=w, p=p, cap=cap, j=jump: kernels.skip_knapsack(w, p, j, cap, backend=b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernels unavailable; timing the pure-Python backend only")
    print(f"{'workload':<48}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for label, fn in list(subset_workloads()) + list(knapsack_workloads()):
        times, outs = [], []
        for b in backends:
            t, out = best_of(lambda: fn(b), args.repeat)
            times.append(t)
            outs.append(out)
        if any(o != outs[0] for o in outs):
            raise SystemExit(f"backends disagree on {label}")
        row = f"{label:<48}" + "".join(f"{t * 1000:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
