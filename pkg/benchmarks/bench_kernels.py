"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 2000]

Timings bypass the capacity memo so each call does the full quadrature.
"""
import argparse
import timeit

import numpy as np

from vlczf import _kernels_py as py

try:
    from vlczf import _kernels as cy
except ImportError:
    cy = None


def capacity_workload(mod, avals):
    def run():
        for a in avals:
            mod.capacity_nats(a)
    return run


def extent_workload(mod, cases):
    def run():
        for h, c, fixed, axis in cases:
            mod.max_extent(*h, *c, fixed, axis, 1e-9)
    return run


def make_cases(n, seed=0):
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        h = tuple(float(v) for v in 0.1 + 4.9 * rng.random(4))
        if abs(h[0] * h[3] - h[1] * h[2]) < 1e-3:
            continue
        xi = float(rng.uniform(0.05, 0.95))
        c = (xi * (h[0] + h[1]), xi * (h[2] + h[3]))
        cases.append((h, c, float(rng.uniform(0, 0.2)), int(rng.integers(0, 2))))
    return cases


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=2000, help="calls per workload")
    args = ap.parse_args()

    avals = np.logspace(-3, 4, args.n).tolist()
    cases = make_cases(args.n)
    workloads = {
        "capacity_nats": lambda m: capacity_workload(m, avals),
        "max_extent": lambda m: extent_workload(m, cases),
    }
    backends = [("python", py)] + ([("cython", cy)] if cy is not None else [])
    if cy is None:
        print("compiled extension not built; timing the Python backend only")

    print(f"{'kernel':<15}{'backend':<9}{'best us/call':>14}{'speedup':>10}")
    for name, make in workloads.items():
        base = None
        for label, mod in backends:
            best = min(timeit.repeat(make(mod), number=1, repeat=args.repeat)) / args.n * 1e6
            base = base or best
            print(f"{name:<15}{label:<9}{best:>14.2f}{base / best:>9.1f}x")


if __name__ == "__main__":
    main()
