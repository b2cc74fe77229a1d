"""Compare the compiled and pure-Python simplex kernels.

Usage: python3 benchmarks/bench_simplex.py [--lps N] [--size N] [--seed S]

Solves a fixed random LP corpus with each kernel, checks that both return
identical results, and reports wall time and speedup.  A second section
runs branch-and-bound on random bounded MIPs with each kernel.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from bnb_auditor import _kernel
from bnb_auditor.bnb import Tolerances, solve_bnb
from bnb_auditor.model import MipProblem
from bnb_auditor.simplex_fp import solve_lp_fp


def random_lp(rng: random.Random, n: int, m: int) -> MipProblem:
    """Dense bounded LP with integer data, feasible by construction."""
    point = [rng.randint(0, 5) for _ in range(n)]
    rows, rhs = [], []
    for _ in range(m):
        row = tuple((j, Fraction(a)) for j in range(n) if (a := rng.randint(-9, 9)))
        if not row:
            row = ((rng.randrange(n), Fraction(1)),)
        rows.append(row)
        rhs.append(sum(a * point[j] for j, a in row) - rng.randint(0, 5))
    return MipProblem(
        "bench", tuple(f"x{j}" for j in range(n)),
        tuple(Fraction(rng.randint(-9, 9)) for _ in range(n)), tuple(rows), tuple(rhs),
        tuple(f"r{i}" for i in range(m)), (Fraction(0),) * n, (Fraction(5),) * n, frozenset(),
    )


def random_mip(rng: random.Random, n: int, m: int) -> MipProblem:
    p = random_lp(rng, n, m)
    return MipProblem(p.name, p.var_names, p.objective, p.rows, p.rhs, p.row_names,
                      p.lower, p.upper, frozenset(j for j in range(n) if j % 2 == 0))


def _time(fn, items, kernel):
    start = time.perf_counter()
    results = [fn(p, kernel) for p in items]
    return time.perf_counter() - start, results


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lps", type=int, default=200)
    ap.add_argument("--size", type=int, default=30, help="variables and rows per LP")
    ap.add_argument("--mips", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    try:
        _kernel.load("cython")
    except ImportError:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = random.Random(args.seed)
    lps = [random_lp(rng, args.size, args.size) for _ in range(args.lps)]
    mips = [random_mip(rng, 20, 15) for _ in range(args.mips)]

    def lp(p, k):
        return solve_lp_fp(p, kernel=k)

    def bnb(p, k):
        out = solve_bnb(p, Tolerances(), kernel=k)
        return out.objective, out.events

    print(f"{'workload':<28}{'python s':>10}{'cython s':>10}{'speedup':>9}  identical")
    for name, fn, items in ((f"LP {args.size}x{args.size} x{args.lps}", lp, lps),
                            (f"B&B 20x15 x{args.mips}", bnb, mips)):
        # the first pass also warms caches shared by both kernels
        _time(fn, items[:1], "python")
        tp, rp = _time(fn, items, "python")
        tc, rc = _time(fn, items, "cython")
        print(f"{name:<28}{tp:>10.3f}{tc:>10.3f}{tp / tc:>8.1f}x  {rp == rc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
