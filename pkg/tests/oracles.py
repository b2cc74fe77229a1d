"""Independent reference computations and random instance generators for tests.

Nothing here calls the simplex code: LP optima come from vertex enumeration
and MIP optima from enumerating integer points.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from bnb_auditor.model import MipProblem

ZERO = Fraction(0)


def _solve_square(mat, rhs):
    """Gaussian elimination over the rationals; ``None`` if singular."""
    k = len(mat)
    a = [list(row) + [b] for row, b in zip(mat, rhs)]
    for c in range(k):
        piv = next((r for r in range(c, k) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [v / pv for v in a[c]]
        for r in range(k):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][k] for r in range(k)]


def feasible(p: MipProblem, x, lower, upper) -> bool:
    for j, v in enumerate(x):
        if v < lower[j] or v > upper[j]:
            return False
    return all(sum((a * x[j] for j, a in row), ZERO) >= b for row, b in zip(p.rows, p.rhs))


def lp_vertex_optimum(p: MipProblem, lower=None, upper=None):
    """Exact LP optimum over a bounded box by enumerating all vertices.

    Fixed variables are substituted out first, so only the free dimensions
    are enumerated.  Returns ``None`` if infeasible.  Every bound must be
    finite.
    """
    lower = list(p.lower if lower is None else lower)
    upper = list(p.upper if upper is None else upper)
    if any(l > u for l, u in zip(lower, upper)):
        return None
    free = [j for j in range(p.num_vars) if lower[j] != upper[j]]
    pos = {j: k for k, j in enumerate(free)}
    n = len(free)
    base = sum((p.objective[j] * lower[j] for j in range(p.num_vars) if j not in pos), ZERO)
    # candidate hyperplanes: rows as equalities plus both bounds of each free variable
    planes = []
    for row, b in zip(p.rows, p.rhs):
        coef = [ZERO] * n
        rest = b
        for j, a in row:
            if j in pos:
                coef[pos[j]] = a
            else:
                rest -= a * lower[j]
        planes.append((coef, rest))
    row_planes = list(planes)
    for k, j in enumerate(free):
        e = [ZERO] * n
        e[k] = Fraction(1)
        planes.append((e, lower[j]))
        planes.append((list(e), upper[j]))

    def ok(x):
        if any(v < lower[j] or v > upper[j] for j, v in zip(free, x)):
            return False
        return all(sum((a * v for a, v in zip(coef, x)), ZERO) >= rest for coef, rest in row_planes)

    if n == 0:
        return base if ok([]) else None
    best = None
    for combo in itertools.combinations(range(len(planes)), n):
        x = _solve_square([planes[i][0] for i in combo], [planes[i][1] for i in combo])
        if x is None or not ok(x):
            continue
        val = base + sum((p.objective[j] * v for j, v in zip(free, x)), ZERO)
        if best is None or val < best:
            best = val
    return best


def mip_brute_force(p: MipProblem):
    """Exact MIP optimum: enumerate integer points, vertex-enumerate the rest.

    Integer variables need finite bounds.  Returns ``None`` if infeasible.
    """
    ints = sorted(p.integers)
    ranges = []
    for j in ints:
        lo = -((-p.lower[j].numerator) // p.lower[j].denominator)
        up = p.upper[j].numerator // p.upper[j].denominator
        ranges.append(range(lo, up + 1))
    best = None
    for point in itertools.product(*ranges):
        lower, upper = list(p.lower), list(p.upper)
        for j, v in zip(ints, point):
            lower[j] = upper[j] = Fraction(v)
        if len(ints) == p.num_vars:
            if not feasible(p, lower, lower, upper):
                continue
            val = p.evaluate(lower)
        else:
            val = lp_vertex_optimum(p, lower, upper)
            if val is None:
                continue
        if best is None or val < best:
            best = val
    return best


def _model(name, c, rows, rhs, lower, upper, ints) -> MipProblem:
    n = len(c)
    return MipProblem(
        name, tuple(f"x{j}" for j in range(n)), tuple(Fraction(v) for v in c),
        tuple(tuple(sorted(r.items())) for r in rows), tuple(Fraction(b) for b in rhs),
        tuple(f"r{i}" for i in range(len(rows))),
        tuple(Fraction(v) for v in lower), tuple(Fraction(v) for v in upper), frozenset(ints),
    )


def _random_rows(rng, n, m, lo=-10, hi=10, density=0.7):
    rows = []
    for _ in range(m):
        r = {}
        for j in range(n):
            if rng.random() < density:
                a = rng.randint(lo, hi)
                if a:
                    r[j] = Fraction(a)
        if not r:
            r[rng.randrange(n)] = Fraction(rng.choice([-1, 1]) * rng.randint(1, hi))
        rows.append(r)
    return rows


def random_lp(rng: random.Random, max_vars=8, max_rows=8) -> MipProblem:
    """Bounded LP with integer data in [-10, 10]; may be infeasible."""
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    rows = _random_rows(rng, n, m)
    rhs = [rng.randint(-10, 10) for _ in range(m)]
    lower = [rng.randint(-10, 0) for _ in range(n)]
    upper = [lo + rng.randint(0, 10) for lo in lower]
    c = [rng.randint(-10, 10) for _ in range(n)]
    return _model("lp", c, rows, rhs, lower, upper, ())


def random_small_lp(rng: random.Random, max_total=8) -> MipProblem:
    """Bounded LP with ``n + m <= max_total`` for vertex enumeration."""
    n = rng.randint(1, max_total - 1)
    m = rng.randint(1, max_total - n)
    rows = _random_rows(rng, n, m)
    rhs = [rng.randint(-10, 10) for _ in range(m)]
    lower = [rng.randint(-5, 0) for _ in range(n)]
    upper = [lo + rng.randint(0, 6) for lo in lower]
    c = [rng.randint(-10, 10) for _ in range(n)]
    return _model("lp", c, rows, rhs, lower, upper, ())


def random_binary_mip(rng: random.Random, max_vars=6, max_rows=6) -> MipProblem:
    """Pure binary MIP with integer data; may be infeasible."""
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_rows)
    rows = _random_rows(rng, n, m)
    rhs = []
    for r in rows:
        # right-hand sides near the row's range so that both outcomes occur
        lo = sum(min(a, 0) for a in r.values())
        hi = sum(max(a, 0) for a in r.values())
        rhs.append(rng.randint(int(lo), int(hi)))
    c = [rng.randint(-10, 10) for _ in range(n)]
    return _model("bin", c, rows, rhs, [0] * n, [1] * n, range(n))


def random_bounded_mip(rng: random.Random, max_vars=8, max_rows=6) -> MipProblem:
    """Mixed-integer model with finite bounds, feasible by construction."""
    n = rng.randint(2, max_vars)
    m = rng.randint(1, max_rows)
    ints = [j for j in range(n) if rng.random() < 0.6] or [0]
    lower = [0] * n
    upper = [rng.randint(1, 4) for _ in range(n)]
    point = [Fraction(rng.randint(0, upper[j])) for j in range(n)]
    rows = _random_rows(rng, n, m)
    rhs = []
    for r in rows:
        act = sum(a * point[j] for j, a in r.items())
        rhs.append(act - rng.randint(0, 3))
    c = [rng.randint(-10, 10) for _ in range(n)]
    return _model("mix", c, rows, rhs, lower, upper, ints)
