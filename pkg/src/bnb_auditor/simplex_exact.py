"""Round-off-free LP machinery over the rationals.

* :func:`solve_lp_exact` - bounded-variable tableau simplex with Bland's rule.
* :func:`factorize_basis_exact` - exact LU of a given basis and the primal and
  dual solutions it induces.
* :func:`complete_solution` - fix integer variables, solve for the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .model import MipProblem
from .rational import INF, NEG_INF, ExtendedRational, Infinity
from .simplex_fp import Basis, VarStatus

ZERO = Fraction(0)
ONE = Fraction(1)


class ExactStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    DUAL_BOUND = "dual_bound"  # factorization: exactly dual feasible only
    UNDECIDED = "undecided"    # factorization: neither


@dataclass(frozen=True)
class ExactLpResult:
    status: ExactStatus
    objective: ExtendedRational
    x: tuple[Fraction, ...] | None = None
    y: tuple[Fraction, ...] | None = None
    r_plus: tuple[Fraction, ...] | None = None
    r_minus: tuple[Fraction, ...] | None = None
    farkas: tuple[Fraction, ...] | None = None


class SingularBasisError(ArithmeticError):
    pass


def _bounds(p: MipProblem, local_bounds):
    if local_bounds is None:
        return list(p.lower), list(p.upper)
    lo, up = local_bounds
    return list(lo), list(up)


def dual_objective(p: MipProblem, lower, upper, y, r_plus, r_minus) -> ExtendedRational:
    """``b^T y + l^T r+ - u^T r-``; a nonzero multiplier on an infinite bound gives -inf."""
    total = sum((b * yi for b, yi in zip(p.rhs, y) if yi), ZERO)
    for j in range(p.num_vars):
        if r_plus[j]:
            if isinstance(lower[j], Infinity):
                return NEG_INF
            total += lower[j] * r_plus[j]
        if r_minus[j]:
            if isinstance(upper[j], Infinity):
                return NEG_INF
            total -= upper[j] * r_minus[j]
    return total


def _reduced_costs(p: MipProblem, y):
    rp, rm = [], []
    for j, col in enumerate(p.columns):
        d = p.objective[j] - sum((y[i] * a for i, a in col), ZERO)
        rp.append(d if d > 0 else ZERO)
        rm.append(-d if d < 0 else ZERO)
    return tuple(rp), tuple(rm)


# --------------------------------------------------------------------------
# exact simplex

class _Tableau:
    """Dense tableau ``B^-1 [A | -I | I]`` with explicit basic values."""

    def __init__(self, p: MipProblem, lower, upper):
        n, m = p.num_vars, p.num_rows
        self.n, self.m = n, m
        N = n + 2 * m
        self.N = N
        self.lo: list[ExtendedRational] = list(lower) + [ZERO] * (2 * m)
        self.up: list[ExtendedRational] = list(upper) + [INF] * (2 * m)
        self.x = [ZERO] * N
        self.basic = [False] * N
        self.head = [0] * m
        for j in range(n):
            if not isinstance(self.lo[j], Infinity):
                self.x[j] = self.lo[j]
            elif not isinstance(self.up[j], Infinity):
                self.x[j] = self.up[j]
        rows = []
        for i in range(m):
            r = [ZERO] * N
            for j, a in p.rows[i]:
                r[j] = a
            r[n + i] = -ONE
            r[n + m + i] = ONE
            rows.append(r)
        self.need_phase1 = False
        for i in range(m):
            act = sum((a * self.x[j] for j, a in p.rows[i]), ZERO) - p.rhs[i]
            if act >= 0:
                # logical basic: row scaled by -1 so its column becomes e_i
                rows[i] = [-v for v in rows[i]]
                self.head[i] = n + i
                self.x[n + i] = act
                self._fix(n + m + i)
            else:
                self.head[i] = n + m + i
                self.x[n + m + i] = -act
                self.need_phase1 = True
            self.basic[self.head[i]] = True
        self.T = rows

    def _fix(self, j):
        self.lo[j] = ZERO
        self.up[j] = ZERO

    def _fixed(self, j):
        return self.lo[j] == self.up[j]

    def duals(self, cost):
        # B^-1 sits in the (negated) logical block of the tableau
        n, m = self.n, self.m
        y = []
        for i in range(m):
            s = ZERO
            for r in range(m):
                c = cost[self.head[r]]
                if c:
                    s -= c * self.T[r][n + i]
            y.append(s)
        return y

    def run(self, cost) -> ExactStatus:
        n, m, N = self.n, self.m, self.N
        T, x, lo, up = self.T, self.x, self.lo, self.up
        while True:
            q = -1
            direction = 0
            for j in range(N):
                if self.basic[j] or self._fixed(j):
                    continue
                d = cost[j] - sum((cost[self.head[r]] * T[r][j] for r in range(m)
                                   if cost[self.head[r]] and T[r][j]), ZERO)
                at_lo = x[j] == lo[j]
                at_up = x[j] == up[j]
                if d < 0 and not at_up:
                    q, direction = j, 1
                elif d > 0 and not at_lo:
                    q, direction = j, -1
                if q >= 0:
                    break
            if q < 0:
                return ExactStatus.OPTIMAL
            span = up[q] - lo[q] if not (isinstance(up[q], Infinity) or isinstance(lo[q], Infinity)) else INF
            best: ExtendedRational = INF
            leave = -1
            leave_up = False
            for r in range(m):
                a = T[r][q]
                if not a:
                    continue
                jb = self.head[r]
                rate = -direction * a
                if rate < 0:
                    if isinstance(lo[jb], Infinity):
                        continue
                    t = (x[jb] - lo[jb]) / -rate
                    to_up = False
                else:
                    if isinstance(up[jb], Infinity):
                        continue
                    t = (up[jb] - x[jb]) / rate
                    to_up = True
                if t < best or (t == best and leave >= 0 and jb < self.head[leave]):
                    best, leave, leave_up = t, r, to_up
            if span <= best:
                if isinstance(span, Infinity):
                    return ExactStatus.UNBOUNDED
                step = span
                leave = -1
            else:
                step = best
            # move along the edge
            if step:
                for r in range(m):
                    a = T[r][q]
                    if a:
                        x[self.head[r]] -= direction * a * step
                x[q] += direction * step
            if leave < 0:
                x[q] = up[q] if direction > 0 else lo[q]
                continue
            jl = self.head[leave]
            x[jl] = up[jl] if leave_up else lo[jl]
            if jl >= n + m:
                self._fix(jl)
            prow = T[leave]
            piv = prow[q]
            T[leave] = prow = [v / piv for v in prow]
            for r in range(m):
                if r != leave:
                    f = T[r][q]
                    if f:
                        T[r] = [a - f * b for a, b in zip(T[r], prow)]
            self.basic[jl] = False
            self.basic[q] = True
            self.head[leave] = q


def solve_lp_exact(p: MipProblem, local_bounds=None) -> ExactLpResult:
    """Solve the LP relaxation exactly (Bland's rule, so it always terminates)."""
    lower, upper = _bounds(p, local_bounds)
    n, m = p.num_vars, p.num_rows
    if any(l > u for l, u in zip(lower, upper)):
        return ExactLpResult(ExactStatus.INFEASIBLE, INF)
    tab = _Tableau(p, lower, upper)
    N = tab.N
    if tab.need_phase1:
        cost1 = [ZERO] * (n + m) + [ONE] * m
        tab.run(cost1)
        infeas = sum((tab.x[n + m + i] for i in range(m)), ZERO)
        if infeas > 0:
            y = tuple(tab.duals(cost1))
            return ExactLpResult(ExactStatus.INFEASIBLE, INF, farkas=y)
        for i in range(m):
            tab._fix(n + m + i)
    cost2 = list(p.objective) + [ZERO] * (2 * m)
    status = tab.run(cost2)
    if status is ExactStatus.UNBOUNDED:
        return ExactLpResult(ExactStatus.UNBOUNDED, NEG_INF, x=tuple(tab.x[:n]))
    x = tuple(tab.x[:n])
    y = tuple(tab.duals(cost2))
    rp, rm = _reduced_costs(p, y)
    obj = p.evaluate(x)
    return ExactLpResult(ExactStatus.OPTIMAL, obj, x=x, y=y, r_plus=rp, r_minus=rm)


# --------------------------------------------------------------------------
# exact LU of a simplex basis

def rational_lu(matrix: Sequence[Sequence[Fraction]]):
    """LU with row pivoting on the largest-magnitude entry: ``P A = L U``.

    Returns ``(lu, perm)`` with unit-lower ``L`` and ``U`` packed into one
    matrix; ``perm[k]`` is the original row moved to position ``k``.
    """
    k = len(matrix)
    lu = [list(r) for r in matrix]
    perm = list(range(k))
    for c in range(k):
        p = max(range(c, k), key=lambda r: (abs(lu[r][c]), -r))
        if lu[p][c] == 0:
            raise SingularBasisError("basis matrix is singular")
        if p != c:
            lu[p], lu[c] = lu[c], lu[p]
            perm[p], perm[c] = perm[c], perm[p]
        piv = lu[c][c]
        for r in range(c + 1, k):
            if lu[r][c]:
                f = lu[r][c] / piv
                lu[r][c] = f
                row, prow = lu[r], lu[c]
                for j in range(c + 1, k):
                    if prow[j]:
                        row[j] -= f * prow[j]
    return lu, perm


def lu_solve(lu, perm, rhs):
    k = len(lu)
    z = [rhs[perm[i]] for i in range(k)]
    for i in range(k):
        z[i] -= sum((lu[i][j] * z[j] for j in range(i) if lu[i][j]), ZERO)
    for i in reversed(range(k)):
        z[i] = (z[i] - sum((lu[i][j] * z[j] for j in range(i + 1, k) if lu[i][j]), ZERO)) / lu[i][i]
    return z


def lu_solve_transpose(lu, perm, rhs):
    """Solve ``A^T w = rhs`` given ``P A = L U``."""
    k = len(lu)
    # U^T v = rhs, then L^T u = v, then w = P^T u
    v = list(rhs)
    for i in range(k):
        v[i] = (v[i] - sum((lu[j][i] * v[j] for j in range(i) if lu[j][i]), ZERO)) / lu[i][i]
    for i in reversed(range(k)):
        v[i] -= sum((lu[j][i] * v[j] for j in range(i + 1, k) if lu[j][i]), ZERO)
    w = [ZERO] * k
    for i in range(k):
        w[perm[i]] = v[i]
    return w


def factorize_basis_exact(p: MipProblem, local_bounds, basis: Basis) -> ExactLpResult:
    """Exact primal/dual solution of the vertex that ``basis`` describes.

    Returns ``OPTIMAL`` if the pair is exactly primal and dual feasible with
    equal objectives, ``DUAL_BOUND`` if only the dual side is feasible (its
    objective is still a valid lower bound), else ``UNDECIDED``.
    """
    lower, upper = _bounds(p, local_bounds)
    n, m = p.num_vars, p.num_rows
    if len(basis.structural) != n or len(basis.logical) != m:
        raise ValueError("basis does not match the model dimensions")
    if any(l > u for l, u in zip(lower, upper)):
        return ExactLpResult(ExactStatus.UNDECIDED, NEG_INF)
    cols = p.columns
    basic_struct = [j for j in range(n) if basis.structural[j] is VarStatus.BASIC]
    basic_logic = [i for i in range(m) if basis.logical[i] is VarStatus.BASIC]
    if len(basic_struct) + len(basic_logic) != m:
        raise ValueError("basis must have exactly one basic entry per row")

    x: list[Fraction] = [ZERO] * n
    for j in range(n):
        st = basis.structural[j]
        if st is VarStatus.AT_LOWER:
            bound = lower[j]
        elif st is VarStatus.AT_UPPER:
            bound = upper[j]
        else:
            continue
        if isinstance(bound, Infinity):
            return ExactLpResult(ExactStatus.UNDECIDED, NEG_INF)
        x[j] = bound
    rhs = list(p.rhs)
    for j in range(n):
        if basis.structural[j] is not VarStatus.BASIC and x[j]:
            for i, a in cols[j]:
                rhs[i] -= a * x[j]
    # basis columns: structural A_j or logical -e_i
    bmat = [[ZERO] * m for _ in range(m)]
    for c, j in enumerate(basic_struct):
        for i, a in cols[j]:
            bmat[i][c] = a
    for c, i in enumerate(basic_logic, start=len(basic_struct)):
        bmat[i][c] = -ONE
    try:
        lu, perm = rational_lu(bmat)
    except SingularBasisError:
        return ExactLpResult(ExactStatus.UNDECIDED, NEG_INF)
    xb = lu_solve(lu, perm, rhs) if m else []
    for c, j in enumerate(basic_struct):
        x[j] = xb[c]
    cb = [p.objective[j] for j in basic_struct] + [ZERO] * len(basic_logic)
    y = lu_solve_transpose(lu, perm, cb) if m else []
    rp, rm = _reduced_costs(p, y)

    primal_ok = all(lower[j] <= x[j] <= upper[j] for j in range(n)) and all(
        sum((a * x[j] for j, a in row), ZERO) >= b for row, b in zip(p.rows, p.rhs)
    )
    dual_ok = all(v >= 0 for v in y)
    bound = dual_objective(p, lower, upper, y, rp, rm) if dual_ok else NEG_INF
    xt, yt = tuple(x), tuple(y)
    if dual_ok and primal_ok:
        obj = p.evaluate(xt)
        if bound == obj:
            return ExactLpResult(ExactStatus.OPTIMAL, obj, x=xt, y=yt, r_plus=rp, r_minus=rm)
    if dual_ok and not isinstance(bound, Infinity):
        return ExactLpResult(ExactStatus.DUAL_BOUND, bound, y=yt, r_plus=rp, r_minus=rm)
    return ExactLpResult(ExactStatus.UNDECIDED, NEG_INF)


# --------------------------------------------------------------------------
# solution completion

@dataclass(frozen=True)
class Completion:
    """An exactly feasible solution extending a fixed integer assignment."""

    x: tuple[Fraction, ...]
    objective: Fraction
    unbounded: bool = False


@dataclass(frozen=True)
class CertifiedImpossible:
    """No completion exists; ``farkas`` certifies the fixed LP is infeasible."""

    farkas: tuple[Fraction, ...] | None


def clamp_assignment(p: MipProblem, assignment: Mapping[int, Fraction], lower, upper):
    out = {}
    for j, v in assignment.items():
        lo, up = lower[j], upper[j]
        if not isinstance(lo, Infinity):
            v = max(v, Fraction(math.ceil(lo)))
        if not isinstance(up, Infinity):
            v = min(v, Fraction(math.floor(up)))
        out[j] = v
    return out


def complete_solution(p: MipProblem, integer_assignment: Mapping[int, Fraction],
                      local_bounds=None) -> Completion | CertifiedImpossible:
    """Fix the integer variables and solve the continuous rest exactly.

    Assigned values are clamped into their (local) bounds first.
    """
    lower, upper = _bounds(p, local_bounds)
    fixed = clamp_assignment(p, integer_assignment, lower, upper)
    for j, v in fixed.items():
        if v.denominator != 1:
            raise ValueError(f"assignment for variable {j} is not integral")
        lower[j] = upper[j] = v
    res = solve_lp_exact(p, (lower, upper))
    if res.status is ExactStatus.INFEASIBLE:
        return CertifiedImpossible(res.farkas)
    if res.status is ExactStatus.UNBOUNDED:
        # any feasible point will do; minimize nothing
        zero = MipProblem(p.name, p.var_names, (ZERO,) * p.num_vars, p.rows, p.rhs,
                          p.row_names, p.lower, p.upper, p.integers)
        feas = solve_lp_exact(zero, (lower, upper))
        return Completion(feas.x, p.evaluate(feas.x), unbounded=True)
    return Completion(res.x, res.objective)
