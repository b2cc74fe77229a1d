"""Pure-Python bounded-variable revised simplex kernel.

This is the fallback used when the compiled ``_simplex_core`` extension is
not available.  Both kernels perform the same float operations in the same
order, so they return bit-identical results on IEEE-754 hardware.

Variable layout: ``0..n-1`` structurals, ``n..n+m-1`` logicals ``s`` with
``A x - s = b`` and ``s >= 0``, ``n+m..n+2m-1`` phase-1 artificials with
column ``+e_i``.
"""

BIG = 1e100
REFACTOR_EVERY = 50

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2
FREE = 3


class _Lp:
    def __init__(self, m, n, col_start, col_row, col_val, b, lo, hi, has_lo, has_hi):
        self.m = m
        self.n = n
        self.cs = col_start
        self.cr = col_row
        self.cv = col_val
        self.b = b
        N = n + 2 * m
        self.N = N
        self.L = [0.0] * N
        self.U = [BIG] * N
        self.hl = [1] * N
        self.hu = [0] * N
        for j in range(n):
            self.L[j] = lo[j]
            self.U[j] = hi[j]
            self.hl[j] = has_lo[j]
            self.hu[j] = has_hi[j]
        self.x = [0.0] * N
        self.state = [AT_LOWER] * N
        self.head = [0] * m
        self.binv = [[0.0] * m for _ in range(m)]
        self.y = [0.0] * m
        self.alpha = [0.0] * m
        self.iters = 0
        self.changes = 0
        self.degenerate = 0
        self.bland = False

    def fix(self, j, value):
        self.L[j] = value
        self.U[j] = value
        self.hl[j] = 1
        self.hu[j] = 1

    def compute_duals(self, cost):
        m = self.m
        y = self.y
        for i in range(m):
            y[i] = 0.0
        for r in range(m):
            cb = cost[self.head[r]]
            if cb != 0.0:
                row = self.binv[r]
                for i in range(m):
                    y[i] += cb * row[i]

    def reduced_cost(self, j, cost):
        n, m = self.n, self.m
        if j < n:
            s = 0.0
            for k in range(self.cs[j], self.cs[j + 1]):
                s += self.y[self.cr[k]] * self.cv[k]
            return cost[j] - s
        if j < n + m:
            return cost[j] + self.y[j - n]
        return cost[j] - self.y[j - n - m]

    def compute_column(self, q):
        n, m = self.n, self.m
        alpha = self.alpha
        binv = self.binv
        for r in range(m):
            alpha[r] = 0.0
        if q < n:
            for k in range(self.cs[q], self.cs[q + 1]):
                i = self.cr[k]
                v = self.cv[k]
                for r in range(m):
                    alpha[r] += binv[r][i] * v
        elif q < n + m:
            i = q - n
            for r in range(m):
                alpha[r] = -binv[r][i]
        else:
            i = q - n - m
            for r in range(m):
                alpha[r] = binv[r][i]

    def compute_basic_values(self):
        n, m = self.n, self.m
        rhs = list(self.b)
        x = self.x
        for j in range(self.N):
            if self.state[j] == BASIC:
                continue
            xj = x[j]
            if xj == 0.0:
                continue
            if j < n:
                for k in range(self.cs[j], self.cs[j + 1]):
                    rhs[self.cr[k]] -= self.cv[k] * xj
            elif j < n + m:
                rhs[j - n] += xj
            else:
                rhs[j - n - m] -= xj
        for r in range(m):
            row = self.binv[r]
            s = 0.0
            for i in range(m):
                s += row[i] * rhs[i]
            x[self.head[r]] = s

    def pivot(self, r):
        m = self.m
        alpha = self.alpha
        binv = self.binv
        prow = binv[r]
        piv = alpha[r]
        for i in range(m):
            prow[i] = prow[i] / piv
        for s in range(m):
            if s == r:
                continue
            f = alpha[s]
            if f != 0.0:
                row = binv[s]
                for i in range(m):
                    row[i] -= f * prow[i]

    def refactor(self):
        """Gauss-Jordan inverse of the current basis, partial pivoting."""
        n, m = self.n, self.m
        a = [[0.0] * (2 * m) for _ in range(m)]
        for r in range(m):
            a[r][m + r] = 1.0
        for c in range(m):
            j = self.head[c]
            if j < n:
                for k in range(self.cs[j], self.cs[j + 1]):
                    a[self.cr[k]][c] = self.cv[k]
            elif j < n + m:
                a[j - n][c] = -1.0
            else:
                a[j - n - m][c] = 1.0
        for c in range(m):
            p = c
            best = abs(a[c][c])
            for r in range(c + 1, m):
                v = abs(a[r][c])
                if v > best:
                    best = v
                    p = r
            if best < 1e-14:
                return False
            if p != c:
                a[p], a[c] = a[c], a[p]
            prow = a[c]
            piv = prow[c]
            for i in range(2 * m):
                prow[i] = prow[i] / piv
            for r in range(m):
                if r == c:
                    continue
                f = a[r][c]
                if f != 0.0:
                    row = a[r]
                    for i in range(2 * m):
                        row[i] -= f * prow[i]
        # rows of a now hold B^-1 in column-position order
        for r in range(m):
            for i in range(m):
                self.binv[r][i] = a[r][m + i]
        return True

    def run_phase(self, cost, opttol, zerotol, max_iter):
        n, m, N = self.n, self.m, self.N
        L, U, hl, hu = self.L, self.U, self.hl, self.hu
        x, state, head, alpha = self.x, self.state, self.head, self.alpha
        bland_after = 3 * (n + m)
        while True:
            self.compute_duals(cost)
            q = -1
            qdir = 0
            best = 0.0
            for j in range(N):
                st = state[j]
                if st == BASIC:
                    continue
                if hl[j] and hu[j] and L[j] == U[j]:
                    continue
                d = self.reduced_cost(j, cost)
                score = 0.0
                direction = 0
                if st == AT_LOWER:
                    if d < -opttol:
                        score = -d
                        direction = 1
                elif st == AT_UPPER:
                    if d > opttol:
                        score = d
                        direction = -1
                else:
                    if d < -opttol:
                        score = -d
                        direction = 1
                    elif d > opttol:
                        score = d
                        direction = -1
                if direction == 0:
                    continue
                if self.bland:
                    q = j
                    qdir = direction
                    break
                if score > best:
                    best = score
                    q = j
                    qdir = direction
            if q < 0:
                return OPTIMAL
            if self.iters >= max_iter:
                return ITERATION_LIMIT
            self.iters += 1
            self.compute_column(q)
            leave = -1
            best_t = 0.0
            leave_up = 0
            for r in range(m):
                a = alpha[r]
                if abs(a) <= zerotol:
                    continue
                jb = head[r]
                rate = -qdir * a
                if rate < 0.0:
                    if not hl[jb]:
                        continue
                    t = (x[jb] - L[jb]) / (-rate)
                    up = 0
                else:
                    if not hu[jb]:
                        continue
                    t = (U[jb] - x[jb]) / rate
                    up = 1
                if t < 0.0:
                    t = 0.0
                take = False
                if leave < 0 or t < best_t:
                    take = True
                elif t == best_t:
                    if self.bland:
                        take = jb < head[leave]
                    else:
                        take = abs(a) > abs(alpha[leave])
                if take:
                    leave = r
                    best_t = t
                    leave_up = up
            flip = hl[q] and hu[q]
            span = 0.0
            if flip:
                span = U[q] - L[q]
            if flip and (leave < 0 or span <= best_t):
                if qdir > 0:
                    x[q] = U[q]
                    state[q] = AT_UPPER
                else:
                    x[q] = L[q]
                    state[q] = AT_LOWER
                self.compute_basic_values()
                continue
            if leave < 0:
                return UNBOUNDED
            if best_t <= zerotol:
                self.degenerate += 1
                if self.degenerate > bland_after:
                    self.bland = True
            jl = head[leave]
            if leave_up:
                x[jl] = U[jl]
                state[jl] = AT_UPPER
            else:
                x[jl] = L[jl]
                state[jl] = AT_LOWER
            if jl >= n + m:
                self.fix(jl, 0.0)
                x[jl] = 0.0
            self.pivot(leave)
            head[leave] = q
            state[q] = BASIC
            self.changes += 1
            if self.changes % REFACTOR_EVERY == 0:
                self.refactor()
            self.compute_basic_values()

    def drive_out_artificials(self, zerotol):
        n, m = self.n, self.m
        for r in range(m):
            ja = self.head[r]
            if ja < n + m:
                continue
            row = self.binv[r]
            q = -1
            best = 0.0
            for j in range(n + m):
                if self.state[j] == BASIC:
                    continue
                if j < n:
                    s = 0.0
                    for k in range(self.cs[j], self.cs[j + 1]):
                        s += row[self.cr[k]] * self.cv[k]
                else:
                    s = -row[j - n]
                if abs(s) > best:
                    best = abs(s)
                    q = j
            if q < 0 or best <= zerotol:
                continue
            self.compute_column(q)
            self.pivot(r)
            self.head[r] = q
            self.state[q] = BASIC
            self.state[ja] = AT_LOWER
            self.x[ja] = 0.0
            self.changes += 1
        self.compute_basic_values()


def run_simplex(m, n, col_start, col_row, col_val, b, cost, lo, hi, has_lo, has_hi,
                feastol, opttol, zerotol, max_iter):
    """Solve ``min cost^T x, A x >= b, lo <= x <= hi`` in floating point.

    Returns ``(status, x, state, head, y, iterations)`` over the full
    variable layout.  For an infeasible LP ``y`` holds the phase-1 duals,
    which form a Farkas ray for the rows.
    """
    lp = _Lp(m, n, col_start, col_row, col_val, b, lo, hi, has_lo, has_hi)
    N = lp.N
    x, state = lp.x, lp.state
    for j in range(n):
        if lp.hl[j]:
            x[j] = lp.L[j]
            state[j] = AT_LOWER
        elif lp.hu[j]:
            x[j] = lp.U[j]
            state[j] = AT_UPPER
        else:
            x[j] = 0.0
            state[j] = FREE
    resid = [0.0] * m
    for i in range(m):
        resid[i] = -b[i]
    for j in range(n):
        xj = x[j]
        if xj != 0.0:
            for k in range(col_start[j], col_start[j + 1]):
                resid[col_row[k]] += col_val[k] * xj
    need_phase1 = False
    for i in range(m):
        jl = n + i
        ja = n + m + i
        if resid[i] >= 0.0:
            lp.head[i] = jl
            state[jl] = BASIC
            x[jl] = resid[i]
            lp.binv[i][i] = -1.0
            state[ja] = AT_LOWER
            lp.fix(ja, 0.0)
        else:
            lp.head[i] = ja
            state[ja] = BASIC
            x[ja] = -resid[i]
            lp.binv[i][i] = 1.0
            state[jl] = AT_LOWER
            x[jl] = 0.0
            need_phase1 = True

    status = OPTIMAL
    if need_phase1:
        cost1 = [0.0] * N
        for i in range(m):
            cost1[n + m + i] = 1.0
        status = lp.run_phase(cost1, opttol, zerotol, max_iter)
        if status == ITERATION_LIMIT:
            return status, list(x), list(state), list(lp.head), list(lp.y), lp.iters
        lp.compute_duals(cost1)
        worst = 0.0
        for r in range(m):
            j = lp.head[r]
            if j >= n + m and x[j] > worst:
                worst = x[j]
        if worst > feastol:
            return INFEASIBLE, list(x), list(state), list(lp.head), list(lp.y), lp.iters
        for i in range(m):
            lp.fix(n + m + i, 0.0)
        lp.drive_out_artificials(zerotol)
        lp.bland = False
        lp.degenerate = 0

    cost2 = [0.0] * N
    for j in range(n):
        cost2[j] = cost[j]
    status = lp.run_phase(cost2, opttol, zerotol, max_iter)
    lp.compute_duals(cost2)
    return status, list(x), list(state), list(lp.head), list(lp.y), lp.iters
