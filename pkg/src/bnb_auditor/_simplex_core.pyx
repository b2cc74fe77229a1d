# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded-variable revised simplex kernel.

Line-for-line port of ``_simplex_py``; every float operation happens in the
same order so both kernels agree bit for bit (build without FMA
contraction, see setup.py).
"""

from libc.stdlib cimport malloc, calloc, free
from libc.math cimport fabs

cdef double BIG = 1e100
cdef int REFACTOR_EVERY = 50

cdef int OPTIMAL = 0
cdef int INFEASIBLE = 1
cdef int UNBOUNDED = 2
cdef int ITERATION_LIMIT = 3

cdef int BASIC = 0
cdef int AT_LOWER = 1
cdef int AT_UPPER = 2
cdef int FREE = 3


cdef class _Lp:
    cdef int m, n, N
    cdef int *cs
    cdef int *cr
    cdef double *cv
    cdef double *b
    cdef double *L
    cdef double *U
    cdef int *hl
    cdef int *hu
    cdef double *x
    cdef int *state
    cdef int *head
    cdef double *binv
    cdef double *y
    cdef double *alpha
    cdef double *rhs
    cdef double *work
    cdef public long iters
    cdef long changes
    cdef long degenerate
    cdef bint bland

    def __cinit__(self, int m, int n, col_start, col_row, col_val, b, lo, hi, has_lo, has_hi):
        cdef int j, k, nnz
        self.m = m
        self.n = n
        self.N = n + 2 * m
        nnz = col_start[n]
        self.cs = <int *> malloc((n + 1) * sizeof(int))
        self.cr = <int *> malloc((nnz + 1) * sizeof(int))
        self.cv = <double *> malloc((nnz + 1) * sizeof(double))
        self.b = <double *> malloc((m + 1) * sizeof(double))
        self.L = <double *> malloc((self.N + 1) * sizeof(double))
        self.U = <double *> malloc((self.N + 1) * sizeof(double))
        self.hl = <int *> malloc((self.N + 1) * sizeof(int))
        self.hu = <int *> malloc((self.N + 1) * sizeof(int))
        self.x = <double *> calloc(self.N + 1, sizeof(double))
        self.state = <int *> malloc((self.N + 1) * sizeof(int))
        self.head = <int *> calloc(m + 1, sizeof(int))
        self.binv = <double *> calloc(m * m + 1, sizeof(double))
        self.y = <double *> calloc(m + 1, sizeof(double))
        self.alpha = <double *> calloc(m + 1, sizeof(double))
        self.rhs = <double *> calloc(m + 1, sizeof(double))
        self.work = <double *> calloc(2 * m * m + 1, sizeof(double))
        if (self.cs == NULL or self.cr == NULL or self.cv == NULL or self.b == NULL
                or self.L == NULL or self.U == NULL or self.hl == NULL or self.hu == NULL
                or self.x == NULL or self.state == NULL or self.head == NULL
                or self.binv == NULL or self.y == NULL or self.alpha == NULL
                or self.rhs == NULL or self.work == NULL):
            raise MemoryError()
        for j in range(n + 1):
            self.cs[j] = col_start[j]
        for k in range(nnz):
            self.cr[k] = col_row[k]
            self.cv[k] = col_val[k]
        for j in range(m):
            self.b[j] = b[j]
        for j in range(self.N):
            self.L[j] = 0.0
            self.U[j] = BIG
            self.hl[j] = 1
            self.hu[j] = 0
            self.state[j] = AT_LOWER
        for j in range(n):
            self.L[j] = lo[j]
            self.U[j] = hi[j]
            self.hl[j] = 1 if has_lo[j] else 0
            self.hu[j] = 1 if has_hi[j] else 0
        self.iters = 0
        self.changes = 0
        self.degenerate = 0
        self.bland = False

    def __dealloc__(self):
        free(self.cs)
        free(self.cr)
        free(self.cv)
        free(self.b)
        free(self.L)
        free(self.U)
        free(self.hl)
        free(self.hu)
        free(self.x)
        free(self.state)
        free(self.head)
        free(self.binv)
        free(self.y)
        free(self.alpha)
        free(self.rhs)
        free(self.work)

    cdef void fix(self, int j, double value):
        self.L[j] = value
        self.U[j] = value
        self.hl[j] = 1
        self.hu[j] = 1

    cdef void compute_duals(self, double *cost):
        cdef int m = self.m
        cdef int r, i
        cdef double cb
        cdef double *row
        for i in range(m):
            self.y[i] = 0.0
        for r in range(m):
            cb = cost[self.head[r]]
            if cb != 0.0:
                row = self.binv + r * m
                for i in range(m):
                    self.y[i] += cb * row[i]

    cdef double reduced_cost(self, int j, double *cost):
        cdef int n = self.n, m = self.m, k
        cdef double s
        if j < n:
            s = 0.0
            for k in range(self.cs[j], self.cs[j + 1]):
                s += self.y[self.cr[k]] * self.cv[k]
            return cost[j] - s
        if j < n + m:
            return cost[j] + self.y[j - n]
        return cost[j] - self.y[j - n - m]

    cdef void compute_column(self, int q):
        cdef int n = self.n, m = self.m, r, k, i
        cdef double v
        for r in range(m):
            self.alpha[r] = 0.0
        if q < n:
            for k in range(self.cs[q], self.cs[q + 1]):
                i = self.cr[k]
                v = self.cv[k]
                for r in range(m):
                    self.alpha[r] += self.binv[r * m + i] * v
        elif q < n + m:
            i = q - n
            for r in range(m):
                self.alpha[r] = -self.binv[r * m + i]
        else:
            i = q - n - m
            for r in range(m):
                self.alpha[r] = self.binv[r * m + i]

    cdef void compute_basic_values(self):
        cdef int n = self.n, m = self.m, j, k, r, i
        cdef double xj, s
        cdef double *row
        for i in range(m):
            self.rhs[i] = self.b[i]
        for j in range(self.N):
            if self.state[j] == BASIC:
                continue
            xj = self.x[j]
            if xj == 0.0:
                continue
            if j < n:
                for k in range(self.cs[j], self.cs[j + 1]):
                    self.rhs[self.cr[k]] -= self.cv[k] * xj
            elif j < n + m:
                self.rhs[j - n] += xj
            else:
                self.rhs[j - n - m] -= xj
        for r in range(m):
            row = self.binv + r * m
            s = 0.0
            for i in range(m):
                s += row[i] * self.rhs[i]
            self.x[self.head[r]] = s

    cdef void pivot(self, int r):
        cdef int m = self.m, i, s
        cdef double piv, f
        cdef double *prow = self.binv + r * m
        cdef double *row
        piv = self.alpha[r]
        for i in range(m):
            prow[i] = prow[i] / piv
        for s in range(m):
            if s == r:
                continue
            f = self.alpha[s]
            if f != 0.0:
                row = self.binv + s * m
                for i in range(m):
                    row[i] -= f * prow[i]

    cdef bint refactor(self):
        cdef int n = self.n, m = self.m, w = 2 * m
        cdef int r, c, j, k, p, i
        cdef double best, v, piv, f, tmp
        cdef double *a = self.work
        for i in range(m * w):
            a[i] = 0.0
        for r in range(m):
            a[r * w + m + r] = 1.0
        for c in range(m):
            j = self.head[c]
            if j < n:
                for k in range(self.cs[j], self.cs[j + 1]):
                    a[self.cr[k] * w + c] = self.cv[k]
            elif j < n + m:
                a[(j - n) * w + c] = -1.0
            else:
                a[(j - n - m) * w + c] = 1.0
        for c in range(m):
            p = c
            best = fabs(a[c * w + c])
            for r in range(c + 1, m):
                v = fabs(a[r * w + c])
                if v > best:
                    best = v
                    p = r
            if best < 1e-14:
                return False
            if p != c:
                for i in range(w):
                    tmp = a[p * w + i]
                    a[p * w + i] = a[c * w + i]
                    a[c * w + i] = tmp
            piv = a[c * w + c]
            for i in range(w):
                a[c * w + i] = a[c * w + i] / piv
            for r in range(m):
                if r == c:
                    continue
                f = a[r * w + c]
                if f != 0.0:
                    for i in range(w):
                        a[r * w + i] -= f * a[c * w + i]
        for r in range(m):
            for i in range(m):
                self.binv[r * m + i] = a[r * w + m + i]
        return True

    cdef int run_phase(self, double *cost, double opttol, double zerotol, long max_iter):
        cdef int n = self.n, m = self.m, N = self.N
        cdef long bland_after = 3 * (n + m)
        cdef int q, qdir, j, st, direction, r, jb, leave, leave_up, up, jl
        cdef double best, d, score, a, rate, t, best_t, span
        cdef bint take, flip
        while True:
            self.compute_duals(cost)
            q = -1
            qdir = 0
            best = 0.0
            for j in range(N):
                st = self.state[j]
                if st == BASIC:
                    continue
                if self.hl[j] and self.hu[j] and self.L[j] == self.U[j]:
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
                a = self.alpha[r]
                if fabs(a) <= zerotol:
                    continue
                jb = self.head[r]
                rate = -qdir * a
                if rate < 0.0:
                    if not self.hl[jb]:
                        continue
                    t = (self.x[jb] - self.L[jb]) / (-rate)
                    up = 0
                else:
                    if not self.hu[jb]:
                        continue
                    t = (self.U[jb] - self.x[jb]) / rate
                    up = 1
                if t < 0.0:
                    t = 0.0
                take = False
                if leave < 0 or t < best_t:
                    take = True
                elif t == best_t:
                    if self.bland:
                        take = jb < self.head[leave]
                    else:
                        take = fabs(a) > fabs(self.alpha[leave])
                if take:
                    leave = r
                    best_t = t
                    leave_up = up
            flip = self.hl[q] and self.hu[q]
            span = 0.0
            if flip:
                span = self.U[q] - self.L[q]
            if flip and (leave < 0 or span <= best_t):
                if qdir > 0:
                    self.x[q] = self.U[q]
                    self.state[q] = AT_UPPER
                else:
                    self.x[q] = self.L[q]
                    self.state[q] = AT_LOWER
                self.compute_basic_values()
                continue
            if leave < 0:
                return UNBOUNDED
            if best_t <= zerotol:
                self.degenerate += 1
                if self.degenerate > bland_after:
                    self.bland = True
            jl = self.head[leave]
            if leave_up:
                self.x[jl] = self.U[jl]
                self.state[jl] = AT_UPPER
            else:
                self.x[jl] = self.L[jl]
                self.state[jl] = AT_LOWER
            if jl >= n + m:
                self.fix(jl, 0.0)
                self.x[jl] = 0.0
            self.pivot(leave)
            self.head[leave] = q
            self.state[q] = BASIC
            self.changes += 1
            if self.changes % REFACTOR_EVERY == 0:
                self.refactor()
            self.compute_basic_values()

    cdef void drive_out_artificials(self, double zerotol):
        cdef int n = self.n, m = self.m, r, ja, q, j, k
        cdef double best, s
        cdef double *row
        for r in range(m):
            ja = self.head[r]
            if ja < n + m:
                continue
            row = self.binv + r * m
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
                if fabs(s) > best:
                    best = fabs(s)
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

    cdef tuple snapshot(self, int status):
        cdef int j
        return (
            status,
            [self.x[j] for j in range(self.N)],
            [self.state[j] for j in range(self.N)],
            [self.head[j] for j in range(self.m)],
            [self.y[j] for j in range(self.m)],
            self.iters,
        )


def run_simplex(int m, int n, col_start, col_row, col_val, b, cost, lo, hi, has_lo, has_hi,
                double feastol, double opttol, double zerotol, long max_iter):
    """Compiled twin of ``_simplex_py.run_simplex`` (same signature and result)."""
    cdef _Lp lp = _Lp(m, n, col_start, col_row, col_val, b, lo, hi, has_lo, has_hi)
    cdef int N = lp.N, i, j, k, jl, ja, r, status
    cdef bint need_phase1 = False
    cdef double xj, worst
    cdef double *resid = <double *> calloc(m + 1, sizeof(double))
    cdef double *cost1 = <double *> calloc(N + 1, sizeof(double))
    cdef double *cost2 = <double *> calloc(N + 1, sizeof(double))
    if resid == NULL or cost1 == NULL or cost2 == NULL:
        free(resid)
        free(cost1)
        free(cost2)
        raise MemoryError()
    try:
        for j in range(n):
            if lp.hl[j]:
                lp.x[j] = lp.L[j]
                lp.state[j] = AT_LOWER
            elif lp.hu[j]:
                lp.x[j] = lp.U[j]
                lp.state[j] = AT_UPPER
            else:
                lp.x[j] = 0.0
                lp.state[j] = FREE
        for i in range(m):
            resid[i] = -lp.b[i]
        for j in range(n):
            xj = lp.x[j]
            if xj != 0.0:
                for k in range(lp.cs[j], lp.cs[j + 1]):
                    resid[lp.cr[k]] += lp.cv[k] * xj
        for i in range(m):
            jl = n + i
            ja = n + m + i
            if resid[i] >= 0.0:
                lp.head[i] = jl
                lp.state[jl] = BASIC
                lp.x[jl] = resid[i]
                lp.binv[i * m + i] = -1.0
                lp.state[ja] = AT_LOWER
                lp.fix(ja, 0.0)
            else:
                lp.head[i] = ja
                lp.state[ja] = BASIC
                lp.x[ja] = -resid[i]
                lp.binv[i * m + i] = 1.0
                lp.state[jl] = AT_LOWER
                lp.x[jl] = 0.0
                need_phase1 = True

        if need_phase1:
            for i in range(m):
                cost1[n + m + i] = 1.0
            status = lp.run_phase(cost1, opttol, zerotol, max_iter)
            if status == ITERATION_LIMIT:
                return lp.snapshot(status)
            lp.compute_duals(cost1)
            worst = 0.0
            for r in range(m):
                j = lp.head[r]
                if j >= n + m and lp.x[j] > worst:
                    worst = lp.x[j]
            if worst > feastol:
                return lp.snapshot(INFEASIBLE)
            for i in range(m):
                lp.fix(n + m + i, 0.0)
            lp.drive_out_artificials(zerotol)
            lp.bland = False
            lp.degenerate = 0

        for j in range(n):
            cost2[j] = cost[j]
        status = lp.run_phase(cost2, opttol, zerotol, max_iter)
        lp.compute_duals(cost2)
        return lp.snapshot(status)
    finally:
        free(resid)
        free(cost1)
        free(cost2)
