"""Floating-point LP relaxation solver used inside branch-and-bound."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import _kernel
from . import _simplex_py as _k
from .model import MipProblem
from .rational import Infinity, to_float

DEFAULT_FEASTOL = 1e-6
DEFAULT_OPTTOL = 1e-7
DEFAULT_ZEROTOL = 1e-9
DEFAULT_ITERATION_LIMIT = 10_000


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


class VarStatus(str, Enum):
    BASIC = "basic"
    AT_LOWER = "lower"
    AT_UPPER = "upper"
    FREE = "free"


_STATE = {_k.BASIC: VarStatus.BASIC, _k.AT_LOWER: VarStatus.AT_LOWER,
          _k.AT_UPPER: VarStatus.AT_UPPER, _k.FREE: VarStatus.FREE}
_STATUS = {_k.OPTIMAL: LpStatus.OPTIMAL, _k.INFEASIBLE: LpStatus.INFEASIBLE,
           _k.UNBOUNDED: LpStatus.UNBOUNDED, _k.ITERATION_LIMIT: LpStatus.ITERATION_LIMIT}


@dataclass(frozen=True)
class Basis:
    """Simplex basis: one status per structural and per row logical."""

    structural: tuple[VarStatus, ...]
    logical: tuple[VarStatus, ...]

    def __post_init__(self):
        nbasic = sum(s is VarStatus.BASIC for s in self.structural + self.logical)
        if nbasic != len(self.logical):
            raise ValueError(f"basis has {nbasic} basic entries for {len(self.logical)} rows")
        if any(s not in (VarStatus.BASIC, VarStatus.AT_LOWER) for s in self.logical):
            raise ValueError("row logicals are either basic or at their lower bound")

    def to_json(self) -> dict:
        return {"structural": [s.value for s in self.structural],
                "logical": [s.value for s in self.logical]}

    @classmethod
    def from_json(cls, data: dict) -> Basis:
        return cls(tuple(VarStatus(s) for s in data["structural"]),
                   tuple(VarStatus(s) for s in data["logical"]))


@dataclass(frozen=True)
class FpLpResult:
    status: LpStatus
    objective: float
    x: tuple[float, ...]
    y: tuple[float, ...]
    r_plus: tuple[float, ...]
    r_minus: tuple[float, ...]
    basis: Basis | None
    farkas: tuple[float, ...] | None
    iterations: int = 0


def _float_bounds(p: MipProblem, local_bounds):
    lower, upper = local_bounds if local_bounds is not None else (p.lower, p.upper)
    lo, hi, has_lo, has_hi = [], [], [], []
    for l, u in zip(lower, upper):
        if isinstance(l, Infinity):
            lo.append(-_k.BIG)
            has_lo.append(0)
        else:
            lo.append(to_float(l))
            has_lo.append(1)
        if isinstance(u, Infinity):
            hi.append(_k.BIG)
            has_hi.append(0)
        else:
            hi.append(to_float(u))
            has_hi.append(1)
    return lo, hi, has_lo, has_hi


def _csc(p: MipProblem):
    cached = p.__dict__.get("_fp_csc")
    if cached is not None:
        return cached
    start, rows, vals = [0], [], []
    for col in p.columns:
        for i, a in col:
            rows.append(i)
            vals.append(to_float(a))
        start.append(len(rows))
    data = (start, rows, vals,
            [to_float(b) for b in p.rhs], [to_float(c) for c in p.objective])
    p.__dict__["_fp_csc"] = data
    return data


def solve_lp_fp(
    p: MipProblem,
    local_bounds: tuple[Sequence, Sequence] | None = None,
    feastol: float = DEFAULT_FEASTOL,
    opttol: float = DEFAULT_OPTTOL,
    zerotol: float = DEFAULT_ZEROTOL,
    iteration_limit: int = DEFAULT_ITERATION_LIMIT,
    kernel: str | None = None,
) -> FpLpResult:
    """Solve the LP relaxation of ``p`` under ``local_bounds`` in floating point.

    Infinite bounds are passed to the kernel as a +-1e100 sentinel with a
    flag and never enter arithmetic.  Crossing bounds return ``INFEASIBLE``
    with no Farkas ray (the conflict is a bound conflict, not a row one).
    """
    run = _kernel.run_simplex if kernel is None else _kernel.load(kernel)[1]
    n, m = p.num_vars, p.num_rows
    lo, hi, has_lo, has_hi = _float_bounds(p, local_bounds)
    if any(hl and hu and l > u for l, u, hl, hu in zip(lo, hi, has_lo, has_hi)):
        return FpLpResult(LpStatus.INFEASIBLE, float("inf"), (), (), (), (), None, None)
    start, rows, vals, b, c = _csc(p)
    code, x, state, head, y, iters = run(
        m, n, start, rows, vals, b, c, lo, hi, has_lo, has_hi,
        feastol, opttol, zerotol, iteration_limit,
    )
    status = _STATUS[code]
    xs = tuple(x[:n])
    if status is LpStatus.INFEASIBLE:
        return FpLpResult(status, float("inf"), xs, (), (), (), None, tuple(y), iters)

    # reduced costs d = c - A^T y, in a fixed order
    rp, rm = [], []
    for j in range(n):
        s = 0.0
        for k in range(start[j], start[j + 1]):
            s += y[rows[k]] * vals[k]
        d = c[j] - s
        rp.append(d if d > 0.0 else 0.0)
        rm.append(-d if d < 0.0 else 0.0)
    obj = 0.0
    for j in range(n):
        if c[j] != 0.0:
            obj += c[j] * xs[j]
    basis = None
    if all(h < n + m for h in head):
        basis = Basis(tuple(_STATE[s] for s in state[:n]),
                      tuple(_STATE[s] for s in state[n:n + m]))
    return FpLpResult(status, obj, xs, tuple(y), tuple(rp), tuple(rm), basis, None, iters)
