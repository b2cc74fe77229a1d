"""Pure LP-based branch-and-bound in floating point, with a leaf event log."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .model import MipProblem
from .simplex_fp import (
    DEFAULT_FEASTOL,
    DEFAULT_ITERATION_LIMIT,
    DEFAULT_OPTTOL,
    DEFAULT_ZEROTOL,
    Basis,
    FpLpResult,
    LpStatus,
    solve_lp_fp,
)


class EventKind(str, Enum):
    NODE_FEASIBLE = "NODEFEASIBLE"
    NODE_INFEASIBLE = "NODEINFEASIBLE"
    NODE_DELETED = "NODEDELETE"
    BEST_SOLUTION = "BESTSOLUTION"


LP_INFEASIBLE = "infeasible"
LP_PRUNED = "pruned-after-solve"


@dataclass(frozen=True)
class Tolerances:
    feastol: float = DEFAULT_FEASTOL
    inttol: float | None = None
    zerotol: float = DEFAULT_ZEROTOL
    opttol: float = DEFAULT_OPTTOL
    iteration_limit: int = DEFAULT_ITERATION_LIMIT

    @property
    def integrality(self) -> float:
        return self.feastol if self.inttol is None else self.inttol


@dataclass(frozen=True)
class BranchChange:
    var: int
    up: bool  # True: x >= bound, False: x <= bound
    bound: Fraction


@dataclass(frozen=True)
class NodePath:
    node_id: int
    parent_id: int | None
    depth: int
    changes: tuple[BranchChange, ...] = ()

    def child(self, node_id: int, change: BranchChange) -> NodePath:
        return NodePath(node_id, self.node_id, self.depth + 1, self.changes + (change,))

    def local_bounds(self, p: MipProblem) -> tuple[list, list]:
        """Replay the branching changes on the model's global bounds."""
        lower, upper = list(p.lower), list(p.upper)
        for ch in self.changes:
            if ch.up:
                if ch.bound > lower[ch.var]:
                    lower[ch.var] = ch.bound
            elif ch.bound < upper[ch.var]:
                upper[ch.var] = ch.bound
        return lower, upper


@dataclass(frozen=True)
class BnbEvent:
    """One entry of the event log.

    Node events carry the path; LP vectors are present only where the
    originating solver state provides them (NODEDELETE carries none, its
    duals are recomputed at verification time).
    """

    seq: int
    kind: EventKind
    path: NodePath | None
    primal_bound: float
    lp_status: str | None = None
    objective: float | None = None
    x: tuple[float, ...] | None = None
    y: tuple[float, ...] | None = None
    r_plus: tuple[float, ...] | None = None
    r_minus: tuple[float, ...] | None = None
    basis: Basis | None = None
    farkas: tuple[float, ...] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind is not EventKind.BEST_SOLUTION


@dataclass
class BnbStats:
    nodes_processed: int = 0
    nodes_created: int = 1
    branched: int = 0
    lp_iterations: int = 0
    leaves: dict[str, int] = field(default_factory=dict)
    unresolved: list[NodePath] = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class BnbOutcome:
    status: str  # optimal, infeasible, unbounded, time_limit, node_limit
    incumbent: tuple[float, ...] | None
    objective: float  # z*, +inf without incumbent
    events: list[BnbEvent]
    stats: BnbStats


def fractionality(v: float) -> float:
    return min(v - math.floor(v), math.ceil(v) - v)


def choose_branch_variable(x: Sequence[float], integers, inttol: float) -> int | None:
    """Most fractional integer variable; ties go to the lowest index."""
    best, best_j = inttol, None
    for j in sorted(integers):
        f = fractionality(x[j])
        if f > best:
            best, best_j = f, j
    return best_j


@dataclass(order=True)
class _QueueEntry:
    key: tuple
    path: NodePath = field(compare=False)
    lower_bound: float = field(compare=False)


def solve_bnb(
    p: MipProblem,
    tol: Tolerances = Tolerances(),
    time_limit: float | None = None,
    node_limit: int | None = None,
    kernel: str | None = None,
) -> BnbOutcome:
    """Best-first branch-and-bound on floating-point LP relaxations.

    Ties in the node lower bound go to the deeper node, then the lower id;
    the up child (``x >= ceil``) is created first.  Every leaf emits exactly
    one NODEFEASIBLE, NODEINFEASIBLE or NODEDELETE event.
    """
    start = time.perf_counter()
    inttol = tol.integrality
    zerotol = tol.zerotol
    events: list[BnbEvent] = []
    seq = itertools.count()
    stats = BnbStats()
    primal = math.inf
    incumbent: tuple[float, ...] | None = None
    ids = itertools.count(1)
    queue: list[_QueueEntry] = []
    root = NodePath(0, None, 0)
    heapq.heappush(queue, _QueueEntry((-math.inf, 0, 0), root, -math.inf))
    status = None

    def emit(kind, path, **kw):
        ev = BnbEvent(next(seq), kind, path, primal, **kw)
        events.append(ev)
        if kind is not EventKind.BEST_SOLUTION:
            stats.leaves[kind.value] = stats.leaves.get(kind.value, 0) + 1
        return ev

    while queue:
        if time_limit is not None and time.perf_counter() - start >= time_limit:
            status = "time_limit"
            break
        if node_limit is not None and stats.nodes_processed >= node_limit:
            status = "node_limit"
            break
        entry = heapq.heappop(queue)
        path = entry.path
        bounds = path.local_bounds(p)
        res = solve_lp_fp(p, bounds, tol.feastol, tol.opttol, zerotol, tol.iteration_limit, kernel)
        stats.nodes_processed += 1
        stats.lp_iterations += res.iterations
        if res.status is LpStatus.ITERATION_LIMIT:
            stats.unresolved.append(path)
            continue
        if res.status is LpStatus.UNBOUNDED:
            if path.depth == 0:
                status = "unbounded"
                break
            stats.unresolved.append(path)
            continue
        if res.status is LpStatus.INFEASIBLE:
            emit(EventKind.NODE_INFEASIBLE, path, lp_status=LP_INFEASIBLE, farkas=res.farkas)
            continue
        if res.objective >= primal - zerotol:
            emit(EventKind.NODE_INFEASIBLE, path, lp_status=LP_PRUNED, **_lp_fields(res))
            continue
        j = choose_branch_variable(res.x, p.integers, inttol)
        if j is None:
            primal = res.objective
            incumbent = res.x
            emit(EventKind.BEST_SOLUTION, None, objective=res.objective, x=res.x)
            emit(EventKind.NODE_FEASIBLE, path, **_lp_fields(res))
            # drop queued nodes that the new incumbent cuts off
            keep = []
            for e in sorted(queue):
                if e.lower_bound >= primal - zerotol:
                    emit(EventKind.NODE_DELETED, e.path)
                else:
                    keep.append(e)
            queue = keep
            heapq.heapify(queue)
            continue
        stats.branched += 1
        v = res.x[j]
        for up in (True, False):
            nid = next(ids)
            bound = Fraction(math.ceil(v) if up else math.floor(v))
            child = path.child(nid, BranchChange(j, up, bound))
            heapq.heappush(queue, _QueueEntry((res.objective, -child.depth, nid), child, res.objective))
            stats.nodes_created += 1

    if status is None:
        status = "optimal" if incumbent is not None else "infeasible"
    stats.wall_time = time.perf_counter() - start
    return BnbOutcome(status, incumbent, primal, events, stats)


def _lp_fields(res: FpLpResult) -> dict:
    return dict(objective=res.objective, x=res.x, y=res.y, r_plus=res.r_plus,
                r_minus=res.r_minus, basis=res.basis)


def leaf_events(events: Sequence[BnbEvent]) -> list[BnbEvent]:
    return [e for e in events if e.is_leaf]
