"""Exact a-posteriori audit of branch-and-bound leaf decisions.

Each leaf runs an escalating cascade: safe dual bounding on the stored float
duals, rational reconstruction of those duals, exact factorization of the
stored basis, and finally an exact LP solve.  Errors are only ever declared
on exact evidence; a cheaper technique failing just escalates.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .bnb import LP_INFEASIBLE, BnbEvent, EventKind, Tolerances
from .model import MipProblem
from .rational import INF, NEG_INF, ExtendedRational, Infinity, reconstruct_rational
from .simplex_exact import (
    CertifiedImpossible,
    ExactStatus,
    complete_solution,
    dual_objective,
    factorize_basis_exact,
    solve_lp_exact,
)
from .simplex_fp import LpStatus, solve_lp_fp

ZERO = Fraction(0)
DEFAULT_MAX_DENOMINATOR = 2**32


class Technique(str, Enum):
    SAFE_BOUNDING = "SafeBounding"
    RECONSTRUCTION = "Reconstruction"
    FACTORIZATION = "Factorization"
    EXACT_LP = "ExactLP"


CASCADE = (Technique.SAFE_BOUNDING, Technique.RECONSTRUCTION,
           Technique.FACTORIZATION, Technique.EXACT_LP)
LEVEL_NAMES = {"safe": Technique.SAFE_BOUNDING, "reconstruct": Technique.RECONSTRUCTION,
               "factorize": Technique.FACTORIZATION, "exact": Technique.EXACT_LP}


class VerdictClass(str, Enum):
    VERIFIED = "Verified"
    WEAK_SOLUTION = "WeakSolutionError"
    STRONG_SOLUTION = "StrongSolutionError"
    WEAK_BOUND = "WeakBoundError"
    STRONG_BOUND = "StrongBoundError"
    WEAK_GAP = "WeakGapError"
    STRONG_GAP = "StrongGapError"
    INFEASIBILITY = "InfeasibilityError"
    INCONCLUSIVE = "Inconclusive"  # only when the cascade is capped below ExactLP

    @property
    def is_error(self) -> bool:
        return self not in (VerdictClass.VERIFIED, VerdictClass.INCONCLUSIVE)

    @property
    def is_strong(self) -> bool:
        return self in (VerdictClass.STRONG_SOLUTION, VerdictClass.STRONG_BOUND,
                        VerdictClass.STRONG_GAP, VerdictClass.INFEASIBILITY)


ERROR_CLASSES = tuple(c for c in VerdictClass if c.is_error)


# --------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class SafeDualCertificate:
    """Exactly dual-feasible ``(y, r+, r-)`` and the bound it proves."""

    y: tuple[Fraction, ...]
    r_plus: tuple[Fraction, ...]
    r_minus: tuple[Fraction, ...]
    residual: tuple[Fraction, ...]
    safe_bound: ExtendedRational

    def check(self, p: MipProblem) -> bool:
        """``A^T y + r+ - r- = c`` and nonnegativity, exactly."""
        if any(v < 0 for v in self.y + self.r_plus + self.r_minus):
            return False
        for j, col in enumerate(p.columns):
            aty = sum((self.y[i] * a for i, a in col), ZERO)
            if aty + self.r_plus[j] - self.r_minus[j] != p.objective[j]:
                return False
        return True


def _clamped(values: Sequence, zerotol: float) -> list[Fraction] | None:
    out = []
    for v in values:
        f = Fraction(v)
        if f < 0:
            if f < -Fraction(zerotol):
                return None
            f = ZERO
        out.append(f)
    return out


def _local(p: MipProblem, local_bounds):
    return (list(p.lower), list(p.upper)) if local_bounds is None else local_bounds


def safe_dual_bound(p: MipProblem, local_bounds, y_hat, r_plus_hat, r_minus_hat,
                    zerotol: float = 1e-9) -> SafeDualCertificate | None:
    """Correct approximate duals into an exactly feasible dual point.

    With ``eps = c - A^T y - r+ + r-`` (exact), ``r+ += max(eps, 0)`` and
    ``r- -= min(eps, 0)``.  Inputs may be floats (converted exactly) or
    rationals.  Returns ``None`` (undecided) when some multiplier is below
    ``-zerotol``; entries in ``[-zerotol, 0)`` are clamped to zero.
    """
    y = _clamped(y_hat, zerotol)
    rp = _clamped(r_plus_hat, zerotol)
    rm = _clamped(r_minus_hat, zerotol)
    if y is None or rp is None or rm is None:
        return None
    if len(y) != p.num_rows or len(rp) != p.num_vars or len(rm) != p.num_vars:
        raise ValueError("dual vector length does not match the model")
    lower, upper = _local(p, local_bounds)
    residual = []
    for j, col in enumerate(p.columns):
        eps = p.objective[j] - sum((y[i] * a for i, a in col if y[i]), ZERO) - rp[j] + rm[j]
        residual.append(eps)
        if eps > 0:
            rp[j] += eps
        elif eps < 0:
            rm[j] -= eps
    bound = dual_objective(p, lower, upper, y, rp, rm)
    cert = SafeDualCertificate(tuple(y), tuple(rp), tuple(rm), tuple(residual), bound)
    assert cert.check(p), "safe dual correction lost exact feasibility"
    return cert


def validate_farkas_exact(p: MipProblem, local_bounds, ray, zerotol: float = 1e-9) -> Fraction | None:
    """Exact margin ``y^T b - max_{l<=x<=u} y^T A x`` if positive, else ``None``."""
    y = _clamped(ray, zerotol)
    if y is None or len(y) != p.num_rows:
        return None
    lower, upper = _local(p, local_bounds)
    box_max = ZERO
    for j, col in enumerate(p.columns):
        z = sum((y[i] * a for i, a in col if y[i]), ZERO)
        if z > 0:
            if isinstance(upper[j], Infinity):
                return None
            box_max += z * upper[j]
        elif z < 0:
            if isinstance(lower[j], Infinity):
                return None
            box_max += z * lower[j]
    margin = sum((b * v for b, v in zip(p.rhs, y) if v), ZERO) - box_max
    return margin if margin > 0 else None


def _reconstruct(values: Sequence[float], max_denominator: int) -> list[Fraction] | None:
    if any(not math.isfinite(v) for v in values):
        return None
    return [reconstruct_rational(v, max_denominator) for v in values]


def _reconstructed_certificate(p, local_bounds, y_hat, max_denominator, zerotol):
    """Reconstruct ``y`` and take reduced costs exactly from it (zero residual)."""
    y = _reconstruct(y_hat, max_denominator)
    if y is None or any(v < 0 for v in y):
        return None
    rp, rm = [], []
    for j, col in enumerate(p.columns):
        d = p.objective[j] - sum((y[i] * a for i, a in col if y[i]), ZERO)
        rp.append(d if d > 0 else ZERO)
        rm.append(-d if d < 0 else ZERO)
    return safe_dual_bound(p, local_bounds, y, rp, rm, zerotol)


# --------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class LeafVerdict:
    """Classification of one leaf.

    ``dual_bound`` is the exact payload used for the global interval: the
    node's exact LP value (or a safe bound on it) for error leaves, ``+inf``
    for a node LP proven infeasible.  ``lp_value`` is the exact node LP
    value when it was computed.  ``incumbent`` holds the exact completion of
    a NODEFEASIBLE leaf.
    """

    seq: int
    node_id: int
    kind: EventKind
    verdict: VerdictClass
    technique: Technique | None
    dual_bound: ExtendedRational | None = None
    lp_value: ExtendedRational | None = None
    incumbent: tuple[Fraction, ...] | None = None
    incumbent_objective: Fraction | None = None

    def with_verdict(self, verdict: VerdictClass) -> LeafVerdict:
        return LeafVerdict(self.seq, self.node_id, self.kind, verdict, self.technique,
                           self.dual_bound, self.lp_value, self.incumbent,
                           self.incumbent_objective)


@dataclass(frozen=True)
class VerifyConfig:
    tolerances: Tolerances = Tolerances()
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    techniques: tuple[Technique, ...] = CASCADE
    kernel: str | None = None

    @classmethod
    def capped(cls, level: Technique | str, **kw) -> VerifyConfig:
        level = LEVEL_NAMES.get(level, level) if isinstance(level, str) else level
        return cls(techniques=CASCADE[:CASCADE.index(Technique(level)) + 1], **kw)


def round_half_away(v: float) -> Fraction:
    r = math.floor(abs(v) + 0.5)
    return Fraction(r if v >= 0 else -r)


class _Leaf:
    """Per-leaf context with lazily computed exact data."""

    def __init__(self, p: MipProblem, event: BnbEvent, config: VerifyConfig):
        self.p = p
        self.event = event
        self.config = config
        self.bounds = event.path.local_bounds(p)
        self.zerotol = config.tolerances.zerotol
        self._exact = None

    def allowed(self, t: Technique) -> bool:
        return t in self.config.techniques

    def exact(self):
        if self._exact is None:
            self._exact = solve_lp_exact(self.p, self.bounds)
        return self._exact

    def verdict(self, cls, technique, dual_bound=None, lp_value=None, completion=None):
        inc = obj = None
        if completion is not None:
            inc, obj = completion.x, completion.objective
        e = self.event
        return LeafVerdict(e.seq, e.path.node_id, e.kind, cls, technique,
                           dual_bound, lp_value, inc, obj)


def verify_leaf(p: MipProblem, event: BnbEvent, config: VerifyConfig = VerifyConfig()) -> LeafVerdict:
    """Run the verification cascade on one leaf event.

    Bound and gap errors come back as their strong variant; use
    :func:`classify_hindsight` to finalize weak/strong.
    """
    if not event.is_leaf:
        raise ValueError("only node events can be verified")
    leaf = _Leaf(p, event, config)
    if event.kind is EventKind.NODE_FEASIBLE:
        return _verify_feasible(leaf)
    if event.kind is EventKind.NODE_DELETED:
        tol = config.tolerances
        res = solve_lp_fp(p, leaf.bounds, tol.feastol, tol.opttol, tol.zerotol,
                          tol.iteration_limit, config.kernel)
        if res.status is LpStatus.INFEASIBLE:
            return _verify_infeasible(leaf, res.farkas)
        if res.status is LpStatus.OPTIMAL:
            return _verify_pruned(leaf, res.y, res.r_plus, res.r_minus, res.basis)
        return _verify_pruned(leaf, None, None, None, None)
    if event.lp_status == LP_INFEASIBLE:
        return _verify_infeasible(leaf, event.farkas)
    return _verify_pruned(leaf, event.y, event.r_plus, event.r_minus, event.basis)


def _verify_infeasible(leaf: _Leaf, ray) -> LeafVerdict:
    p, zt = leaf.p, leaf.zerotol
    if leaf.allowed(Technique.SAFE_BOUNDING) and ray:
        if validate_farkas_exact(p, leaf.bounds, ray, zt) is not None:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.SAFE_BOUNDING)
    if leaf.allowed(Technique.RECONSTRUCTION) and ray:
        rec = _reconstruct(ray, leaf.config.max_denominator)
        if rec is not None and validate_farkas_exact(p, leaf.bounds, rec, zt) is not None:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.RECONSTRUCTION)
    # no basis at an infeasible node, so factorization is skipped
    if not leaf.allowed(Technique.EXACT_LP):
        return leaf.verdict(VerdictClass.INCONCLUSIVE, None)
    res = leaf.exact()
    if res.status is ExactStatus.INFEASIBLE:
        return leaf.verdict(VerdictClass.VERIFIED, Technique.EXACT_LP, lp_value=INF)
    return leaf.verdict(VerdictClass.INFEASIBILITY, Technique.EXACT_LP,
                        dual_bound=res.objective, lp_value=res.objective)


def _verify_pruned(leaf: _Leaf, y, rp, rm, basis) -> LeafVerdict:
    p, cfg, zt = leaf.p, leaf.config, leaf.zerotol
    primal = Fraction(leaf.event.primal_bound)
    if y is not None and leaf.allowed(Technique.SAFE_BOUNDING):
        cert = safe_dual_bound(p, leaf.bounds, y, rp, rm, zt)
        if cert is not None and cert.safe_bound >= primal:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.SAFE_BOUNDING)
    if y is not None and leaf.allowed(Technique.RECONSTRUCTION):
        cert = _reconstructed_certificate(p, leaf.bounds, y, cfg.max_denominator, zt)
        if cert is not None and cert.safe_bound >= primal:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.RECONSTRUCTION)
    if basis is not None and leaf.allowed(Technique.FACTORIZATION):
        res = factorize_basis_exact(p, leaf.bounds, basis)
        if res.status is ExactStatus.OPTIMAL:
            if res.objective >= primal:
                return leaf.verdict(VerdictClass.VERIFIED, Technique.FACTORIZATION,
                                    lp_value=res.objective)
            return leaf.verdict(VerdictClass.STRONG_BOUND, Technique.FACTORIZATION,
                                dual_bound=res.objective, lp_value=res.objective)
        if res.status is ExactStatus.DUAL_BOUND and res.objective >= primal:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.FACTORIZATION)
    if not leaf.allowed(Technique.EXACT_LP):
        return leaf.verdict(VerdictClass.INCONCLUSIVE, None)
    res = leaf.exact()
    if res.status is ExactStatus.INFEASIBLE:
        return leaf.verdict(VerdictClass.VERIFIED, Technique.EXACT_LP, lp_value=INF)
    if res.objective >= primal:
        return leaf.verdict(VerdictClass.VERIFIED, Technique.EXACT_LP, lp_value=res.objective)
    return leaf.verdict(VerdictClass.STRONG_BOUND, Technique.EXACT_LP,
                        dual_bound=res.objective, lp_value=res.objective)


def _verify_feasible(leaf: _Leaf) -> LeafVerdict:
    p, cfg, zt, ev = leaf.p, leaf.config, leaf.zerotol, leaf.event
    assignment = {j: round_half_away(ev.x[j]) for j in sorted(p.integers)}
    comp = complete_solution(p, assignment, leaf.bounds)

    if isinstance(comp, CertifiedImpossible):
        # solution error: weak iff the node LP itself is exactly infeasible
        if ev.basis is not None and leaf.allowed(Technique.FACTORIZATION):
            res = factorize_basis_exact(p, leaf.bounds, ev.basis)
            if res.status is ExactStatus.OPTIMAL:
                return leaf.verdict(VerdictClass.STRONG_SOLUTION, Technique.FACTORIZATION,
                                    dual_bound=res.objective, lp_value=res.objective)
        if not leaf.allowed(Technique.EXACT_LP):
            return leaf.verdict(VerdictClass.INCONCLUSIVE, None)
        res = leaf.exact()
        if res.status is ExactStatus.INFEASIBLE:
            return leaf.verdict(VerdictClass.WEAK_SOLUTION, Technique.EXACT_LP,
                                dual_bound=INF, lp_value=INF)
        return leaf.verdict(VerdictClass.STRONG_SOLUTION, Technique.EXACT_LP,
                            dual_bound=res.objective, lp_value=res.objective)

    # gap check: the completion is feasible for the node LP, so a dual bound
    # reaching its objective proves the two values coincide
    target = comp.objective
    if leaf.allowed(Technique.SAFE_BOUNDING) and ev.y is not None:
        cert = safe_dual_bound(p, leaf.bounds, ev.y, ev.r_plus, ev.r_minus, zt)
        if cert is not None and cert.safe_bound >= target:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.SAFE_BOUNDING,
                                lp_value=target, completion=comp)
    if leaf.allowed(Technique.RECONSTRUCTION) and ev.y is not None:
        cert = _reconstructed_certificate(p, leaf.bounds, ev.y, cfg.max_denominator, zt)
        if cert is not None and cert.safe_bound >= target:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.RECONSTRUCTION,
                                lp_value=target, completion=comp)
    if leaf.allowed(Technique.FACTORIZATION) and ev.basis is not None:
        res = factorize_basis_exact(p, leaf.bounds, ev.basis)
        if res.status is ExactStatus.OPTIMAL:
            cls = VerdictClass.VERIFIED if res.objective == target else VerdictClass.STRONG_GAP
            bound = None if cls is VerdictClass.VERIFIED else res.objective
            return leaf.verdict(cls, Technique.FACTORIZATION, dual_bound=bound,
                                lp_value=res.objective, completion=comp)
        if res.status is ExactStatus.DUAL_BOUND and res.objective >= target:
            return leaf.verdict(VerdictClass.VERIFIED, Technique.FACTORIZATION,
                                lp_value=target, completion=comp)
    if not leaf.allowed(Technique.EXACT_LP):
        return leaf.verdict(VerdictClass.INCONCLUSIVE, None, completion=comp)
    res = leaf.exact()
    if res.objective == target:
        return leaf.verdict(VerdictClass.VERIFIED, Technique.EXACT_LP,
                            lp_value=target, completion=comp)
    return leaf.verdict(VerdictClass.STRONG_GAP, Technique.EXACT_LP,
                        dual_bound=res.objective, lp_value=res.objective, completion=comp)


# --------------------------------------------------------------------------
# hindsight and aggregation

def exact_timeline(verdicts: Iterable[LeafVerdict]) -> list[tuple[int, Fraction]]:
    """``(seq, objective)`` of every exactly completed incumbent, in order."""
    return sorted((v.seq, v.incumbent_objective) for v in verdicts
                  if v.incumbent_objective is not None)


def classify_hindsight(verdicts: Sequence[LeafVerdict],
                       timeline: Sequence[tuple[int, Fraction]] | None = None) -> list[LeafVerdict]:
    """Finalize weak/strong for bound and gap errors.

    A bound error is weak iff some exact incumbent of the run has objective
    at most the leaf's exact dual bound; one found before the pruning
    justifies it just as well as a later one.  A gap error is weak iff the
    final best exact objective is at most the node's exact LP value.
    Solution errors are left as classified.
    """
    if timeline is None:
        timeline = exact_timeline(verdicts)
    final = min((obj for _, obj in timeline), default=None)
    out = []
    for v in verdicts:
        if v.verdict in (VerdictClass.WEAK_BOUND, VerdictClass.STRONG_BOUND):
            weak = final is not None and final <= v.dual_bound
            v = v.with_verdict(VerdictClass.WEAK_BOUND if weak else VerdictClass.STRONG_BOUND)
        elif v.verdict in (VerdictClass.WEAK_GAP, VerdictClass.STRONG_GAP):
            weak = final is not None and final <= v.lp_value
            v = v.with_verdict(VerdictClass.WEAK_GAP if weak else VerdictClass.STRONG_GAP)
        out.append(v)
    return out


def global_bound_interval(verdicts: Iterable[LeafVerdict], z_star: float,
                          exact_objective: Fraction | None = None) -> tuple[ExtendedRational, float]:
    """``[z_hat, z*]``: the minimum of all error payloads, capped at ``z*``.

    Verified leaves were cut off against the float primal bound, so ``z*``
    caps ``z_hat``; the best exact incumbent caps it too, since a float
    incumbent value may sit above the exact completion it stands for.
    """
    z_hat: ExtendedRational = INF if math.isinf(z_star) else Fraction(z_star)
    if exact_objective is not None and exact_objective < z_hat:
        z_hat = exact_objective
    for v in verdicts:
        if v.verdict.is_error and v.dual_bound is not None and v.dual_bound < z_hat:
            z_hat = v.dual_bound
    return z_hat, z_star


@dataclass
class VerificationReport:
    verdicts: list[LeafVerdict]
    z_hat: ExtendedRational
    z_star: float
    exact_objective: Fraction | None = None
    exact_solution: tuple[Fraction, ...] | None = None
    unresolved: int = 0
    counts: dict[str, int] = field(init=False)
    techniques: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.counts = {c.value: 0 for c in VerdictClass}
        self.techniques = {t.value: 0 for t in CASCADE}
        for v in self.verdicts:
            self.counts[v.verdict.value] += 1
            if v.technique is not None:
                self.techniques[v.technique.value] += 1

    @property
    def leaves(self) -> int:
        return len(self.verdicts)

    @property
    def errors(self) -> int:
        return sum(self.counts[c.value] for c in ERROR_CLASSES)

    @property
    def strong_errors(self) -> int:
        return sum(self.counts[c.value] for c in ERROR_CLASSES if c.is_strong)

    def count(self, cls: VerdictClass) -> int:
        return self.counts[cls.value]

    def technique_share(self, t: Technique) -> float:
        return self.techniques[t.value] / self.leaves if self.leaves else 0.0


def _verify_one(args):
    p, event, config = args
    return verify_leaf(p, event, config)


def verify_events(p: MipProblem, events: Sequence[BnbEvent],
                  config: VerifyConfig = VerifyConfig(), jobs: int = 1,
                  unresolved: int = 0) -> VerificationReport:
    """Verify every leaf event and assemble the report.

    Leaves are independent, so ``jobs > 1`` fans them out to worker
    processes; results are collected in event order, so the report does not
    depend on the worker count.
    """
    leaves = [e for e in events if e.is_leaf]
    if jobs > 1 and len(leaves) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_verify_one, [(p, e, config) for e in leaves], chunksize=4))
    else:
        raw = [verify_leaf(p, e, config) for e in leaves]
    verdicts = classify_hindsight(raw)
    z_star = math.inf
    for e in events:
        if e.kind is EventKind.BEST_SOLUTION:
            z_star = e.objective
    best = None
    for v in verdicts:
        if v.incumbent_objective is not None and (best is None or v.incumbent_objective < best.incumbent_objective):
            best = v
    z_hat, _ = global_bound_interval(verdicts, z_star, None if best is None else best.incumbent_objective)
    return VerificationReport(
        verdicts, z_hat, z_star,
        exact_objective=None if best is None else best.incumbent_objective,
        exact_solution=None if best is None else best.incumbent,
        unresolved=unresolved,
    )
