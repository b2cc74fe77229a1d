"""Floating-point branch-and-bound for MIPs with an exact audit of every leaf."""

from __future__ import annotations

from ._kernel import BACKEND as KERNEL_BACKEND
from .bnb import BnbEvent, BnbOutcome, EventKind, NodePath, Tolerances, choose_branch_variable, solve_bnb
from .model import (
    MipProblem,
    cleanup_model,
    dumps_model,
    load_model,
    loads_model,
    parse_mps,
    permute_model,
    presolve,
    propagate_bounds,
    read_mps,
    write_mps,
)
from .rational import INF, NEG_INF, parse_rational, reconstruct_rational, to_float
from .simplex_exact import complete_solution, factorize_basis_exact, solve_lp_exact
from .simplex_fp import Basis, FpLpResult, LpStatus, solve_lp_fp
from .verify import (
    LeafVerdict,
    SafeDualCertificate,
    Technique,
    VerdictClass,
    VerificationReport,
    VerifyConfig,
    classify_hindsight,
    global_bound_interval,
    safe_dual_bound,
    validate_farkas_exact,
    verify_events,
    verify_leaf,
)

__version__ = "0.1.0"
