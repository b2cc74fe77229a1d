"""Command line: ``bnb-auditor {solve,verify,run} MODEL [options]``.

Exit status: 0 every leaf verified, 1 errors (or undecided leaves) found,
2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .bnb import Tolerances, solve_bnb
from .eventlog import EventLogError, LogHeader, dumps_events, read_events
from .model import (
    ModelFormatError,
    MpsParseError,
    load_model,
    permute_model,
    presolve,
    unpermute_vector,
)
from .rational import format_rational, parse_rational, to_float
from .report import write_report
from .verify import DEFAULT_MAX_DENOMINATOR, VerdictClass, VerifyConfig, verify_events

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2
SEED_ENV = "BNB_AUDITOR_SEED"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Path
    tolerances: Tolerances
    time_limit: float | None = None
    node_limit: int | None = None
    permute: int | None = None
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    verify_level: str = "exact"
    presolve: bool = True
    report: str = "text"
    events: Path | None = None
    output: Path | None = None
    jobs: int = 1
    kernel: str | None = None

    @property
    def events_path(self) -> Path:
        if self.events is not None:
            return self.events
        return self.model.with_name(self.model.name + ".events.jsonl")


def _tolerance(text: str) -> Fraction:
    try:
        v = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance {text!r}") from exc
    if not isinstance(v, Fraction) or v <= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive and finite, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnb-auditor",
        description="Floating-point branch-and-bound with an exact audit of every leaf.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("solve", "run branch-and-bound and write the event log"),
                            ("verify", "audit an event log against its model"),
                            ("run", "solve, then verify")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("model", type=Path, help="MPS file or canonical model file")
        sp.add_argument("--feastol", type=_tolerance, default=Fraction(1, 10**6),
                        help="primal feasibility tolerance (default: 1e-6)")
        sp.add_argument("--inttol", type=_tolerance, default=None,
                        help="integrality tolerance (default: feastol)")
        sp.add_argument("--zerotol", type=_tolerance, default=Fraction(1, 10**9),
                        help="equality and pruning tolerance (default: 1e-9)")
        sp.add_argument("--time-limit", type=float, default=None, metavar="SECONDS",
                        help="stop branch-and-bound after this wall time")
        sp.add_argument("--node-limit", type=_positive_int, default=None,
                        help="stop branch-and-bound after this many nodes")
        sp.add_argument("--permute", type=_seed, default=None, metavar="SEED",
                        help=f"shuffle rows and columns with this seed ({SEED_ENV} overrides)")
        sp.add_argument("--max-denominator", type=_positive_int, default=DEFAULT_MAX_DENOMINATOR,
                        help="denominator limit for rational reconstruction (default: 2**32)")
        sp.add_argument("--verify-level", choices=("safe", "reconstruct", "factorize", "exact"),
                        default="exact", help="highest verification technique to try")
        sp.add_argument("--presolve", choices=("on", "off"), default="on",
                        help="model cleanup and bound propagation before solving")
        sp.add_argument("--report", choices=("text", "json"), default="text")
        sp.add_argument("--events", type=Path, default=None,
                        help="event log path (default: MODEL.events.jsonl)")
        sp.add_argument("--output", type=Path, default=None,
                        help="write the report here instead of stdout")
        sp.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                        help="worker processes for verification (default: CPU count)")
        sp.add_argument("--kernel", choices=("cython", "python"), default=None,
                        help="force a simplex kernel")
    return parser


def config_from_args(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    permute = args.permute
    if environ.get(SEED_ENV):
        try:
            permute = _seed(environ[SEED_ENV])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{SEED_ENV}: {exc}") from exc
    tol = Tolerances(
        feastol=to_float(args.feastol),
        inttol=None if args.inttol is None else to_float(args.inttol),
        zerotol=to_float(args.zerotol),
    )
    return RunConfig(
        command=args.command, model=args.model, tolerances=tol,
        time_limit=args.time_limit, node_limit=args.node_limit, permute=permute,
        max_denominator=args.max_denominator, verify_level=args.verify_level,
        presolve=args.presolve == "on", report=args.report, events=args.events,
        output=args.output, jobs=args.jobs, kernel=args.kernel,
    )


def prepare_model(cfg: RunConfig):
    try:
        p = load_model(cfg.model)
    except OSError as exc:
        raise UsageError(f"cannot read model: {exc}") from exc
    except (MpsParseError, ModelFormatError, ValueError) as exc:
        raise UsageError(f"cannot parse model {cfg.model}: {exc}") from exc
    if cfg.presolve:
        p = presolve(p)
    if cfg.permute is not None:
        p = permute_model(p, cfg.permute)
    return p


def do_solve(cfg: RunConfig, p, err) -> str:
    outcome = solve_bnb(p, cfg.tolerances, cfg.time_limit, cfg.node_limit, cfg.kernel)
    st = outcome.stats
    header = LogHeader(
        model_hash=p.content_hash, tolerances=cfg.tolerances, presolve=cfg.presolve,
        permute=cfg.permute, status=outcome.status, z_star=outcome.objective,
        unresolved=len(st.unresolved),
        stats={"nodes_processed": st.nodes_processed, "nodes_created": st.nodes_created,
               "branched": st.branched, "leaves": dict(sorted(st.leaves.items()))},
    )
    text = dumps_events(header, outcome.events)
    try:
        cfg.events_path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write event log: {exc}") from exc
    print(f"status: {outcome.status}", file=err)
    print(f"z*: {outcome.objective!r}", file=err)
    print(f"nodes: {st.nodes_processed} processed, {st.branched} branched, "
          f"{sum(st.leaves.values())} leaf events, {len(st.unresolved)} unresolved "
          f"({st.wall_time:.3f} s)", file=err)
    print(f"event log: {cfg.events_path}", file=err)
    return text


def do_verify(cfg: RunConfig, p, out, err) -> int:
    try:
        header, events = read_events(cfg.events_path)
    except OSError as exc:
        raise UsageError(f"cannot read event log: {exc}") from exc
    except EventLogError as exc:
        raise UsageError(f"corrupt event log {cfg.events_path}: {exc}") from exc
    if header.model_hash != p.content_hash:
        raise UsageError(
            "model mismatch: the event log was produced from a different model "
            "(check the model file and the --presolve/--permute settings)")
    vcfg = VerifyConfig.capped(cfg.verify_level, tolerances=header.tolerances,
                               max_denominator=cfg.max_denominator, kernel=cfg.kernel)
    report = verify_events(p, events, vcfg, jobs=cfg.jobs, unresolved=header.unresolved)
    if report.exact_solution is not None and cfg.permute is not None:
        report.exact_solution = tuple(unpermute_vector(p, report.exact_solution))
    text = write_report(report, cfg.report)
    if cfg.output is not None:
        try:
            cfg.output.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write report: {exc}") from exc
    else:
        out.write(text)
    fully = (report.errors == 0 and report.unresolved == 0
             and report.count(VerdictClass.INCONCLUSIVE) == 0)
    print(f"leaves: {report.leaves}, errors: {report.errors} "
          f"(strong {report.strong_errors}), interval [{format_rational(report.z_hat)}, "
          f"{report.z_star!r}]", file=err)
    return EXIT_OK if fully else EXIT_ERRORS


def run_pipeline(cfg: RunConfig, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    p = prepare_model(cfg)
    if cfg.command in ("solve", "run"):
        do_solve(cfg, p, err)
        if cfg.command == "solve":
            return EXIT_OK
    return do_verify(cfg, p, out, err)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run_pipeline(cfg)
    except UsageError as exc:
        print(f"bnb-auditor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
