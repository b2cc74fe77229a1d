"""Text and JSON rendering of a :class:`VerificationReport`."""

from __future__ import annotations

import json
import math

from .bnb import EventKind
from .eventlog import decode_float, encode_float
from .rational import format_rational, parse_rational
from .verify import CASCADE, LeafVerdict, Technique, VerdictClass, VerificationReport

COLUMNS = (
    ("Sol W", VerdictClass.WEAK_SOLUTION),
    ("Sol S", VerdictClass.STRONG_SOLUTION),
    ("Bound W", VerdictClass.WEAK_BOUND),
    ("Bound S", VerdictClass.STRONG_BOUND),
    ("Gap W", VerdictClass.WEAK_GAP),
    ("Gap S", VerdictClass.STRONG_GAP),
    ("Inf", VerdictClass.INFEASIBILITY),
)


def _opt_rat(v):
    return None if v is None else format_rational(v)


def _opt_parse(s):
    return None if s is None else parse_rational(s)


def _fmt_float(v: float) -> str:
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return repr(v)


def verdict_to_json(v: LeafVerdict) -> dict:
    return {
        "seq": v.seq,
        "node": v.node_id,
        "kind": v.kind.value,
        "verdict": v.verdict.value,
        "technique": None if v.technique is None else v.technique.value,
        "dual_bound": _opt_rat(v.dual_bound),
        "lp_value": _opt_rat(v.lp_value),
        "incumbent": None if v.incumbent is None else [format_rational(a) for a in v.incumbent],
        "incumbent_objective": _opt_rat(v.incumbent_objective),
    }


def verdict_from_json(d: dict) -> LeafVerdict:
    return LeafVerdict(
        seq=int(d["seq"]),
        node_id=int(d["node"]),
        kind=EventKind(d["kind"]),
        verdict=VerdictClass(d["verdict"]),
        technique=None if d["technique"] is None else Technique(d["technique"]),
        dual_bound=_opt_parse(d["dual_bound"]),
        lp_value=_opt_parse(d["lp_value"]),
        incumbent=None if d["incumbent"] is None else tuple(parse_rational(a) for a in d["incumbent"]),
        incumbent_objective=_opt_parse(d["incumbent_objective"]),
    )


def report_to_json(r: VerificationReport) -> dict:
    return {
        "leaves": r.leaves,
        "counts": dict(r.counts),
        "columns": {name: r.count(cls) for name, cls in COLUMNS},
        "techniques": dict(r.techniques),
        "interval": {"z_hat": format_rational(r.z_hat), "z_star": encode_float(r.z_star)},
        "exact_objective": _opt_rat(r.exact_objective),
        "exact_solution": None if r.exact_solution is None else [format_rational(a) for a in r.exact_solution],
        "unresolved": r.unresolved,
        "verdicts": [verdict_to_json(v) for v in r.verdicts],
    }


def report_from_json(d: dict) -> VerificationReport:
    sol = d["exact_solution"]
    return VerificationReport(
        verdicts=[verdict_from_json(v) for v in d["verdicts"]],
        z_hat=parse_rational(d["interval"]["z_hat"]),
        z_star=decode_float(d["interval"]["z_star"]),
        exact_objective=_opt_parse(d["exact_objective"]),
        exact_solution=None if sol is None else tuple(parse_rational(a) for a in sol),
        unresolved=int(d["unresolved"]),
    )


def format_text(r: VerificationReport) -> str:
    head = ["leaves"] + [name for name, _ in COLUMNS] + ["Verified", "Inconcl."]
    vals = [r.leaves] + [r.count(cls) for _, cls in COLUMNS] + [
        r.count(VerdictClass.VERIFIED), r.count(VerdictClass.INCONCLUSIVE)]
    widths = [max(len(h), len(str(v))) for h, v in zip(head, vals)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths)),
             "  ".join(str(v).rjust(w) for v, w in zip(vals, widths)),
             ""]
    thead = [t.value for t in CASCADE]
    tvals = [f"{100.0 * r.technique_share(t):.2f}%" for t in CASCADE]
    tw = [max(len(h), len(v)) for h, v in zip(thead, tvals)]
    lines.append("technique  " + "  ".join(h.rjust(w) for h, w in zip(thead, tw)))
    lines.append("share      " + "  ".join(v.rjust(w) for v, w in zip(tvals, tw)))
    lines.append("")
    if math.isinf(r.z_star) and r.z_star > 0 and r.errors == 0:
        lines.append("interval: no incumbent")
    else:
        lines.append(f"interval: [{format_rational(r.z_hat)}, {_fmt_float(r.z_star)}]")
    if r.exact_objective is not None:
        lines.append(f"exact incumbent objective: {format_rational(r.exact_objective)}")
    if r.unresolved:
        lines.append(f"unresolved nodes (iteration limit, not audited): {r.unresolved}")
    errs = [v for v in r.verdicts if v.verdict.is_error]
    if errs:
        lines.append("")
        lines.append("error leaves:")
        for v in errs:
            tech = v.technique.value if v.technique else "-"
            bound = "-" if v.dual_bound is None else format_rational(v.dual_bound)
            lines.append(f"  seq {v.seq} node {v.node_id} {v.kind.value}: "
                         f"{v.verdict.value} via {tech}, dual bound {bound}")
    return "\n".join(lines) + "\n"


def write_report(r: VerificationReport, fmt: str = "text") -> str:
    if fmt == "text":
        return format_text(r)
    if fmt == "json":
        return json.dumps(report_to_json(r), sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
