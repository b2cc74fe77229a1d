"""Exact MIP model: MPS parsing, canonical serialization, presolve, permutation.

Every model is normalized to ``min c^T x  s.t.  A x >= b,  l <= x <= u``
with integrality on a subset of the variables.  All data are exact
rationals; infinite bounds use :data:`~bnb_auditor.rational.INF`.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .rational import (
    INF,
    NEG_INF,
    ExtendedRational,
    Infinity,
    format_rational,
    parse_rational,
    to_float,
)

logger = logging.getLogger(__name__)

Row = tuple[tuple[int, Fraction], ...]

#: MPS bound values at or beyond this magnitude are read as infinite
MPS_INFINITY = Fraction(10) ** 30


class MpsParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ModelFormatError(ValueError):
    """Malformed canonical model text."""


@dataclass(frozen=True, eq=False)
class MipProblem:
    """A normalized MIP ``min c^T x, A x >= b, l <= x <= u, x_I integer``.

    ``var_origin``/``row_origin`` map each position to its index in the
    unpermuted model, so reports can name original entities after
    :func:`permute_model`.  ``objective_sign`` is -1 when the source was a
    maximization problem (``c`` has already been negated).
    """

    name: str
    var_names: tuple[str, ...]
    objective: tuple[Fraction, ...]
    rows: tuple[Row, ...]
    rhs: tuple[Fraction, ...]
    row_names: tuple[str, ...]
    lower: tuple[ExtendedRational, ...]
    upper: tuple[ExtendedRational, ...]
    integers: frozenset[int]
    objective_sign: int = 1
    objective_offset: Fraction = Fraction(0)
    infeasible: bool = False
    var_origin: tuple[int, ...] | None = None
    row_origin: tuple[int, ...] | None = None

    def __post_init__(self):
        n, m = len(self.var_names), len(self.rows)
        if not (len(self.objective) == len(self.lower) == len(self.upper) == n):
            raise ValueError("variable data length mismatch")
        if not (len(self.rhs) == len(self.row_names) == m):
            raise ValueError("row data length mismatch")
        for i, row in enumerate(self.rows):
            seen = set()
            for j, a in row:
                if a == 0:
                    raise ValueError(f"row {self.row_names[i]!r} stores a zero coefficient")
                if j in seen or not 0 <= j < n:
                    raise ValueError(f"row {self.row_names[i]!r} has a bad column index {j}")
                seen.add(j)
        if self.var_origin is None:
            object.__setattr__(self, "var_origin", tuple(range(n)))
        if self.row_origin is None:
            object.__setattr__(self, "row_origin", tuple(range(m)))

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, MipProblem):
            return NotImplemented
        return dumps_model(self) == dumps_model(other)

    def __hash__(self):
        return hash(self.content_hash)

    @cached_property
    def columns(self) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
        cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.num_vars)]
        for i, row in enumerate(self.rows):
            for j, a in row:
                cols[j].append((i, a))
        return tuple(tuple(c) for c in cols)

    @cached_property
    def content_hash(self) -> str:
        return hashlib.sha256(dumps_model(self).encode()).hexdigest()

    def bounds_violated(self) -> bool:
        return any(lo > up for lo, up in zip(self.lower, self.upper))

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction], lower=None, upper=None) -> bool:
        """Exact check of rows, bounds and integrality."""
        lower = self.lower if lower is None else lower
        upper = self.upper if upper is None else upper
        for j, v in enumerate(x):
            if v < lower[j] or v > upper[j]:
                return False
            if j in self.integers and v.denominator != 1:
                return False
        for row, b in zip(self.rows, self.rhs):
            if sum((a * x[j] for j, a in row), Fraction(0)) < b:
                return False
        return True


# --------------------------------------------------------------------------
# MPS parsing

_BOUND_TYPES = {"LO", "UP", "FX", "FR", "MI", "PL", "BV", "LI", "UI"}
_FIXED_FIELDS = ((1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61))


def _number(tok: str, lineno: int) -> Fraction:
    try:
        val = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise MpsParseError(f"malformed number {tok!r}", lineno) from None
    return val


def _fields(line: str, fixed: bool) -> list[str]:
    if not fixed:
        return line.split()
    return [t for t in (line[a:b].strip() for a, b in _FIXED_FIELDS) if t]


def parse_mps(text: str | bytes, fixed: bool = False) -> MipProblem:
    """Parse a free-format (or, with ``fixed=True``, fixed-column) MPS file.

    Numbers are read exactly.  ``L`` rows are negated, ``E`` rows and
    ranged rows are split into two ``>=`` rows, and maximization is turned
    into minimization by negating the objective.
    """
    if isinstance(text, bytes):
        text = text.decode()
    name = ""
    section = None
    sense = 1
    obj_row: str | None = None
    row_kind: dict[str, str] = {}
    row_order: list[str] = []
    col_index: dict[str, int] = {}
    col_names: list[str] = []
    coefs: list[dict[int, Fraction]] = []  # per row (order of row_order)
    row_pos: dict[str, int] = {}
    obj: dict[int, Fraction] = {}
    rhs: dict[str, Fraction] = {}
    ranges: dict[str, Fraction] = {}
    lower: dict[int, ExtendedRational] = {}
    upper: dict[int, ExtendedRational] = {}
    integers: set[int] = set()
    in_int = False
    obj_offset = Fraction(0)
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not line[0].isspace():
            head = line.split()
            key = head[0].upper()
            if key == "NAME":
                name = " ".join(head[1:]) if not fixed else line[14:].strip() or " ".join(head[1:])
                section = "NAME"
                continue
            if key == "OBJSENSE":
                section = "OBJSENSE"
                if len(head) > 1:
                    sense = _objsense(head[1], lineno)
                continue
            if key in ("MAX", "MAXIMIZE", "MIN", "MINIMIZE") and section == "OBJSENSE":
                sense = _objsense(key, lineno)
                continue
            if key in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS"):
                section = key
                continue
            if key == "ENDATA":
                ended = True
                break
            raise MpsParseError(f"unknown section {head[0]!r}", lineno)

        tok = _fields(line, fixed)
        if section == "OBJSENSE":
            sense = _objsense(tok[0], lineno)
        elif section == "ROWS":
            if len(tok) != 2:
                raise MpsParseError("ROWS entry needs a type and a name", lineno)
            kind, rname = tok[0].upper(), tok[1]
            if kind not in ("N", "L", "G", "E"):
                raise MpsParseError(f"unknown row type {kind!r}", lineno)
            if rname in row_kind:
                raise MpsParseError(f"duplicate row name {rname!r}", lineno)
            row_kind[rname] = kind
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            row_pos[rname] = len(row_order)
            row_order.append(rname)
            coefs.append({})
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1].strip("'").upper() == "MARKER":
                marker = tok[2].strip("'").upper()
                if marker == "INTORG":
                    in_int = True
                elif marker == "INTEND":
                    in_int = False
                else:
                    raise MpsParseError(f"unknown marker {tok[2]!r}", lineno)
                continue
            if len(tok) not in (3, 5):
                raise MpsParseError("COLUMNS entry needs 3 or 5 fields", lineno)
            cname = tok[0]
            j = col_index.get(cname)
            if j is None:
                j = col_index[cname] = len(col_names)
                col_names.append(cname)
                if in_int:
                    integers.add(j)
            for rname, val in zip(tok[1::2], tok[2::2]):
                v = _number(val, lineno)
                if rname == obj_row:
                    obj[j] = obj.get(j, Fraction(0)) + v
                elif rname in row_pos:
                    d = coefs[row_pos[rname]]
                    d[j] = d.get(j, Fraction(0)) + v
                elif rname in row_kind:
                    continue  # extra free row
                else:
                    raise MpsParseError(f"unknown row {rname!r}", lineno)
        elif section in ("RHS", "RANGES"):
            if len(tok) % 2 == 1:
                tok = tok[1:]
            if len(tok) not in (2, 4):
                raise MpsParseError(f"{section} entry has a bad field count", lineno)
            for rname, val in zip(tok[0::2], tok[1::2]):
                v = _number(val, lineno)
                if rname == obj_row:
                    if section == "RHS":
                        obj_offset = -v
                    continue
                if rname not in row_kind:
                    raise MpsParseError(f"unknown row {rname!r}", lineno)
                if row_kind[rname] == "N":
                    continue
                (rhs if section == "RHS" else ranges)[rname] = v
        elif section == "BOUNDS":
            btype = tok[0].upper() if tok else ""
            if btype not in _BOUND_TYPES:
                raise MpsParseError(f"unknown bound type {btype!r}", lineno)
            rest = tok[1:]
            needs_value = btype in ("LO", "UP", "FX", "LI", "UI")
            if needs_value:
                if len(rest) == 3:
                    rest = rest[1:]
                if len(rest) != 2:
                    raise MpsParseError(f"{btype} bound needs a column and a value", lineno)
            elif btype == "BV":
                if len(rest) == 3:
                    rest = rest[1:2]
                elif len(rest) == 2 and not (rest[0] in col_index and _is_number(rest[1])):
                    rest = rest[1:]
                else:
                    rest = rest[:1]
            else:
                if len(rest) >= 2:
                    rest = rest[1:2]
            if not rest:
                raise MpsParseError("bound without a column", lineno)
            cname = rest[0]
            if cname not in col_index:
                raise MpsParseError(f"bound on unknown column {cname!r}", lineno)
            j = col_index[cname]
            val = _bound_value(rest[1], lineno) if needs_value else None
            if btype in ("LO", "LI"):
                lower[j] = val
            elif btype in ("UP", "UI"):
                upper[j] = val
                if val < 0 and lower.get(j, Fraction(0)) == 0 and j not in lower:
                    logger.warning("line %d: negative UP bound on %s sets lower bound to -inf",
                                   lineno, cname)
                    lower[j] = NEG_INF
            elif btype == "FX":
                lower[j] = upper[j] = val
            elif btype == "FR":
                lower[j], upper[j] = NEG_INF, INF
            elif btype == "MI":
                lower[j] = NEG_INF
            elif btype == "PL":
                upper[j] = INF
            elif btype == "BV":
                lower[j], upper[j] = Fraction(0), Fraction(1)
            if btype in ("LI", "UI", "BV"):
                integers.add(j)
        elif section is None or section == "NAME":
            raise MpsParseError("data line outside of a section", lineno)
    if not ended and section is None:
        raise MpsParseError("empty MPS input")

    rows: list[Row] = []
    rhs_out: list[Fraction] = []
    names: list[str] = []

    def emit(rname, d, b, negate):
        if negate:
            rows.append(tuple((j, -a) for j, a in sorted(d.items()) if a != 0))
            rhs_out.append(-b)
        else:
            rows.append(tuple((j, a) for j, a in sorted(d.items()) if a != 0))
            rhs_out.append(b)
        names.append(rname)

    for rname, d in zip(row_order, coefs):
        kind = row_kind[rname]
        b = rhs.get(rname, Fraction(0))
        if rname in ranges:
            r = ranges[rname]
            if kind == "G":
                lo, hi = b, b + abs(r)
            elif kind == "L":
                lo, hi = b - abs(r), b
            elif r >= 0:
                lo, hi = b, b + r
            else:
                lo, hi = b + r, b
            emit(rname, d, lo, False)
            emit(rname + "~ub", d, hi, True)
        elif kind == "G":
            emit(rname, d, b, False)
        elif kind == "L":
            emit(rname, d, b, True)
        else:
            emit(rname, d, b, False)
            emit(rname + "~neg", d, b, True)

    n = len(col_names)
    lo_out = tuple(lower.get(j, Fraction(0)) for j in range(n))
    up_out = tuple(upper.get(j, INF) for j in range(n))
    c = tuple(sense * obj.get(j, Fraction(0)) for j in range(n))
    prob = MipProblem(
        name=name,
        var_names=tuple(col_names),
        objective=c,
        rows=tuple(rows),
        rhs=tuple(rhs_out),
        row_names=tuple(names),
        lower=lo_out,
        upper=up_out,
        integers=frozenset(integers),
        objective_sign=sense,
        objective_offset=sense * obj_offset,
    )
    if prob.bounds_violated():
        prob = replace(prob, infeasible=True)
    return prob


def _objsense(tok: str, lineno: int) -> int:
    t = tok.upper()
    if t in ("MAX", "MAXIMIZE"):
        return -1
    if t in ("MIN", "MINIMIZE"):
        return 1
    raise MpsParseError(f"unknown objective sense {tok!r}", lineno)


def _is_number(tok: str) -> bool:
    try:
        Fraction(tok)
    except (ValueError, ZeroDivisionError):
        return False
    return True


def _bound_value(tok: str, lineno: int) -> ExtendedRational:
    v = _number(tok, lineno)
    if v >= MPS_INFINITY:
        return INF
    if v <= -MPS_INFINITY:
        return NEG_INF
    return v


def read_mps(path) -> MipProblem:
    with open(path, "rb") as fh:
        return parse_mps(fh.read())


def _mps_number(v: Fraction) -> str:
    # terminating decimals are written as decimals, everything else as p/q
    d = v.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return format_rational(v)
    if v.denominator == 1:
        return str(v.numerator)
    digits = 0
    scaled = v
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def write_mps(p: MipProblem) -> str:
    """Free-format MPS of the normalized model (all rows written as ``G``).

    Non-terminating rationals are written as ``p/q``, which :func:`parse_mps`
    accepts.  Maximization models are written back with ``OBJSENSE MAX``.
    """
    out = [f"NAME {p.name or 'model'}"]
    if p.objective_sign < 0:
        out += ["OBJSENSE", "    MAX"]
    out.append("ROWS")
    out.append(" N  obj")
    out += [f" G  {r}" for r in p.row_names]
    out.append("COLUMNS")
    in_int = False
    for j, cname in enumerate(p.var_names):
        is_int = j in p.integers
        if is_int != in_int:
            out.append(f"    M{j} 'MARKER' '{'INTORG' if is_int else 'INTEND'}'")
            in_int = is_int
        c = p.objective[j] * p.objective_sign
        if c != 0:
            out.append(f"    {cname} obj {_mps_number(c)}")
        for i, a in p.columns[j]:
            out.append(f"    {cname} {p.row_names[i]} {_mps_number(a)}")
        if not p.columns[j] and c == 0:
            out.append(f"    {cname} obj 0")
    if in_int:
        out.append("    Mend 'MARKER' 'INTEND'")
    out.append("RHS")
    if p.objective_offset:
        out.append(f"    rhs obj {_mps_number(-p.objective_offset * p.objective_sign)}")
    for rname, b in zip(p.row_names, p.rhs):
        if b != 0:
            out.append(f"    rhs {rname} {_mps_number(b)}")
    out.append("BOUNDS")
    for j, cname in enumerate(p.var_names):
        lo, up = p.lower[j], p.upper[j]
        if lo == NEG_INF and up == INF:
            out.append(f" FR bnd {cname}")
            continue
        if isinstance(lo, Fraction) and lo == up:
            out.append(f" FX bnd {cname} {_mps_number(lo)}")
            continue
        if lo == NEG_INF:
            out.append(f" MI bnd {cname}")
        elif lo != 0:
            out.append(f" LO bnd {cname} {_mps_number(lo)}")
        elif up < 0:
            # keep an explicit zero lower bound so a negative UP is not read as MI
            out.append(f" LO bnd {cname} 0")
        if up != INF:
            out.append(f" UP bnd {cname} {_mps_number(up)}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# canonical exact text serialization

def dumps_model(p: MipProblem) -> str:
    """Canonical exact text form; used for fixtures and the model hash."""
    out = [
        "MIPMODEL 1",
        f"name {p.name}",
        f"sense {p.objective_sign}",
        f"offset {format_rational(p.objective_offset)}",
        f"infeasible {int(p.infeasible)}",
        f"vars {p.num_vars}",
    ]
    for j in range(p.num_vars):
        kind = "int" if j in p.integers else "cont"
        out.append(
            f"v {p.var_names[j]} {kind} {format_rational(p.lower[j])} "
            f"{format_rational(p.upper[j])} {format_rational(p.objective[j])} {p.var_origin[j]}"
        )
    out.append(f"rows {p.num_rows}")
    for i in range(p.num_rows):
        terms = " ".join(f"{j}:{format_rational(a)}" for j, a in p.rows[i])
        out.append(f"r {p.row_names[i]} {format_rational(p.rhs[i])} {p.row_origin[i]} | {terms}")
    return "\n".join(out) + "\n"


def loads_model(text: str) -> MipProblem:
    lines = text.splitlines()
    try:
        if lines[0].split() != ["MIPMODEL", "1"]:
            raise ModelFormatError("missing MIPMODEL header")
        it = iter(lines[1:])
        name = next(it)[len("name "):]
        sense = int(next(it).split()[1])
        offset = parse_rational(next(it).split()[1])
        infeasible = bool(int(next(it).split()[1]))
        n = int(next(it).split()[1])
        names, kinds, lo, up, c, vorig = [], [], [], [], [], []
        for _ in range(n):
            _, vname, kind, l, u, cj, o = next(it).split()
            names.append(vname)
            kinds.append(kind == "int")
            lo.append(parse_rational(l))
            up.append(parse_rational(u))
            c.append(parse_rational(cj))
            vorig.append(int(o))
        m = int(next(it).split()[1])
        rnames, rhs, rows, rorig = [], [], [], []
        for _ in range(m):
            headpart, _, terms = next(it).partition(" | ")
            _, rname, b, o = headpart.split()
            rnames.append(rname)
            rhs.append(parse_rational(b))
            rorig.append(int(o))
            row = []
            for t in terms.split():
                j, a = t.split(":")
                row.append((int(j), parse_rational(a)))
            rows.append(tuple(row))
    except (StopIteration, ValueError, IndexError) as exc:
        raise ModelFormatError(f"malformed model text: {exc}") from exc
    return MipProblem(
        name=name,
        var_names=tuple(names),
        objective=tuple(c),
        rows=tuple(rows),
        rhs=tuple(rhs),
        row_names=tuple(rnames),
        lower=tuple(lo),
        upper=tuple(up),
        integers=frozenset(j for j, k in enumerate(kinds) if k),
        objective_sign=sense,
        objective_offset=offset,
        infeasible=infeasible,
        var_origin=tuple(vorig),
        row_origin=tuple(rorig),
    )


def load_model(path) -> MipProblem:
    """Read a model from ``.mps`` or canonical text (detected by header)."""
    with open(path, "rb") as fh:
        data = fh.read().decode()
    if data.startswith("MIPMODEL"):
        return loads_model(data)
    return parse_mps(data)


# --------------------------------------------------------------------------
# presolve

def _round_inward(j: int, lo, up, integers):
    if j in integers:
        if isinstance(lo, Fraction):
            lo = Fraction(math.ceil(lo))
        if isinstance(up, Fraction):
            up = Fraction(math.floor(up))
    return lo, up


def _min_activity(row: Row, lower, upper) -> ExtendedRational:
    total = Fraction(0)
    for j, a in row:
        bound = lower[j] if a > 0 else upper[j]
        if isinstance(bound, Infinity):
            return NEG_INF
        total += a * bound
    return total


def cleanup_model(p: MipProblem) -> MipProblem:
    """Delete bound-redundant rows and turn singleton rows into bounds.

    Runs to a fixpoint, since a new bound can make further rows redundant.
    Integer bounds are rounded inward.  Crossing bounds flag the model
    infeasible; the rows are kept in that case.
    """
    lower = list(p.lower)
    upper = list(p.upper)
    for j in range(p.num_vars):
        lower[j], upper[j] = _round_inward(j, lower[j], upper[j], p.integers)
    keep = list(range(p.num_rows))
    infeasible = p.infeasible
    changed = True
    while changed and not infeasible:
        changed = False
        survivors = []
        for i in keep:
            row, b = p.rows[i], p.rhs[i]
            if _min_activity(row, lower, upper) >= b:
                changed = True
                continue
            if len(row) == 0:
                # 0 >= b with b > 0
                infeasible = True
                survivors.append(i)
                continue
            if len(row) == 1:
                (j, a), = row
                bound = b / a
                if a > 0:
                    if bound > lower[j]:
                        lower[j] = bound
                else:
                    if bound < upper[j]:
                        upper[j] = bound
                lower[j], upper[j] = _round_inward(j, lower[j], upper[j], p.integers)
                if lower[j] > upper[j]:
                    infeasible = True
                changed = True
                continue
            survivors.append(i)
        keep = survivors
    return _with_rows(p, keep, lower, upper, infeasible)


def _with_rows(p: MipProblem, keep: Sequence[int], lower, upper, infeasible) -> MipProblem:
    return replace(
        p,
        rows=tuple(p.rows[i] for i in keep),
        rhs=tuple(p.rhs[i] for i in keep),
        row_names=tuple(p.row_names[i] for i in keep),
        row_origin=tuple(p.row_origin[i] for i in keep),
        lower=tuple(lower),
        upper=tuple(upper),
        infeasible=infeasible or any(lo > up for lo, up in zip(lower, upper)),
    )


def propagate_bounds(p: MipProblem, max_rounds: int = 10) -> MipProblem:
    """Activity-based bound tightening in exact arithmetic.

    For row ``a x >= b`` and ``a_j != 0`` the implied bound on ``x_j`` is
    ``(b - maxact_without_j) / a_j``.  Sweeps stop after ``max_rounds`` or
    when a sweep changes nothing.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    lower = list(p.lower)
    upper = list(p.upper)
    infeasible = p.infeasible
    for _ in range(max_rounds):
        if infeasible:
            break
        changed = False
        for row, b in zip(p.rows, p.rhs):
            # max activity split into finite part and count of infinite terms
            finite = Fraction(0)
            n_inf = 0
            contrib = []
            for j, a in row:
                bound = upper[j] if a > 0 else lower[j]
                if isinstance(bound, Infinity):
                    n_inf += 1
                    contrib.append(None)
                else:
                    t = a * bound
                    finite += t
                    contrib.append(t)
            if n_inf > 1:
                continue
            for (j, a), t in zip(row, contrib):
                if t is None:
                    rest = finite
                elif n_inf:
                    continue
                else:
                    rest = finite - t
                implied = (b - rest) / a
                if a > 0:
                    if j in p.integers:
                        implied = Fraction(math.ceil(implied))
                    if implied > lower[j]:
                        lower[j] = implied
                        changed = True
                else:
                    if j in p.integers:
                        implied = Fraction(math.floor(implied))
                    if implied < upper[j]:
                        upper[j] = implied
                        changed = True
                if lower[j] > upper[j]:
                    infeasible = True
                    break
            if infeasible:
                break
        if not changed:
            break
    return replace(p, lower=tuple(lower), upper=tuple(upper), infeasible=infeasible)


def presolve(p: MipProblem, max_rounds: int = 10) -> MipProblem:
    """Model cleanup followed by bound propagation."""
    q = cleanup_model(p)
    if q.infeasible:
        return q
    return propagate_bounds(q, max_rounds)


# --------------------------------------------------------------------------
# permutation

_MASK = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator (64-bit state, Steele/Lea/Flood constants)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)


def _fisher_yates(k: int, rng: SplitMix64) -> list[int]:
    order = list(range(k))
    for i in range(k - 1, 0, -1):
        j = rng.next() % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def permute_model(p: MipProblem, seed: int, identity: bool = False) -> MipProblem:
    """Shuffle rows, then columns, with one splitmix64 stream.

    Position ``k`` of the result holds old variable ``perm[k]``; the
    composed maps back to the unpermuted model live in ``var_origin`` and
    ``row_origin``.  ``identity=True`` returns ``p`` unchanged.
    """
    if identity:
        return p
    rng = SplitMix64(seed)
    row_perm = _fisher_yates(p.num_rows, rng)
    col_perm = _fisher_yates(p.num_vars, rng)
    return _apply_permutation(p, row_perm, col_perm)


def _apply_permutation(p: MipProblem, row_perm, col_perm) -> MipProblem:
    new_of_old = {old: new for new, old in enumerate(col_perm)}
    rows = []
    for old_i in row_perm:
        rows.append(tuple(sorted((new_of_old[j], a) for j, a in p.rows[old_i])))
    return replace(
        p,
        var_names=tuple(p.var_names[j] for j in col_perm),
        objective=tuple(p.objective[j] for j in col_perm),
        lower=tuple(p.lower[j] for j in col_perm),
        upper=tuple(p.upper[j] for j in col_perm),
        integers=frozenset(new_of_old[j] for j in p.integers),
        var_origin=tuple(p.var_origin[j] for j in col_perm),
        rows=tuple(rows),
        rhs=tuple(p.rhs[i] for i in row_perm),
        row_names=tuple(p.row_names[i] for i in row_perm),
        row_origin=tuple(p.row_origin[i] for i in row_perm),
    )


def unpermute_model(p: MipProblem) -> MipProblem:
    """Restore original variable and row order using the origin maps."""
    col_perm = sorted(range(p.num_vars), key=lambda k: p.var_origin[k])
    row_perm = sorted(range(p.num_rows), key=lambda k: p.row_origin[k])
    return _apply_permutation(p, row_perm, col_perm)


def unpermute_vector(p: MipProblem, values: Sequence) -> list:
    """Map a per-variable vector of ``p`` back to original variable order."""
    out = [None] * len(values)
    for k, v in enumerate(values):
        out[p.var_origin[k]] = v
    return out


def float_data(p: MipProblem):
    """Float copies of ``c``, ``b`` and the sparse columns (for the fp LP)."""
    cols = tuple(tuple((i, to_float(a)) for i, a in col) for col in p.columns)
    return (
        tuple(to_float(c) for c in p.objective),
        tuple(to_float(b) for b in p.rhs),
        cols,
    )
