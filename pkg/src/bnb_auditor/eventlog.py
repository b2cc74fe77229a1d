"""JSON-lines event log with bit-exact float encoding.

Line 1 is a header (model hash, tolerances, run settings, outcome); every
following line is one event.  Floats are written as ``[decimal, hexbits]``
pairs: the shortest round-trip decimal for readers, the IEEE-754 bit
pattern for replay.  Rational bounds are written as ``"p/q"``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import IO, Iterable

from .bnb import BnbEvent, BranchChange, EventKind, NodePath, Tolerances
from .rational import format_rational, parse_rational
from .simplex_fp import Basis

FORMAT = "bnb-auditor-events"
VERSION = 1


class EventLogError(ValueError):
    pass


def encode_float(v: float) -> list[str]:
    return [repr(v), struct.pack(">d", v).hex()]


def decode_float(data) -> float:
    if not isinstance(data, list) or len(data) != 2:
        raise EventLogError(f"bad float encoding {data!r}")
    v = struct.unpack(">d", bytes.fromhex(data[1]))[0]
    if repr(v) != data[0]:
        raise EventLogError(f"float decimal {data[0]} disagrees with bits {data[1]}")
    return v


def _vec(values):
    return None if values is None else [encode_float(v) for v in values]


def _unvec(data):
    return None if data is None else tuple(decode_float(v) for v in data)


@dataclass
class LogHeader:
    model_hash: str
    tolerances: Tolerances
    presolve: bool = True
    permute: int | None = None
    status: str = ""
    z_star: float = float("inf")
    unresolved: int = 0
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        t = self.tolerances
        return {
            "format": FORMAT,
            "version": VERSION,
            "model_hash": self.model_hash,
            "tolerances": {"feastol": encode_float(t.feastol),
                           "inttol": None if t.inttol is None else encode_float(t.inttol),
                           "zerotol": encode_float(t.zerotol),
                           "opttol": encode_float(t.opttol),
                           "iteration_limit": t.iteration_limit},
            "presolve": self.presolve,
            "permute": self.permute,
            "status": self.status,
            "z_star": encode_float(self.z_star),
            "unresolved": self.unresolved,
            "stats": self.stats,
        }

    @classmethod
    def from_json(cls, d: dict) -> LogHeader:
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise EventLogError("not a bnb-auditor event log (bad header)")
        t = d["tolerances"]
        tol = Tolerances(decode_float(t["feastol"]),
                         None if t["inttol"] is None else decode_float(t["inttol"]),
                         decode_float(t["zerotol"]), decode_float(t["opttol"]),
                         int(t["iteration_limit"]))
        return cls(d["model_hash"], tol, bool(d["presolve"]), d["permute"], d["status"],
                   decode_float(d["z_star"]), int(d["unresolved"]), d.get("stats", {}))


def path_to_json(path: NodePath) -> dict:
    return {"id": path.node_id, "parent": path.parent_id, "depth": path.depth,
            "changes": [{"var": c.var, "dir": "up" if c.up else "down",
                         "bound": format_rational(c.bound)} for c in path.changes]}


def path_from_json(d: dict) -> NodePath:
    changes = tuple(BranchChange(int(c["var"]), c["dir"] == "up", parse_rational(c["bound"]))
                    for c in d["changes"])
    return NodePath(int(d["id"]), d["parent"], int(d["depth"]), changes)


def event_to_json(e: BnbEvent) -> dict:
    return {
        "seq": e.seq,
        "kind": e.kind.value,
        "node": None if e.path is None else path_to_json(e.path),
        "primal_bound": encode_float(e.primal_bound),
        "lp_status": e.lp_status,
        "objective": None if e.objective is None else encode_float(e.objective),
        "x": _vec(e.x),
        "y": _vec(e.y),
        "r_plus": _vec(e.r_plus),
        "r_minus": _vec(e.r_minus),
        "basis": None if e.basis is None else e.basis.to_json(),
        "farkas": _vec(e.farkas),
    }


def event_from_json(d: dict) -> BnbEvent:
    try:
        return BnbEvent(
            seq=int(d["seq"]),
            kind=EventKind(d["kind"]),
            path=None if d["node"] is None else path_from_json(d["node"]),
            primal_bound=decode_float(d["primal_bound"]),
            lp_status=d["lp_status"],
            objective=None if d["objective"] is None else decode_float(d["objective"]),
            x=_unvec(d["x"]),
            y=_unvec(d["y"]),
            r_plus=_unvec(d["r_plus"]),
            r_minus=_unvec(d["r_minus"]),
            basis=None if d["basis"] is None else Basis.from_json(d["basis"]),
            farkas=_unvec(d["farkas"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise EventLogError(f"malformed event record: {exc}") from exc


def _line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def dumps_events(header: LogHeader, events: Iterable[BnbEvent]) -> str:
    return _line(header.to_json()) + "".join(_line(event_to_json(e)) for e in events)


def write_events(stream: IO[str], header: LogHeader, events: Iterable[BnbEvent]) -> None:
    stream.write(dumps_events(header, events))


def loads_events(text: str) -> tuple[LogHeader, list[BnbEvent]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EventLogError("empty event log")
    try:
        header = LogHeader.from_json(json.loads(lines[0]))
        events = [event_from_json(json.loads(ln)) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise EventLogError(f"corrupt event log: {exc}") from exc
    seqs = [e.seq for e in events]
    if any(b <= a for a, b in zip(seqs, seqs[1:])):
        raise EventLogError("event sequence numbers are not strictly increasing")
    return header, events


def read_events(path) -> tuple[LogHeader, list[BnbEvent]]:
    with open(path, encoding="utf-8") as fh:
        return loads_events(fh.read())
