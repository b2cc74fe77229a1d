from __future__ import annotations

import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bnb_auditor.bnb import Tolerances, solve_bnb
from bnb_auditor.eventlog import (
    EventLogError,
    LogHeader,
    decode_float,
    dumps_events,
    encode_float,
    loads_events,
)
from bnb_auditor.model import presolve
from bnb_auditor.rational import INF
from bnb_auditor.report import report_from_json, report_to_json, write_report
from bnb_auditor.verify import VerificationReport, verify_events
from oracles import random_bounded_mip


@given(st.floats(allow_nan=False))
def test_float_encoding_is_bit_exact(v):
    back = decode_float(encode_float(v))
    assert back == v and math.copysign(1, back) == math.copysign(1, v)


def test_float_encoding_mismatch_rejected():
    with pytest.raises(EventLogError):
        decode_float(["0.5", encode_float(0.25)[1]])


def _run(seed):
    p = presolve(random_bounded_mip(random.Random(seed)))
    out = solve_bnb(p)
    header = LogHeader(p.content_hash, Tolerances(), status=out.status, z_star=out.objective)
    return p, out, header


class TestLog:
    def test_round_trip(self):
        for seed in range(20):
            p, out, header = _run(seed)
            text = dumps_events(header, out.events)
            h2, ev2 = loads_events(text)
            assert ev2 == out.events
            assert h2 == header
            assert dumps_events(h2, ev2) == text

    def test_bad_header(self):
        with pytest.raises(EventLogError):
            loads_events('{"format": "other"}\n')

    def test_empty(self):
        with pytest.raises(EventLogError):
            loads_events("")

    def test_truncated_line(self):
        _, out, header = _run(3)
        text = dumps_events(header, out.events)
        with pytest.raises(EventLogError):
            loads_events(text[: len(text) // 2 + 7])

    def test_sequence_must_increase(self):
        _, out, header = _run(3)
        lines = dumps_events(header, out.events).splitlines()
        assert len(lines) > 2
        swapped = [lines[0], lines[2], lines[1]] + lines[3:]
        with pytest.raises(EventLogError):
            loads_events("\n".join(swapped))

    def test_missing_field(self):
        _, out, header = _run(3)
        lines = dumps_events(header, out.events).splitlines()
        rec = json.loads(lines[1])
        del rec["primal_bound"]
        with pytest.raises(EventLogError):
            loads_events("\n".join([lines[0], json.dumps(rec)]))


class TestReport:
    def test_json_round_trip(self):
        for seed in range(10):
            p, out, _ = _run(seed)
            rep = verify_events(p, out.events)
            back = report_from_json(json.loads(write_report(rep, "json")))
            assert back.verdicts == rep.verdicts
            assert back.z_hat == rep.z_hat and back.z_star == rep.z_star
            assert report_to_json(back) == report_to_json(rep)

    def test_empty_report(self):
        rep = VerificationReport([], z_hat=INF, z_star=math.inf)
        assert rep.leaves == 0 and rep.errors == 0
        text = write_report(rep, "text")
        assert "interval: no incumbent" in text
        assert json.loads(write_report(rep, "json"))["leaves"] == 0

    def test_text_lists_errors(self, fixture_path):
        from bnb_auditor.model import read_mps

        p = presolve(read_mps(fixture_path("strong_gap.mps")))
        rep = verify_events(p, solve_bnb(p).events)
        text = write_report(rep, "text")
        assert "StrongGapError via ExactLP" in text
        assert "Gap S" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            write_report(VerificationReport([], INF, math.inf), "xml")
