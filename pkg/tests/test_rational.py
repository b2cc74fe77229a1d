from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bnb_auditor.rational import (
    INF,
    NEG_INF,
    InfinityArithmeticError,
    ext_max,
    ext_min,
    format_rational,
    parse_rational,
    reconstruct_rational,
    to_float,
    to_rational,
)

rationals = st.fractions(max_denominator=10**6).filter(lambda f: abs(f) < 10**9)


def brute_force_nearest(x: float, max_den: int) -> Fraction:
    """Closest p/q to x with q <= max_den, smaller q on ties."""
    exact = Fraction(x)
    best = None
    for q in range(1, max_den + 1):
        for p in (math.floor(exact * q), math.ceil(exact * q)):
            cand = Fraction(p, q)
            if best is None or abs(cand - exact) < abs(best - exact):
                best = cand
    return best


class TestReconstruct:
    def test_exact_binary_fraction(self):
        assert reconstruct_rational(0.5, 10) == Fraction(1, 2)

    def test_one_third(self):
        x = 1 / 3
        assert reconstruct_rational(x, 10) == brute_force_nearest(x, 10) == Fraction(1, 3)

    def test_two_sevenths(self):
        x = 2 / 7
        assert reconstruct_rational(x, 100) == brute_force_nearest(x, 100) == Fraction(2, 7)

    def test_integer_and_negative(self):
        assert reconstruct_rational(3.0, 1) == 3
        assert reconstruct_rational(-2 / 3, 10) == Fraction(-2, 3)

    def test_denominator_cap_respected(self):
        r = reconstruct_rational(math.pi, 100)
        assert r == Fraction(22, 7)
        assert reconstruct_rational(math.pi, 1000) == Fraction(355, 113)

    def test_convergent_not_semiconvergent(self):
        # convergents of 0.4 are 0, 1/2, 2/5; the semiconvergent 1/3 is closer but skipped
        assert reconstruct_rational(0.4, 4) == Fraction(1, 2)
        assert Fraction(0.4).limit_denominator(4) == Fraction(1, 3)

    def test_non_finite_rejected(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                reconstruct_rational(bad, 10)

    def test_bad_max_denominator(self):
        with pytest.raises(ValueError):
            reconstruct_rational(0.5, 0)

    def test_exhaustive_small_denominators(self):
        for q in range(1, 51):
            for p in range(-q, 2 * q + 1):
                f = Fraction(p, q)
                assert reconstruct_rational(to_float(f), 50) == f

    @given(st.fractions(min_value=-100, max_value=100, max_denominator=1000))
    def test_matches_brute_force_when_small(self, f):
        assert reconstruct_rational(to_float(f), 1000) == f


class TestToFloat:
    def test_examples(self):
        assert to_float(Fraction(1, 2)) == 0.5
        assert to_float(INF) == math.inf
        assert to_float(NEG_INF) == -math.inf

    def test_one_third_correctly_rounded(self):
        x = to_float(Fraction(1, 3))
        below, above = math.nextafter(x, 0.0), math.nextafter(x, 1.0)
        err = abs(Fraction(x) - Fraction(1, 3))
        assert err <= abs(Fraction(below) - Fraction(1, 3))
        assert err <= abs(Fraction(above) - Fraction(1, 3))

    @given(rationals)
    def test_round_to_nearest(self, f):
        x = to_float(f)
        err = abs(Fraction(x) - f)
        for nb in (math.nextafter(x, -math.inf), math.nextafter(x, math.inf)):
            assert err <= abs(Fraction(nb) - f)


class TestParsing:
    def test_decimal_is_exact(self):
        assert parse_rational("0.1") == Fraction(1, 10)
        assert parse_rational("1e-6") == Fraction(1, 10**6)
        assert parse_rational("-3/4") == Fraction(-3, 4)

    def test_infinity_words(self):
        assert parse_rational("inf") is INF
        assert parse_rational("+Infinity") is INF
        assert parse_rational("-inf") is NEG_INF

    def test_malformed(self):
        with pytest.raises(ValueError):
            parse_rational("1/0")
        with pytest.raises(ValueError):
            parse_rational("abc")

    @given(rationals)
    def test_format_parse_round_trip(self, f):
        assert parse_rational(format_rational(f)) == f

    def test_format_infinity(self):
        assert parse_rational(format_rational(INF)) is INF
        assert parse_rational(format_rational(NEG_INF)) is NEG_INF

    def test_to_rational(self):
        assert to_rational(0.1) == Fraction(0.1)
        assert to_rational(math.inf) is INF
        with pytest.raises(ValueError):
            to_rational(math.nan)
        with pytest.raises(TypeError):
            to_rational(True)


class TestInfinity:
    def test_ordering(self):
        assert NEG_INF < Fraction(-10**30) < INF
        assert INF > NEG_INF
        assert ext_min(INF, Fraction(3)) == 3
        assert ext_max(NEG_INF, Fraction(3)) == 3
        assert INF == INF and NEG_INF != INF

    def test_arithmetic(self):
        assert INF + Fraction(5) is INF
        assert Fraction(5) - INF is NEG_INF
        assert INF * Fraction(-2) is NEG_INF
        assert -INF is NEG_INF

    def test_indeterminate_forms_raise(self):
        with pytest.raises(InfinityArithmeticError):
            INF - INF
        with pytest.raises(InfinityArithmeticError):
            INF + NEG_INF
        with pytest.raises(InfinityArithmeticError):
            INF * Fraction(0)
        with pytest.raises(InfinityArithmeticError):
            Fraction(0) * NEG_INF


class TestCanonicalForm:
    @given(rationals, rationals)
    def test_operations_stay_canonical(self, a, b):
        results = [a + b, a - b, a * b]
        if b:
            results.append(a / b)
        for r in results:
            assert r.denominator > 0
            assert math.gcd(r.numerator, r.denominator) == 1

    @given(rationals, rationals)
    def test_ordering_matches_cross_multiplication(self, a, b):
        lhs = a.numerator * b.denominator
        rhs = b.numerator * a.denominator
        assert (a < b) == (lhs < rhs)
        assert (a == b) == (lhs == rhs)

    def test_ten_thousand_pairs(self):
        import random

        rng = random.Random(7)
        for _ in range(10_000):
            a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
            b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
            cross = a.numerator * b.denominator - b.numerator * a.denominator
            assert (a < b) == (cross < 0) and (a > b) == (cross > 0)
