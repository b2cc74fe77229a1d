"""Exact rational values, signed infinities and rational reconstruction.

Finite values are plain :class:`fractions.Fraction` objects, which are
always kept in lowest terms with a positive denominator.  Bounds may also
be one of the two infinity singletons :data:`INF` and :data:`NEG_INF`.
Arithmetic between an infinity and anything that would need an
indeterminate form (``inf - inf``, ``0 * inf``) raises
:class:`InfinityArithmeticError` instead of producing a value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

__all__ = [
    "Fraction",
    "Infinity",
    "InfinityArithmeticError",
    "INF",
    "NEG_INF",
    "ExtendedRational",
    "is_finite",
    "parse_rational",
    "format_rational",
    "reconstruct_rational",
    "to_float",
    "to_rational",
    "ext_min",
    "ext_max",
]


class InfinityArithmeticError(ArithmeticError):
    """Raised for indeterminate forms such as ``inf - inf`` or ``0 * inf``."""


class Infinity:
    """Signed infinity that orders against every Fraction and int."""

    __slots__ = ("sign",)

    def __new__(cls, sign: int):
        if sign > 0 and _POS is not None:
            return _POS
        if sign < 0 and _NEG is not None:
            return _NEG
        obj = super().__new__(cls)
        object.__setattr__(obj, "sign", 1 if sign > 0 else -1)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Infinity is immutable")

    def __reduce__(self):
        return (Infinity, (self.sign,))

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "+inf" if self.sign > 0 else "-inf"

    def __hash__(self):
        return hash(float(self))

    def __float__(self):
        return math.inf if self.sign > 0 else -math.inf

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __pos__(self):
        return self

    def __abs__(self):
        return INF

    # ordering
    def _cmp(self, other) -> int | None:
        if isinstance(other, Infinity):
            return (self.sign > other.sign) - (self.sign < other.sign)
        if isinstance(other, (int, Fraction)):
            return self.sign
        if isinstance(other, float):
            if math.isnan(other):
                return None
            if math.isinf(other):
                o = 1 if other > 0 else -1
                return (self.sign > o) - (self.sign < o)
            return self.sign
        return None

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    # arithmetic
    def __add__(self, other):
        if isinstance(other, Infinity):
            if other.sign != self.sign:
                raise InfinityArithmeticError("inf - inf is undefined")
            return self
        if isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (Infinity, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return -self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Infinity):
            return INF if self.sign == other.sign else NEG_INF
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise InfinityArithmeticError("0 * inf is undefined")
            return self if other > 0 else -self
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("inf / 0")
            return self if other > 0 else -self
        if isinstance(other, Infinity):
            raise InfinityArithmeticError("inf / inf is undefined")
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Fraction(0)
        return NotImplemented


_POS = None
_NEG = None
INF = Infinity(1)
_POS = INF
NEG_INF = Infinity(-1)
_NEG = NEG_INF

ExtendedRational = Union[Fraction, Infinity]


def is_finite(value) -> bool:
    return not isinstance(value, Infinity)


def ext_min(a, b):
    return a if a <= b else b


def ext_max(a, b):
    return a if a >= b else b


def to_rational(value) -> ExtendedRational:
    """Convert an int, float, str, Fraction or Infinity to an extended rational.

    Floats are converted exactly (every finite binary64 is a dyadic rational).
    """
    if isinstance(value, (Fraction, Infinity)):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise ValueError("NaN has no rational value")
        if math.isinf(value):
            return INF if value > 0 else NEG_INF
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


_INF_WORDS = {"inf", "+inf", "infinity", "+infinity"}


def parse_rational(text: str) -> ExtendedRational:
    """Parse a decimal, scientific or ``p/q`` literal exactly.

    ``"0.1"`` gives ``1/10`` and ``"1e-6"`` gives ``1/1000000``; the words
    ``inf``/``-inf`` (and ``infinity``) map to the infinity singletons.
    """
    s = text.strip()
    low = s.lower()
    if low in _INF_WORDS:
        return INF
    if low in ("-inf", "-infinity"):
        return NEG_INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational literal {text!r}") from exc


def format_rational(value: ExtendedRational) -> str:
    """Canonical text form: ``p/q``, plain ``p`` for integers, ``+inf``/``-inf``."""
    if isinstance(value, Infinity):
        return str(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_float(value: ExtendedRational) -> float:
    """Round to the nearest binary64 (ties to even); infinities map to +-inf."""
    if isinstance(value, Infinity):
        return float(value)
    # int / int true division in CPython is correctly rounded
    return value.numerator / value.denominator


def reconstruct_rational(x: float, max_denominator: int) -> Fraction:
    """Best continued-fraction convergent of ``x`` with denominator <= max_denominator.

    ``x`` is first converted exactly to a rational; its continued fraction
    expansion is then walked with the extended Euclidean recurrence until
    it terminates or the next convergent's denominator would exceed the
    limit.  Only convergents are returned, never semiconvergents, so the
    result can differ from :meth:`Fraction.limit_denominator`.
    """
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"cannot reconstruct non-finite value {x!r}")
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    exact = Fraction(x)
    num, den = exact.numerator, exact.denominator
    # convergents h/k, previous hp/kp
    hp, kp = 1, 0
    a, rem = divmod(num, den)
    h, k = a, 1
    num, den = den, rem
    while den:
        a, rem = divmod(num, den)
        hn = a * h + hp
        kn = a * k + kp
        if kn > max_denominator:
            break
        hp, kp, h, k = h, k, hn, kn
        num, den = den, rem
    # consecutive convergents approach x monotonically in distance, so the
    # last admissible one is the closest; no equidistant tie can occur
    return Fraction(h, k)
