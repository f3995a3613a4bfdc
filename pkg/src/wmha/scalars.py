"""Exact scalars: Gaussian rationals (rational real and imaginary parts).

All arithmetic in the engine runs over this field.  No floats, no
tolerances: every comparison downstream is literal equality.
"""

from __future__ import annotations

try:  # gmpy2 rationals are ~10x faster; fall back to the stdlib
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as _Q

_Q0 = _Q(0)
_Q1 = _Q(1)


def _parse_rational(text: str):
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return _Q(text)


class Scalar:
    """An element of Q(i), held as a pair of exact rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=_Q0, im=_Q0):
        self.re = _Q(re) if not isinstance(re, type(_Q0)) else re
        self.im = _Q(im) if not isinstance(im, type(_Q0)) else im

    @staticmethod
    def from_int(n: int) -> "Scalar":
        return Scalar(_Q(n), _Q0)

    @staticmethod
    def parse(value) -> "Scalar":
        """Accept "p/q" / "p" strings, ints, or {"re": ..., "im": ...}."""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, dict):
            return Scalar(_parse_rational(str(value.get("re", "0"))),
                          _parse_rational(str(value.get("im", "0"))))
        if isinstance(value, int):
            return Scalar(_Q(value), _Q0)
        if isinstance(value, str):
            return Scalar(_parse_rational(value), _Q0)
        raise ValueError(f"cannot parse scalar from {value!r}")

    def to_json(self):
        return {"re": str(self.re), "im": str(self.im)}

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __mul__(self, other):
        if not self.im and not other.im:
            return Scalar(self.re * other.re, _Q0)
        return Scalar(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    def __truediv__(self, other):
        if not other:
            raise ZeroDivisionError("division by zero Scalar")
        if not other.im:
            return Scalar(self.re / other.re, self.im / other.re)
        n = other.re * other.re + other.im * other.im
        return Scalar((self.re * other.re + self.im * other.im) / n,
                      (self.im * other.re - self.re * other.im) / n)

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}i)"


ZERO = Scalar(_Q0, _Q0)
ONE = Scalar(_Q1, _Q0)
I = Scalar(_Q0, _Q1)


def rational(p, q=1) -> Scalar:
    return Scalar(_Q(p, q) if q != 1 else _Q(p), _Q0)
