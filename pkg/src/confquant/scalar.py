"""Gaussian rationals: exact numbers ``re + im*i`` with ``re, im`` in Q."""

from __future__ import annotations

import re as _re
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, "ExactScalar"]

_RATIONAL = _re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` (or ``"p"``) into a Fraction; reject floats and junk."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"expected a rational string, got {type(text).__name__}")
    m = _RATIONAL.match(text.replace("−", "-"))
    if m is None:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class ExactScalar:
    """Immutable Gaussian rational.

    Arithmetic accepts ints and Fractions on either side.  Values with
    ``im == 0`` compare equal to the corresponding Fraction.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Number = 0, im: int | Fraction = 0):
        if isinstance(re, ExactScalar):
            object.__setattr__(self, "re", re.re)
            object.__setattr__(self, "im", re.im + Fraction(im))
            return
        if isinstance(re, bool) or not isinstance(re, (int, Rational)):
            raise TypeError(f"ExactScalar needs rational parts, got {type(re).__name__}")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    # construction helpers -------------------------------------------------
    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(value)

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Parse ``"a/b"``, ``"c/d*I"`` or ``"(a/b + c/d*I)"``."""
        s = text.strip().replace(" ", "").replace("−", "-")
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        if s in ("I", "+I", "-I"):
            return cls(0, -1 if s.startswith("-") else 1)
        if not s.endswith("*I"):
            return cls(parse_rational(s))
        body = s[:-2]
        # split off the imaginary part at the last sign that is not leading
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                return cls(parse_rational(body[:k]), parse_rational(body[k:]))
        return cls(0, parse_rational(body))

    # predicates -------------------------------------------------------------
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            if not other.im:
                return ExactScalar(self.re * other.re, self.im * other.re)
            if not self.im:
                return ExactScalar(self.re * other.re, self.re * other.im)
            return ExactScalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return ExactScalar(self.re / other, self.im / other)
        if isinstance(other, ExactScalar):
            norm = other.re * other.re + other.im * other.im
            if norm == 0:
                raise ZeroDivisionError("division by zero")
            return self * ExactScalar(other.re / norm, -other.im / norm)
        return NotImplemented

    def __rtruediv__(self, other):
        return ExactScalar(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = ExactScalar(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def magnitude_bound(self) -> Fraction:
        """max(|re|, |im|): an exact size measure used in residual reports."""
        return max(abs(self.re), abs(self.im))

    # comparison / hashing -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, ExactScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            return f"{format_rational(self.im)}*I"
        sign = "+" if self.im > 0 else "-"
        return f"({format_rational(self.re)} {sign} {format_rational(abs(self.im))}*I)"

    def __repr__(self):
        return f"ExactScalar({self})"

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, obj) -> "ExactScalar":
        if isinstance(obj, str):
            return cls.parse(obj)
        return cls(parse_rational(obj["re"]), parse_rational(obj.get("im", "0")))


I = ExactScalar(0, 1)
ZERO = ExactScalar(0)
ONE = ExactScalar(1)
