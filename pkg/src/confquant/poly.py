"""Exact polynomials in base variables x^1..x^n and momenta xi_1..xi_n.

A monomial is stored as a tuple of 2n exponents: the x-block first, then the
xi-block.  Coefficients are :class:`ExactScalar` and zero terms are never
stored, so two polynomials are equal iff their term maps are equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalar import ExactScalar, I, format_rational, parse_rational


class DimensionError(ValueError):
    pass


def _as_scalar(c) -> ExactScalar:
    return c if isinstance(c, ExactScalar) else ExactScalar.coerce(c)


class Poly:
    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[tuple, object] | None = None):
        if n < 1:
            raise DimensionError("dimension must be >= 1")
        self.n = n
        clean = {}
        if terms:
            width = 2 * n
            for key, c in terms.items():
                key = tuple(key)
                if len(key) != width or any(e < 0 for e in key):
                    raise ValueError(f"bad exponent tuple {key} for n={n}")
                c = _as_scalar(c)
                if c:
                    clean[key] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Poly":
        # trusted constructor: keys valid, coefficients nonzero ExactScalars
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    # constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n)

    @classmethod
    def const(cls, n: int, c=1) -> "Poly":
        return cls(n, {(0,) * (2 * n): c})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls.const(n, 1)

    @classmethod
    def monomial(cls, n: int, xexp: Sequence[int] = (), xiexp: Sequence[int] = (), c=1) -> "Poly":
        xexp = tuple(xexp) or (0,) * n
        xiexp = tuple(xiexp) or (0,) * n
        if len(xexp) != n or len(xiexp) != n:
            raise DimensionError("exponent blocks must have length n")
        return cls(n, {xexp + xiexp: c})

    @classmethod
    def x(cls, n: int, i: int) -> "Poly":
        """The coordinate x^i (1-based)."""
        return cls._unit(n, _check_index(n, i) - 1)

    @classmethod
    def xi(cls, n: int, i: int) -> "Poly":
        """The momentum xi_i (1-based)."""
        return cls._unit(n, n + _check_index(n, i) - 1)

    @classmethod
    def _unit(cls, n, var):
        e = [0] * (2 * n)
        e[var] = 1
        return cls._raw(n, {tuple(e): ExactScalar(1)})

    # structure ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def xi_degree(self) -> int:
        """Highest total xi-degree (-1 for the zero polynomial)."""
        n = self.n
        return max((sum(k[n:]) for k in self.terms), default=-1)

    def x_degree(self) -> int:
        n = self.n
        return max((sum(k[:n]) for k in self.terms), default=-1)

    def has_xi(self) -> bool:
        n = self.n
        return any(any(k[n:]) for k in self.terms)

    def homogeneous(self, k: int) -> "Poly":
        """The part of xi-degree exactly k."""
        n = self.n
        return Poly._raw(n, {m: c for m, c in self.terms.items() if sum(m[n:]) == k})

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def coefficient(self, xexp: Sequence[int], xiexp: Sequence[int]) -> ExactScalar:
        return self.terms.get(tuple(xexp) + tuple(xiexp), ExactScalar(0))

    def xi_coefficient(self, xiexp: Sequence[int]) -> "Poly":
        """The x-polynomial multiplying the xi-monomial ``xiexp``."""
        n = self.n
        xiexp = tuple(xiexp)
        zeros = (0,) * n
        return Poly._raw(n, {m[:n] + zeros: c for m, c in self.terms.items() if m[n:] == xiexp})

    # arithmetic --------------------------------------------------------------
    def _check(self, other: "Poly"):
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        if not isinstance(c, (int, Fraction)):
            c = _as_scalar(c)
        if not c:
            return Poly._raw(self.n, {})
        return Poly._raw(self.n, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction, ExactScalar)):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly._raw(self.n, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = Poly.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "Poly":
        return Poly._raw(self.n, {m: c.conjugate() for m, c in self.terms.items()})

    # calculus ------------------------------------------------------------------
    def diff_var(self, var: int, times: int = 1) -> "Poly":
        """Partial derivative w.r.t. variable slot ``var`` (0..2n-1)."""
        if not 0 <= var < 2 * self.n:
            raise ValueError(f"unknown variable slot {var}")
        out = {}
        for m, c in self.terms.items():
            e = m[var]
            if e < times:
                continue
            f = 1
            for j in range(times):
                f *= e - j
            mm = list(m)
            mm[var] = e - times
            out[tuple(mm)] = c * f
        return Poly._raw(self.n, out)

    def dx(self, i: int) -> "Poly":
        """d/dx^i, 1-based."""
        return self.diff_var(_check_index(self.n, i) - 1)

    def dxi(self, i: int) -> "Poly":
        """d/dxi_i, 1-based."""
        return self.diff_var(self.n + _check_index(self.n, i) - 1)

    def partial(self, var: str) -> "Poly":
        """Partial derivative by variable name: ``"x1"`` ... or ``"xi1"`` ..."""
        return self.diff_var(variable_slot(self.n, var))

    def euler(self) -> "Poly":
        """xi_i d/dxi_i: multiplies each term by its xi-degree."""
        n = self.n
        return Poly._raw(n, {m: c * sum(m[n:]) for m, c in self.terms.items() if any(m[n:])})

    def map_xi_degree(self, fn) -> "Poly":
        """Multiply each term by ``fn(k)`` where k is its xi-degree."""
        n = self.n
        out = {}
        for m, c in self.terms.items():
            f = fn(sum(m[n:]))
            if f:
                out[m] = c * f
        return Poly._raw(n, out)

    # evaluation ----------------------------------------------------------------
    def evaluate(self, x: Sequence = (), xi: Sequence = ()) -> ExactScalar:
        n = self.n
        vals = [_as_scalar(v) for v in x] or [ExactScalar(0)] * n
        vals += [_as_scalar(v) for v in xi] or [ExactScalar(0)] * n
        if len(vals) != 2 * n:
            raise DimensionError("evaluation point has wrong length")
        total = ExactScalar(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t = t * v**e
            total = total + t
        return total

    def evaluate_x(self, point: Sequence) -> "Poly":
        """Substitute x = point, keeping the xi-dependence."""
        n = self.n
        if len(point) != n:
            raise DimensionError("point has wrong length")
        vals = [_as_scalar(v) for v in point]
        zeros = (0,) * n
        out: dict = {}
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m[:n]):
                if e:
                    t = t * v**e
            key = zeros + m[n:]
            out[key] = out.get(key, ExactScalar(0)) + t
        return Poly(n, out)

    # equality / ordering --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self == Poly.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    # printing / parsing ---------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = _format_monomial(self.n, m)
            if c.is_real():
                sign = "-" if c.re < 0 else "+"
                mag = format_rational(abs(c.re))
                body = mono if (mag == "1" and mono) else (f"{mag}*{mono}" if mono else mag)
            elif not c.re:
                sign = "-" if c.im < 0 else "+"
                mag = f"{format_rational(abs(c.im))}*I"
                body = f"{mag}*{mono}" if mono else mag
            else:
                sign = "+"
                body = f"{c}*{mono}" if mono else str(c)
            parts.append((sign, body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly(n={self.n}, {self})"

    @classmethod
    def parse(cls, text: str, n: int) -> "Poly":
        """Inverse of ``str``: ``parse(str(p), p.n) == p``."""
        s = text.replace(" ", "").replace("−", "-")
        if not s:
            raise ValueError("empty polynomial")
        total = Poly.zero(n)
        for sign, body in _split_terms(s):
            term = Poly.const(n, -1 if sign == "-" else 1)
            for factor in _split_top(body, "*"):
                term = term * _parse_factor(factor, n)
            total = total + term
        return total

    def to_json(self) -> dict:
        n = self.n
        return {
            "n": n,
            "terms": [
                {
                    "x": list(m[:n]),
                    "xi": list(m[n:]),
                    "re": format_rational(c.re),
                    "im": format_rational(c.im),
                }
                for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        n = int(obj["n"])
        terms: dict = {}
        for t in obj.get("terms", []):
            key = tuple(int(e) for e in t["x"]) + tuple(int(e) for e in t["xi"])
            c = ExactScalar(parse_rational(t.get("re", "0")), parse_rational(t.get("im", "0")))
            terms[key] = terms.get(key, ExactScalar(0)) + c
        return cls(n, terms)


def variable_slot(n: int, var: str | tuple) -> int:
    """Map ``"x3"``/``"xi2"`` (or ``("x", 3)``) to an exponent slot."""
    if isinstance(var, tuple):
        family, idx = var
    else:
        m = re.fullmatch(r"(xi|x)(\d+)", str(var))
        if m is None:
            raise ValueError(f"unknown variable {var!r}")
        family, idx = m.group(1), int(m.group(2))
    if family not in ("x", "xi") or not 1 <= int(idx) <= n:
        raise ValueError(f"unknown variable {var!r} for n={n}")
    return (int(idx) - 1) + (n if family == "xi" else 0)


def _check_index(n: int, i: int) -> int:
    if not 1 <= i <= n:
        raise ValueError(f"index {i} outside 1..{n}")
    return i


def _format_monomial(n: int, m: tuple) -> str:
    out = []
    for k, e in enumerate(m):
        if not e:
            continue
        name = f"x{k + 1}" if k < n else f"xi{k - n + 1}"
        out.append(name if e == 1 else f"{name}^{e}")
    return "*".join(out)


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _split_terms(s: str) -> list[tuple[str, str]]:
    terms, depth, cur, sign = [], 0, "", "+"
    for k, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and (k == 0 or s[k - 1] not in "^*/"):
            if cur:
                terms.append((sign, cur))
            sign, cur = ch, ""
        else:
            cur += ch
    if not cur:
        raise ValueError(f"dangling sign in {s!r}")
    terms.append((sign, cur))
    return terms


_VAR = re.compile(r"(xi|x)(\d+)(?:\^(\d+))?")


def _parse_factor(f: str, n: int) -> Poly:
    if f.startswith("("):
        return Poly.const(n, ExactScalar.parse(f))
    if f == "I":
        return Poly.const(n, I)
    m = _VAR.fullmatch(f)
    if m:
        slot = variable_slot(n, (m.group(1), int(m.group(2))))
        e = [0] * (2 * n)
        e[slot] = int(m.group(3) or 1)
        return Poly.monomial(n, e[:n], e[n:])
    return Poly.const(n, parse_rational(f))


@dataclass(frozen=True)
class FlatMetric:
    """diag(+1 x p, -1 x q) on R^n, n = p + q."""

    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise DimensionError("need p, q >= 0 and p + q >= 1")

    @property
    def n(self) -> int:
        return self.p + self.q

    def sign(self, i: int) -> int:
        """g_ii = g^ii for the 0-based index i."""
        return 1 if i < self.p else -1

    def matrix(self) -> list[list[int]]:
        n = self.n
        return [[self.sign(i) if i == j else 0 for j in range(n)] for i in range(n)]

    def lower_x(self, i: int) -> Poly:
        """x_i = g_ij x^j (1-based)."""
        return Poly.x(self.n, i).scale(self.sign(i - 1))

    def raise_xi(self, i: int) -> Poly:
        """xi^i = g^ij xi_j (1-based)."""
        return Poly.xi(self.n, i).scale(self.sign(i - 1))

    def xi_square(self) -> Poly:
        n = self.n
        return metric_contract(self, [Poly.xi(n, i) for i in range(1, n + 1)],
                               [Poly.xi(n, i) for i in range(1, n + 1)])

    def x_square(self) -> Poly:
        n = self.n
        return metric_contract(self, [Poly.x(n, i) for i in range(1, n + 1)],
                               [Poly.x(n, i) for i in range(1, n + 1)])


def metric_contract(m: FlatMetric, a: Sequence[Poly], b: Sequence[Poly]) -> Poly:
    """sum_i g^ii a_i b_i -- e.g. xi^i xi_i or x_i x^i."""
    if len(a) != m.n or len(b) != m.n:
        raise DimensionError("contraction needs n components on each side")
    total = Poly.zero(m.n)
    for i, (u, v) in enumerate(zip(a, b)):
        if u.n != m.n or v.n != m.n:
            raise DimensionError("polynomial dimension differs from metric")
        total = total + (u * v).scale(m.sign(i))
    return total


def xi_monomials(n: int, degree: int) -> Iterable[tuple]:
    """All xi-exponent tuples of total degree exactly ``degree``."""
    return exponent_tuples(n, degree)


def exponent_tuples(n: int, degree: int):
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in exponent_tuples(n - 1, degree - first):
            yield (first,) + rest
