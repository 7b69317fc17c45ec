"""Exact linear algebra over Q and over Q[t] (univariate polynomials).

Gaussian elimination reports the full solution set: a unique solution, no
solution, or an affine family (particular solution plus nullspace basis).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence


class SingularMatrixError(ArithmeticError):
    pass


@dataclass
class SolutionSet:
    kind: str  # "unique" | "none" | "family"
    particular: list | None = None
    nullspace: list = field(default_factory=list)
    rank: int = 0

    @property
    def dimension(self) -> int:
        return len(self.nullspace) if self.kind != "none" else -1


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    M = [[Fraction(v) for v in r] for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def solve(A: Sequence[Sequence], b: Sequence) -> SolutionSet:
    """Solve A x = b exactly."""
    nvars = len(A[0]) if A else 0
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    M, pivots = rref(aug)
    if nvars in pivots:
        return SolutionSet("none", rank=len(pivots) - 1)
    x = [Fraction(0)] * nvars
    for r, c in enumerate(pivots):
        x[c] = M[r][nvars]
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nvars
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -M[r][f]
        basis.append(v)
    return SolutionSet("unique" if not free else "family", x, basis, len(pivots))


def determinant(A: Sequence[Sequence]) -> Fraction:
    M = [[Fraction(v) for v in r] for r in A]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(A[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    M, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in M]


# univariate polynomials ------------------------------------------------------


class UPoly:
    """Polynomial in one variable with Fraction coefficients (low degree first)."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = ()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def var(cls) -> "UPoly":
        return cls((0, 1))

    @classmethod
    def lift(cls, v) -> "UPoly":
        return v if isinstance(v, UPoly) else cls((v,))

    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __add__(self, o):
        o = UPoly.lift(o)
        m = max(len(self.c), len(o.c))
        return UPoly([(self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(m)])

    __radd__ = __add__

    def __neg__(self):
        return UPoly([-v for v in self.c])

    def __sub__(self, o):
        return self + (-UPoly.lift(o))

    def __rsub__(self, o):
        return UPoly.lift(o) - self

    def __mul__(self, o):
        o = UPoly.lift(o)
        if not self.c or not o.c:
            return UPoly()
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            for j, b in enumerate(o.c):
                out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __call__(self, t) -> Fraction:
        acc = Fraction(0)
        for v in reversed(self.c):
            acc = acc * t + v
        return acc

    def __eq__(self, o):
        return isinstance(o, UPoly) and self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"UPoly({[str(v) for v in self.c]})"

    def rational_roots(self) -> list[Fraction]:
        """All distinct rational roots (rational root theorem)."""
        if self.is_zero():
            raise ValueError("the zero polynomial has every number as a root")
        c = list(self.c)
        roots = set()
        if c[0] == 0:
            roots.add(Fraction(0))
            while c and c[0] == 0:
                c.pop(0)
        den = 1
        for v in c:
            den = den * v.denominator // gcd(den, v.denominator)
        ints = [int(v * den) for v in c]
        a0, an = abs(ints[0]), abs(ints[-1])
        if len(ints) > 1:
            p = UPoly(ints)
            for num in _divisors(a0):
                for d in _divisors(an):
                    for s in (1, -1):
                        r = Fraction(s * num, d)
                        if p(r) == 0:
                            roots.add(r)
        return sorted(roots)


def _divisors(k: int) -> list[int]:
    out = []
    i = 1
    while i * i <= k:
        if k % i == 0:
            out.append(i)
            out.append(k // i)
        i += 1
    return sorted(set(out))


def special_parameter_values(A: Sequence[Sequence[UPoly]], b: Sequence[UPoly]) -> tuple[bool, list[Fraction]]:
    """Analyse A(t) x = b(t) for a system with polynomial entries.

    Returns ``(generic_ok, candidates)``: whether the system is consistent for
    generic t, and every rational t where the elimination pattern could change
    (roots of pivots and of the leftover consistency polynomials).  A value
    outside ``candidates`` behaves like the generic case.
    """
    M = [[UPoly.lift(v) for v in row] + [UPoly.lift(rhs)] for row, rhs in zip(A, b)]
    nvars = len(M[0]) - 1
    candidates: set[Fraction] = set()
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(M)) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        candidates.update(p.rational_roots())
        for i in range(r + 1, len(M)):
            f = M[i][c]
            if not f.is_zero():
                M[i] = [p * x - f * y for x, y in zip(M[i], M[r])]
        r += 1
    leftovers = [row[nvars] for row in M[r:] if not row[nvars].is_zero()]
    for poly in leftovers:
        candidates.update(poly.rational_roots())
    return not leftovers, sorted(candidates)
