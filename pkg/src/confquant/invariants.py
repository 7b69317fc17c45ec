"""Euclidean-invariant operators on symbols and the conformal Lie-derivative actions.

Everything here acts on :class:`Poly`.  Differential operators are encoded
as normal-ordered polynomials: the xi-monomial xi^a stands for d^a/dx^a with
coefficients written to the left.  Operator composition is then the
standard formula  a o b = sum_alpha (1/alpha!) d_xi^alpha a * d_x^alpha b.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Sequence

from .poly import DimensionError, FlatMetric, Poly, exponent_tuples
from .scalar import ExactScalar


class InvariantViolation(RuntimeError):
    """An identity that must hold by construction failed: a bug, not bad input."""


# linear actions -------------------------------------------------------------


class Action:
    """A linear map Poly -> Poly that composes with ``@`` (right to left)."""

    def __init__(self, fn: Callable[[Poly], Poly], name: str = "?"):
        self.fn = fn
        self.name = name

    def __call__(self, p: Poly) -> Poly:
        return self.fn(p)

    def __matmul__(self, other: "Action") -> "Action":
        return Action(lambda p: self.fn(other.fn(p)), f"{self.name}{other.name}")

    def __add__(self, other: "Action") -> "Action":
        return Action(lambda p: self.fn(p) + other.fn(p), f"({self.name}+{other.name})")

    def __sub__(self, other: "Action") -> "Action":
        return Action(lambda p: self.fn(p) - other.fn(p), f"({self.name}-{other.name})")

    def __neg__(self) -> "Action":
        return Action(lambda p: -self.fn(p), f"-{self.name}")

    def __rmul__(self, c) -> "Action":
        return Action(lambda p: self.fn(p).scale(c), f"{c}{self.name}")

    def __repr__(self):
        return f"Action({self.name})"


def identity() -> Action:
    return Action(lambda p: p, "Id")


def scalar(c) -> Action:
    return Action(lambda p: p.scale(c), str(c))


def bracket(a: Action, b: Action) -> Action:
    return Action(lambda p: a(b(p)) - b(a(p)), f"[{a.name},{b.name}]")


INVARIANT_TAGS = ("R", "E", "Euler", "T", "G", "D", "L", "R0", "G0", "L0", "Casimir", "Z")


def _check_dim(m: FlatMetric, p: Poly):
    if p.n != m.n:
        raise DimensionError(f"polynomial has n={p.n}, metric has n={m.n}")


def _R(m):
    r = m.xi_square()
    return lambda p: p * r


def _E(m):
    half = Fraction(m.n, 2)
    return lambda p: p.euler() + p.scale(half)


def _T(m):
    n = m.n
    def f(p):
        out = Poly.zero(n)
        for i in range(n):
            out = out + p.diff_var(n + i, 2).scale(m.sign(i))
        return out
    return f


def _G(m):
    n = m.n
    xis = [Poly.xi(n, i + 1).scale(m.sign(i)) for i in range(n)]
    def f(p):
        out = Poly.zero(n)
        for i in range(n):
            d = p.diff_var(i)
            if not d.is_zero():
                out = out + d * xis[i]
        return out
    return f


def _D(m):
    n = m.n
    def f(p):
        out = Poly.zero(n)
        for i in range(n):
            out = out + p.diff_var(i).diff_var(n + i)
        return out
    return f


def _L(m):
    n = m.n
    def f(p):
        out = Poly.zero(n)
        for i in range(n):
            out = out + p.diff_var(i, 2).scale(m.sign(i))
        return out
    return f


def invariant_action(tag: str, m: FlatMetric) -> Action:
    """The action of one of the invariant operators for the flat metric ``m``."""
    base = {"R": _R, "E": _E, "T": _T, "G": _G, "D": _D, "L": _L}
    if tag in base:
        return Action(base[tag](m), tag)
    if tag == "Euler":
        return Action(lambda p: p.euler(), "Eu")
    if tag in ("R0", "G0", "L0"):
        return invariant_action(tag[0], m) @ invariant_action("T", m)
    if tag == "Casimir":
        R, E, T = (invariant_action(t, m) for t in "RET")
        return (E @ E) - Fraction(1, 2) * ((R @ T) + (T @ R))
    if tag == "Z":
        return _Z(m)
    raise ValueError(f"unknown invariant operator {tag!r}")


def _Z(m: FlatMetric) -> Action:
    C = invariant_action("Casimir", m)
    G, D, L = (invariant_action(t, m) for t in "GDL")
    GC, DC = bracket(G, C), bracket(D, C)
    first = (C + scalar(Fraction(3, 2))) @ L
    second = (D @ GC) + (GC @ D) - (G @ DC) - (DC @ G)
    return first + Fraction(1, 4) * second


def apply_invariant(op: str | Action, m: FlatMetric, p: Poly) -> Poly:
    _check_dim(m, p)
    action = op if isinstance(op, Action) else invariant_action(op, m)
    return action(p)


def ideal_generator_Z(m: FlatMetric, p: Poly) -> Poly:
    return apply_invariant("Z", m, p)


# vector fields ----------------------------------------------------------------


class VectorField:
    """Polynomial vector field X = X^i d/dx^i on R^n (components are x-only)."""

    def __init__(self, components: Sequence[Poly], name: str = "field"):
        comps = list(components)
        if not comps:
            raise DimensionError("empty vector field")
        n = comps[0].n
        if len(comps) != n or any(c.n != n for c in comps):
            raise DimensionError("vector field needs n components of dimension n")
        if any(c.has_xi() for c in comps):
            raise ValueError("vector field components must not involve xi")
        self.n = n
        self.components = comps
        self.name = name

    def divergence(self) -> Poly:
        out = Poly.zero(self.n)
        for i, c in enumerate(self.components):
            out = out + c.diff_var(i)
        return out

    def derivative(self, f: Poly) -> Poly:
        """X(f) = X^i d_i f."""
        out = Poly.zero(self.n)
        for i, c in enumerate(self.components):
            d = f.diff_var(i)
            if not d.is_zero() and not c.is_zero():
                out = out + c * d
        return out

    def as_operator(self, weight) -> Poly:
        """The first-order operator X^i d_i + weight * Div X, normal ordered."""
        n = self.n
        out = self.divergence().scale(weight)
        for i, c in enumerate(self.components):
            out = out + c * Poly.xi(n, i + 1)
        return out

    def __repr__(self):
        return f"VectorField({self.name})"


class VectorFieldGenerator(VectorField):
    """One of the generators of the conformal algebra, by stable string id.

    ids: ``translation:i``, ``rotation:i:j``, ``dilation``, ``inversion:i``.
    """

    def __init__(self, kind: str, indices: tuple = (), metric: FlatMetric | None = None):
        if metric is None:
            raise ValueError("a flat metric is required")
        n = metric.n
        for k in indices:
            if not 1 <= k <= n:
                raise ValueError(f"index {k} outside 1..{n}")
        x = [Poly.x(n, i) for i in range(1, n + 1)]
        low = [metric.lower_x(i) for i in range(1, n + 1)]
        zero = Poly.zero(n)
        comps = [zero] * n
        if kind == "translation" and len(indices) == 1:
            comps[indices[0] - 1] = Poly.one(n)
        elif kind == "rotation" and len(indices) == 2:
            i, j = indices
            if i == j:
                raise ValueError("rotation needs two distinct indices")
            comps[j - 1] = comps[j - 1] + low[i - 1]
            comps[i - 1] = comps[i - 1] - low[j - 1]
        elif kind == "dilation" and not indices:
            comps = list(x)
        elif kind == "inversion" and len(indices) == 1:
            r = indices[0] - 1
            sq = metric.x_square()
            comps = [(low[r] * x[k]).scale(-2) for k in range(n)]
            comps[r] = comps[r] + sq
        else:
            raise ValueError(f"bad generator {kind}{indices}")
        self.kind = kind
        self.indices = tuple(indices)
        self.metric = metric
        super().__init__(comps, self.ident)

    @property
    def ident(self) -> str:
        return ":".join([self.kind] + [str(i) for i in self.indices])

    @classmethod
    def parse(cls, ident: str, metric: FlatMetric) -> "VectorFieldGenerator":
        parts = ident.strip().split(":")
        try:
            idx = tuple(int(v) for v in parts[1:])
        except ValueError:
            raise ValueError(f"bad generator id {ident!r}") from None
        return cls(parts[0], idx, metric)


def conformal_generators(m: FlatMetric) -> list[VectorFieldGenerator]:
    """All generators of the conformal algebra of R^{p,q}."""
    n = m.n
    gens = [VectorFieldGenerator("translation", (i,), m) for i in range(1, n + 1)]
    gens += [VectorFieldGenerator("rotation", (i, j), m) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    gens.append(VectorFieldGenerator("dilation", (), m))
    gens += [VectorFieldGenerator("inversion", (i,), m) for i in range(1, n + 1)]
    return gens


def euclidean_generators(m: FlatMetric) -> list[VectorFieldGenerator]:
    return [g for g in conformal_generators(m) if g.kind in ("translation", "rotation")]


# Lie derivatives ----------------------------------------------------------------


def lie_density(X: VectorField, lam, f: Poly) -> Poly:
    """X(f) + lam * Div(X) f on a density written in the flat chart."""
    if f.has_xi():
        raise ValueError("a density must not depend on xi")
    return X.derivative(f) + (X.divergence() * f).scale(lam)


def lie_symbol(X: VectorField, delta, P: Poly) -> Poly:
    """Cotangent lift of X acting on P, plus delta * Div(X) P."""
    n = X.n
    out = X.derivative(P)
    for i in range(n):
        dP = P.diff_var(n + i)
        if dP.is_zero():
            continue
        # - xi_j d_i X^j d_{xi_i} P
        w = Poly.zero(n)
        for j, c in enumerate(X.components):
            dc = c.diff_var(i)
            if not dc.is_zero():
                w = w + dc * Poly.xi(n, j + 1)
        if not w.is_zero():
            out = out - w * dP
    return out + (X.divergence() * P).scale(delta)


# operator calculus -----------------------------------------------------------------


def compose(a: Poly, b: Poly) -> Poly:
    """Composition of normal-ordered operators a o b."""
    if a.n != b.n:
        raise DimensionError("dimension mismatch")
    n = a.n
    out = Poly.zero(n)
    for order in range(a.xi_degree() + 1):
        for alpha in exponent_tuples(n, order):
            da, db = a, b
            fact = 1
            for i, e in enumerate(alpha):
                if e:
                    da = da.diff_var(n + i, e)
                    db = db.diff_var(i, e)
                    fact *= factorial(e)
                if da.is_zero() or db.is_zero():
                    break
            if da.is_zero() or db.is_zero():
                continue
            out = out + (da * db).scale(Fraction(1, fact))
    return out


def apply_operator_poly(a: Poly, f: Poly) -> Poly:
    """Apply a normal-ordered operator to an x-only function."""
    if f.has_xi():
        raise ValueError("operators act on functions of x only")
    n = a.n
    out = Poly.zero(n)
    for m, c in a.terms.items():
        d = f
        for i, e in enumerate(m[n:]):
            if e:
                d = d.diff_var(i, e)
        if d.is_zero():
            continue
        out = out + d * Poly._raw(n, {m[:n] + (0,) * n: c})
    return out


def formal_adjoint_poly(a: Poly) -> Poly:
    """sum (-1)^|alpha| d^alpha o conj(a_alpha), normal ordered again."""
    n = a.n
    out = Poly.zero(n)
    for m, c in a.terms.items():
        coeff = Poly._raw(n, {m[:n] + (0,) * n: c.conjugate()})
        deriv = Poly.monomial(n, (0,) * n, m[n:], (-1) ** sum(m[n:]))
        out = out + compose(deriv, coeff)
    return out


class DiffOperator2:
    """Second-order operator A2^{ij} d_i d_j + A1^i d_i + A0 with x-only coefficients."""

    def __init__(self, A2: Sequence[Sequence[Poly]], A1: Sequence[Poly], A0: Poly):
        n = A0.n
        self.n = n
        self.A2 = [list(r) for r in A2]
        self.A1 = list(A1)
        self.A0 = A0
        if len(self.A2) != n or any(len(r) != n for r in self.A2) or len(self.A1) != n:
            raise DimensionError("coefficient arrays have the wrong shape")
        for i in range(n):
            for j in range(n):
                if self.A2[i][j] != self.A2[j][i]:
                    raise ValueError("A2 must be symmetric")
        for c in self.coefficients():
            if c.n != n:
                raise DimensionError("coefficient dimension mismatch")
            if c.has_xi():
                raise ValueError("operator coefficients must not involve xi")

    def coefficients(self) -> Iterable[Poly]:
        for r in self.A2:
            yield from r
        yield from self.A1
        yield self.A0

    @classmethod
    def zero(cls, n: int) -> "DiffOperator2":
        z = Poly.zero(n)
        return cls([[z] * n for _ in range(n)], [z] * n, z)

    @classmethod
    def from_poly(cls, P: Poly) -> "DiffOperator2":
        """Read off (A2, A1, A0) from a normal-ordered polynomial of xi-degree <= 2."""
        n = P.n
        if P.xi_degree() > 2:
            raise InvariantViolation(f"operator of order {P.xi_degree()} where order <= 2 is required")
        A2 = [[Poly.zero(n)] * n for _ in range(n)]
        A1 = [Poly.zero(n)] * n
        A0 = P.xi_coefficient((0,) * n)
        for i in range(n):
            e = [0] * n
            e[i] = 1
            A1[i] = P.xi_coefficient(e)
            e[i] = 2
            A2[i][i] = P.xi_coefficient(e)
            for j in range(i + 1, n):
                e = [0] * n
                e[i] = e[j] = 1
                c = P.xi_coefficient(e).scale(Fraction(1, 2))
                A2[i][j] = A2[j][i] = c
        return cls(A2, A1, A0)

    def to_poly(self) -> Poly:
        n = self.n
        xi = [Poly.xi(n, i + 1) for i in range(n)]
        out = self.A0
        for i in range(n):
            out = out + self.A1[i] * xi[i]
            for j in range(n):
                out = out + self.A2[i][j] * xi[i] * xi[j]
        return out

    def apply(self, f: Poly) -> Poly:
        return apply_operator_poly(self.to_poly(), f)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients())

    def __eq__(self, other):
        return isinstance(other, DiffOperator2) and self.to_poly() == other.to_poly()

    def __add__(self, other):
        return DiffOperator2.from_poly(self.to_poly() + other.to_poly())

    def __sub__(self, other):
        return DiffOperator2.from_poly(self.to_poly() - other.to_poly())

    def scale(self, c) -> "DiffOperator2":
        return DiffOperator2.from_poly(self.to_poly().scale(c))

    def __repr__(self):
        return f"DiffOperator2({self.to_poly()})"

    def to_json(self) -> dict:
        return {
            "A2": [[c.to_json() for c in r] for r in self.A2],
            "A1": [c.to_json() for c in self.A1],
            "A0": self.A0.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiffOperator2":
        return cls(
            [[Poly.from_json(c) for c in r] for r in obj["A2"]],
            [Poly.from_json(c) for c in obj["A1"]],
            Poly.from_json(obj["A0"]),
        )


def lie_operator_defn(X: VectorField, lam, mu, A: DiffOperator2 | Poly) -> DiffOperator2:
    """L^mu_X o A - A o L^lam_X, computed by operator composition."""
    a = A.to_poly() if isinstance(A, DiffOperator2) else A
    order = a.xi_degree()
    res = compose(X.as_operator(mu), a) - compose(a, X.as_operator(lam))
    if res.xi_degree() > max(order, 0):
        raise InvariantViolation(f"order-{res.xi_degree()} terms failed to cancel in the Lie derivative")
    return DiffOperator2.from_poly(res)


def _raise_xi(m: FlatMetric, r: int) -> Poly:
    # xi^r = g^{rr} xi_r for the 0-based index r
    return Poly.xi(m.n, r + 1).scale(m.sign(r))


def inversion_action_formula(m: FlatMetric, lam, mu, A: DiffOperator2 | Poly) -> list[DiffOperator2]:
    """Per-generator action of the inversions on an operator of order <= 2.

    For each r the degree-l part of the result is
    L^delta(A_l) - xi_r T(A_{l+1}) + 2(l + n lam) d/dxi^r A_{l+1}.
    """
    a = A.to_poly() if isinstance(A, DiffOperator2) else A
    n = m.n
    delta = Fraction(mu) - Fraction(lam)
    T = invariant_action("T", m)
    parts = [a.homogeneous(k) for k in range(4)]
    out = []
    for r in range(n):
        X = VectorFieldGenerator("inversion", (r + 1,), m)
        res = lie_symbol(X, delta, a)
        for ell in range(3):
            nxt = parts[ell + 1]
            if nxt.is_zero():
                continue
            res = res - Poly.xi(n, r + 1) * T(nxt)
            res = res + nxt.diff_var(n + r).scale(m.sign(r) * 2 * (ell + n * Fraction(lam)))
        out.append(DiffOperator2.from_poly(res))
    return out


def contracted_inversion_symbol(m: FlatMetric, delta, P: Poly) -> Poly:
    """L^delta_Xbar(P) = sum_r xi^r L^delta_{Xbar_r}(P)."""
    n = m.n
    out = Poly.zero(n)
    for r in range(n):
        X = VectorFieldGenerator("inversion", (r + 1,), m)
        out = out + _raise_xi(m, r) * lie_symbol(X, delta, P)
    return out


def contracted_inversion_operator(m: FlatMetric, lam, mu, A: Poly) -> Poly:
    """The contracted inversion action on operators in closed form:
    L^delta_Xbar(A) + sum_l (l+1)(-1/2 l R T + 2(l + n lam)) A_{l+1}."""
    n = m.n
    R, T = invariant_action("R", m), invariant_action("T", m)
    lam = Fraction(lam)
    out = contracted_inversion_symbol(m, Fraction(mu) - lam, A)
    for ell in range(A.xi_degree()):
        nxt = A.homogeneous(ell + 1)
        term = R(T(nxt)).scale(Fraction(-ell, 2)) + nxt.scale(2 * (ell + n * lam))
        out = out + term.scale(ell + 1)
    return out


def contracted_commutator(m: FlatMetric, op: Action, delta, P: Poly) -> Poly:
    """[op, L^delta_Xbar](P) = sum_r xi^r (op(L_r P) - L_r(op P))."""
    n = m.n
    out = Poly.zero(n)
    opP = op(P)
    for r in range(n):
        X = VectorFieldGenerator("inversion", (r + 1,), m)
        term = op(lie_symbol(X, delta, P)) - lie_symbol(X, delta, opP)
        out = out + _raise_xi(m, r) * term
    return out


COMMUTATION_RELATIONS = ("R0_inv", "Euler_inv", "G0_inv", "D_inv", "L0_inv", "D2_inv")


def _relation(rel: str, m: FlatMetric, delta) -> tuple[Action, Action]:
    """(operator, right-hand side) of a commutation relation with the inversions."""
    n = m.n
    delta = Fraction(delta)
    R0, Eu, G0, D, L0 = (invariant_action(t, m) for t in ("R0", "Euler", "G0", "D", "L0"))
    c = scalar
    if rel == "R0_inv":
        return R0, c(0)
    if rel == "Euler_inv":
        return Eu, c(0)
    if rel == "G0_inv":
        return G0, 2 * (R0 @ (Eu - c(n * delta)))
    if rel == "D_inv":
        return D, (-2) * R0 + 4 * (Eu @ Eu) - (2 * (n * (delta - 1) + 2)) * Eu
    if rel == "L0_inv":
        return L0, (-4) * (R0 @ D) + 8 * (Eu @ G0) + (2 * (n * (1 - 2 * delta) - 2)) * G0
    if rel == "D2_inv":
        return D @ D, ((-4) * (R0 @ D) - 2 * G0 + 8 * (Eu @ Eu @ D)
                       + (4 * (n * (1 - delta) - 1)) * (Eu @ D))
    raise ValueError(f"unknown relation {rel!r}; expected one of {COMMUTATION_RELATIONS}")


def commutation_residual(rel: str, delta, m: FlatMetric, P: Poly, rhs_shift=0) -> Poly:
    """LHS - RHS of a commutation relation with the contracted inversion action.

    ``rhs_shift`` adds a multiple of the identity to the right-hand side; it
    exists only to show that the check detects a wrong constant.
    """
    _check_dim(m, P)
    op, rhs = _relation(rel, m, delta)
    return contracted_commutator(m, op, delta, P) - rhs(P) - P.scale(rhs_shift)
