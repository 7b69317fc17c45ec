"""Intrinsic quantization on a pseudo-Riemannian background, evaluated at a point.

Densities and symbols are written in the coordinate trivialization
|dx^1 ... dx^n|^w, so an operator at the point is just its coefficient data
(A2, A1, A0).  Covariant derivatives of densities are expanded with the
Levi-Civita data of the metric jets:  nabla_i phi = d_i phi - lam Gamma_i phi.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .coefficients import (CoefficientSet, ResonanceError, UnresolvedResonanceError, Weights, beta56,
                           coefficients, curvature_constant, first_order_coefficients, is_resonant)
from .geometry import (ConformalFactorJet, CurvatureData, GeometryError, MetricJet2, _nest, curvature_from_jets,
                       flat_presentation, presentation_base, schwarzian_nd, zeros)
from .linalg import solve
from .scalar import ExactScalar, format_rational


class PresentationRequired(ValueError):
    """n <= 2 needs the metric as a conformally flat presentation."""


@dataclass
class SymbolJet2:
    """Jets at the point of P = P2^{ij} xi_i xi_j + P1^i xi_i + P0."""

    n: int
    P2: list
    dP2: list
    ddP2: list
    P1: list = None
    dP1: list = None
    P0: Fraction = Fraction(0)

    def __post_init__(self):
        n = self.n
        self.P2 = _nest(self.P2, 2)
        self.dP2 = _nest(self.dP2, 3)
        self.ddP2 = _nest(self.ddP2, 4)
        self.P1 = _nest(self.P1 if self.P1 is not None else zeros(n, 1), 1)
        self.dP1 = _nest(self.dP1 if self.dP1 is not None else zeros(n, 2), 2)
        self.P0 = Fraction(self.P0)
        r = range(n)
        for i, j in product(r, r):
            if self.P2[i][j] != self.P2[j][i]:
                raise ValueError("P2 must be symmetric")
            for k in r:
                if self.dP2[k][i][j] != self.dP2[k][j][i]:
                    raise ValueError("dP2 must be symmetric in its upper indices")
                for l in r:
                    a = self.ddP2[k][l][i][j]
                    if a != self.ddP2[k][l][j][i] or a != self.ddP2[l][k][i][j]:
                        raise ValueError("ddP2 must be symmetric")

    @classmethod
    def quadratic(cls, P2, dP2, ddP2) -> "SymbolJet2":
        return cls(len(P2), P2, dP2, ddP2)

    def second_order_only(self) -> "SymbolJet2":
        return SymbolJet2(self.n, self.P2, self.dP2, self.ddP2)

    def has_second_order(self) -> bool:
        return any(v for row in self.P2 for v in row) or any(
            v for a in self.dP2 for b in a for v in b) or any(
            v for a in self.ddP2 for b in a for c in b for v in c)

    def to_json(self) -> dict:
        from .geometry import _fmt
        return {"n": self.n, "P2": _fmt(self.P2), "dP2": _fmt(self.dP2), "ddP2": _fmt(self.ddP2),
                "P1": _fmt(self.P1), "dP1": _fmt(self.dP1), "P0": format_rational(self.P0)}

    @classmethod
    def from_json(cls, obj: dict) -> "SymbolJet2":
        n = int(obj["n"])
        return cls(n, obj["P2"], obj["dP2"], obj["ddP2"], obj.get("P1"), obj.get("dP1"), obj.get("P0", "0"))


@dataclass
class ConnectionJet:
    A: list
    dA: list  # dA[j][k] = d_j A_k

    def __post_init__(self):
        self.A = _nest(self.A, 1)
        self.dA = _nest(self.dA, 2)

    @property
    def n(self) -> int:
        return len(self.A)

    def to_json(self):
        from .geometry import _fmt
        return {"A": _fmt(self.A), "dA": _fmt(self.dA)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["A"], obj["dA"])


def _sc(v) -> ExactScalar:
    return v if isinstance(v, ExactScalar) else ExactScalar(v)


@dataclass
class PointOperator:
    A2: list
    A1: list
    A0: ExactScalar
    acts_between: tuple = (None, None)

    def __post_init__(self):
        self.A2 = [[_sc(v) for v in row] for row in self.A2]
        self.A1 = [_sc(v) for v in self.A1]
        self.A0 = _sc(self.A0)
        n = len(self.A1)
        for i, j in product(range(n), range(n)):
            if self.A2[i][j] != self.A2[j][i]:
                raise ValueError("A2 must be symmetric")

    @property
    def n(self) -> int:
        return len(self.A1)

    def entries(self) -> list:
        return [v for row in self.A2 for v in row] + list(self.A1) + [self.A0]

    def __add__(self, other: "PointOperator") -> "PointOperator":
        n = self.n
        return PointOperator([[self.A2[i][j] + other.A2[i][j] for j in range(n)] for i in range(n)],
                             [a + b for a, b in zip(self.A1, other.A1)], self.A0 + other.A0, self.acts_between)

    def scale(self, c) -> "PointOperator":
        c = _sc(c)
        return PointOperator([[v * c for v in row] for row in self.A2], [v * c for v in self.A1],
                             self.A0 * c, self.acts_between)

    def __sub__(self, other: "PointOperator") -> "PointOperator":
        return self + other.scale(-1)

    def max_abs(self) -> Fraction:
        return max((v.magnitude_bound() for v in self.entries()), default=Fraction(0))

    def is_zero(self) -> bool:
        return all(not v for v in self.entries())

    def __eq__(self, other):
        return isinstance(other, PointOperator) and self.entries() == other.entries()

    def to_json(self) -> dict:
        lam, mu = self.acts_between
        return {"A2": [[str(v) for v in row] for row in self.A2], "A1": [str(v) for v in self.A1],
                "A0": str(self.A0),
                "acts_between": [None if lam is None else format_rational(lam),
                                 None if mu is None else format_rational(mu)]}


# covariant expansions -----------------------------------------------------------------


@dataclass
class _Frame:
    m: MetricJet2
    curv: CurvatureData
    Gt: list = field(init=False)
    dGt: list = field(init=False)

    def __post_init__(self):
        self.Gt = self.curv.trace_gamma()
        self.dGt = self.curv.d_trace_gamma()


def _frame(m: MetricJet2) -> _Frame:
    return _Frame(m, curvature_from_jets(m))


def _cov1(fr: _Frame, s: SymbolJet2, delta) -> list:
    """nabla_k P^{ab} for the weight-delta tensor density P2."""
    n, G, Gt = fr.m.n, fr.curv.Gamma, fr.Gt
    P, dP = s.P2, s.dP2
    r = range(n)
    return [[[dP[k][a][b] + sum(G[a][k][l] * P[l][b] + G[b][k][l] * P[a][l] for l in r)
              - delta * Gt[k] * P[a][b] for b in r] for a in r] for k in r]


def _cov2(fr: _Frame, s: SymbolJet2, delta, cov1) -> list:
    """nabla_i nabla_j P^{kl}."""
    n, G, dG, Gt, dGt = fr.m.n, fr.curv.Gamma, fr.curv.dGamma, fr.Gt, fr.dGt
    P, dP, ddP = s.P2, s.dP2, s.ddP2
    r = range(n)
    out = zeros(n, 4)
    for i, j, k, l in product(r, r, r, r):
        d = ddP[i][j][k][l] - delta * (dGt[i][j] * P[k][l] + Gt[j] * dP[i][k][l])
        for mm in r:
            d += dG[i][k][j][mm] * P[mm][l] + G[k][j][mm] * dP[i][mm][l]
            d += dG[i][l][j][mm] * P[k][mm] + G[l][j][mm] * dP[i][k][mm]
        v = d - delta * Gt[i] * cov1[j][k][l]
        for mm in r:
            v += -G[mm][i][j] * cov1[mm][k][l] + G[k][i][mm] * cov1[j][mm][l] + G[l][i][mm] * cov1[j][k][mm]
        out[i][j][k][l] = v
    return out


def _hessian_operator(fr: _Frame, lam, P2) -> tuple[list, list, Fraction]:
    """Coefficients of P^{ij} nabla_i nabla_j acting on lam-densities."""
    n, G, Gt, dGt = fr.m.n, fr.curv.Gamma, fr.Gt, fr.dGt
    r = range(n)
    A2 = [[P2[i][j] for j in r] for i in r]
    A1 = [-sum(P2[i][j] * G[k][i][j] for i in r for j in r) - 2 * lam * sum(P2[k][j] * Gt[j] for j in r)
          for k in r]
    A0 = sum(P2[i][j] * (-lam * dGt[i][j] + lam * sum(G[k][i][j] * Gt[k] for k in r) + lam * lam * Gt[i] * Gt[j])
             for i in r for j in r)
    return A2, A1, A0


def _second_order_core(fr: _Frame, w: Weights, s: SymbolJet2, betas) -> tuple[list, list, Fraction]:
    """Everything in the second-order formula except the curvature block."""
    n, lam, delta = w.n, w.lam, w.delta
    g, gi = fr.m.g, fr.m.ginv
    r = range(n)
    b1, b2, b3, b4 = betas
    A2, A1, A0 = _hessian_operator(fr, lam, s.P2)
    c1 = _cov1(fr, s, delta)
    c2 = _cov2(fr, s, delta, c1)
    trace_c1 = [sum(g[k][l] * c1[i][k][l] for k in r for l in r) for i in r]
    V = [b1 * sum(c1[i][i][j] for i in r) + b2 * sum(gi[i][j] * trace_c1[i] for i in r) for j in r]
    A1 = [A1[j] + V[j] for j in r]
    A0 += -lam * sum(V[j] * fr.Gt[j] for j in r)
    A0 += b3 * sum(c2[i][j][i][j] for i in r for j in r)
    A0 += b4 * sum(gi[i][j] * g[k][l] * c2[i][j][k][l] for i, j, k, l in product(r, r, r, r))
    return A2, A1, A0


def _first_order_core(fr: _Frame, w: Weights, s: SymbolJet2, alpha) -> tuple[list, Fraction]:
    """P1^i nabla_i + alpha nabla_i(P1^i) + P0."""
    n, lam, delta = w.n, w.lam, w.delta
    r = range(n)
    div = sum(s.dP1[i][i] for i in r) + (1 - delta) * sum(fr.Gt[i] * s.P1[i] for i in r)
    A1 = list(s.P1)
    A0 = -lam * sum(s.P1[i] * fr.Gt[i] for i in r) + alpha * div + s.P0
    return A1, A0


def _curvature_terms(fr: _Frame, s: SymbolJet2, presentation: Optional[ConformalFactorJet]) -> tuple:
    """(first, second) tensors contracted with P2 in the curvature block.

    n >= 3: (Ric_ij P^ij, R g_ij P^ij);  n = 2: (S_ij P^ij, R g_ij P^ij);
    n = 1: (S P, 0) with S the Schwarzian of the presentation.
    """
    n = fr.m.n
    r = range(n)
    trP = sum(fr.m.g[i][j] * s.P2[i][j] for i in r for j in r)
    if n >= 3:
        Ric = fr.curv.Ric
        return sum(Ric[i][j] * s.P2[i][j] for i in r for j in r), fr.curv.R * trP
    if presentation is None:
        raise PresentationRequired(f"n = {n} needs a conformally flat presentation (F, g0)")
    S = schwarzian_nd(presentation, fr.m).S
    if n == 1:
        return S * s.P2[0][0], Fraction(0)
    return sum(S[i][j] * s.P2[i][j] for i in r for j in r), fr.curv.R * trP


def curvature_block_closed_form(w: Weights) -> tuple[Fraction, Fraction]:
    """Closed-form weights of the two curvature terms (see _curvature_terms)."""
    n, lam, mu, delta = w.n, w.lam, w.mu, w.delta
    if n >= 3:
        b5, b6 = beta56(n, lam, mu)
        return b5, b6
    if n == 2:
        if lam * (mu - 1) == 0:
            return Fraction(0), Fraction(0)
        if 2 * delta - 3 == 0 or delta == 1:
            raise ResonanceError("Schwarzian block is singular at these weights")
        a = 4 * lam * (mu - 1) / (2 * delta - 3)
        return a, a / (8 * (delta - 1))
    if lam * (mu - 1) == 0:
        return Fraction(0), Fraction(0)
    if 3 - 2 * delta == 0:
        raise ResonanceError("Schwarzian term is singular at delta = 3/2")
    return -2 * lam * (mu - 1) / (3 - 2 * delta), Fraction(0)


def _resolve(w: Weights, s: SymbolJet2, cs: CoefficientSet | None, free_value=None, alpha=None):
    if cs is not None:
        return cs
    if w.delta == 1 and not s.has_second_order():
        a = alpha
        if a is None and w.lam + w.mu == 1:
            a = Fraction(1, 2)
        a = first_order_coefficients(w, a)
        zero = Fraction(0)
        return CoefficientSet(w, alpha=a, gammas=[zero, a, zero, zero, zero], betas={}, resonant=True)
    cs = coefficients(w, free_value)
    return cs.require_resolved()


_block_cache: dict = {}


def curvature_block(w: Weights, cs: CoefficientSet) -> tuple[Fraction, Fraction]:
    """Curvature-block weights: closed form where it applies, else solved from flat agreement."""
    if not cs.resonant:
        try:
            return curvature_block_closed_form(w)
        except ResonanceError:
            pass
    key = (w, tuple(cs.gammas))
    if key not in _block_cache:
        _block_cache[key] = solve_curvature_block(w, cs)
    return _block_cache[key]


def quantize_point(w: Weights, m: MetricJet2, s: SymbolJet2, presentation: ConformalFactorJet | None = None,
                   coeffs: CoefficientSet | None = None, hbar=None, free_value=None, alpha=None,
                   block: tuple | None = None) -> PointOperator:
    """Q(P) at the point for P = P2 + P1 + P0 (hbar scales the degree-k part by (i hbar)^k)."""
    n = w.n
    if m.n != n or s.n != n:
        raise ValueError("dimension mismatch between weights, metric and symbol")
    if n <= 2 and s.has_second_order():
        if presentation is None:
            raise PresentationRequired(f"n = {n} needs a conformally flat presentation (F, g0)")
        presentation_base(m, presentation)
    cs = _resolve(w, s, coeffs, free_value, alpha)
    fr = _frame(m)
    r = range(n)
    ih = ExactScalar(0, Fraction(hbar)) if hbar is not None else ExactScalar(1)
    c2, c1 = ih * ih, ih
    A2 = [[ExactScalar(0)] * n for _ in r]
    A1 = [ExactScalar(0)] * n
    A0 = ExactScalar(0)
    if s.has_second_order():
        betas = [cs.betas.get(f"beta{k}") or Fraction(0) for k in range(1, 5)]
        Q2, Q1, Q0 = _second_order_core(fr, w, s, betas)
        k1, k2 = block if block is not None else curvature_block(w, cs)
        t1, t2 = _curvature_terms(fr, s, presentation)
        Q0 += k1 * t1 + k2 * t2
        A2 = [[c2 * Q2[i][j] for j in r] for i in r]
        A1 = [c2 * v for v in Q1]
        A0 = c2 * Q0
    F1, F0 = _first_order_core(fr, w, s, cs.alpha if cs.alpha is not None else Fraction(0))
    # P0 is already inside F0 and carries no hbar factor
    A1 = [A1[i] + c1 * F1[i] for i in r]
    A0 = A0 + c1 * (F0 - s.P0) + s.P0
    return PointOperator(A2, A1, A0, (w.lam, w.mu))


def quantize_first_order(w: Weights, m: MetricJet2, s: SymbolJet2, alpha=None, hbar=None) -> PointOperator:
    s1 = SymbolJet2(s.n, zeros(s.n, 2), zeros(s.n, 3), zeros(s.n, 4), s.P1, s.dP1, s.P0)
    return quantize_point(w, m, s1, alpha=alpha, hbar=hbar)


def quantize_second_order(w: Weights, m: MetricJet2, s: SymbolJet2, presentation=None, coeffs=None,
                          hbar=None, free_value=None) -> PointOperator:
    return quantize_point(w, m, s.second_order_only(), presentation, coeffs, hbar, free_value)


def conformal_invariance_residual(w: Weights, m: MetricJet2, f: ConformalFactorJet, s: SymbolJet2,
                                  coeffs: CoefficientSet | None = None,
                                  presentation: ConformalFactorJet | None = None,
                                  block: tuple | None = None) -> Fraction:
    """max |Q_g(P) - Q_{F g}(P)| over coefficients, symbol held fixed.

    For n <= 2 the metric must be the presentation F0 g0; the rescaled metric
    is then presented by F0 * F.
    """
    from .geometry import conformal_rescale
    m_hat = conformal_rescale(m, f)
    pres_hat = presentation.times(f) if presentation is not None else None
    a = quantize_point(w, m, s, presentation, coeffs, block=block)
    b = quantize_point(w, m_hat, s, pres_hat, coeffs, block=block)
    return (a - b).max_abs()


# flat comparison and the curvature-block solver ----------------------------------------


def flat_point_operator(w: Weights, s: SymbolJet2, coeffs: CoefficientSet | None = None) -> PointOperator:
    """The flat-chart quantization of the Taylor polynomial of s, evaluated at 0."""
    from .flat import QuantizationParams, Symbol2, quantize_components
    from .poly import Poly
    n = w.n
    r = range(n)
    x = [Poly.x(n, i + 1) for i in r]
    xi = [Poly.xi(n, i + 1) for i in r]
    P = Poly.const(n, s.P0)
    for i in r:
        comp = Poly.const(n, s.P1[i]) + sum((x[k].scale(s.dP1[k][i]) for k in r), Poly.zero(n))
        P = P + comp * xi[i]
        for j in r:
            c = Poly.const(n, s.P2[i][j])
            for k in r:
                c = c + x[k].scale(s.dP2[k][i][j])
                for l in r:
                    c = c + (x[k] * x[l]).scale(s.ddP2[k][l][i][j] / 2)
            P = P + c * xi[i] * xi[j]
    params = QuantizationParams(w)
    sym = Symbol2(P, w)
    A = quantize_components(params, sym, coeffs)
    zero = [0] * n
    ev = lambda p: p.evaluate(zero)
    return PointOperator([[ev(A.A2[i][j]) for j in r] for i in r], [ev(v) for v in A.A1], ev(A.A0), (w.lam, w.mu))


def random_rational(rng: random.Random, num=4, den=3) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_factor_jet(rng: random.Random, n: int) -> ConformalFactorJet:
    dd = zeros(n, 2)
    for i in range(n):
        for j in range(i, n):
            dd[i][j] = dd[j][i] = random_rational(rng)
    return ConformalFactorJet(Fraction(rng.randint(1, 6), rng.randint(1, 3)),
                              [random_rational(rng) for _ in range(n)], dd)


def random_symbol_jet(rng: random.Random, n: int, first_order: bool = True) -> SymbolJet2:
    P2, dP2, ddP2 = zeros(n, 2), zeros(n, 3), zeros(n, 4)
    r = range(n)
    for i in r:
        for j in range(i, n):
            P2[i][j] = P2[j][i] = random_rational(rng)
            for k in r:
                dP2[k][i][j] = dP2[k][j][i] = random_rational(rng)
                for l in range(k, n):
                    v = random_rational(rng)
                    ddP2[k][l][i][j] = ddP2[k][l][j][i] = ddP2[l][k][i][j] = ddP2[l][k][j][i] = v
    if not first_order:
        return SymbolJet2(n, P2, dP2, ddP2)
    P1 = [random_rational(rng) for _ in r]
    dP1 = [[random_rational(rng) for _ in r] for _ in r]
    return SymbolJet2(n, P2, dP2, ddP2, P1, dP1, random_rational(rng))


def random_metric_jet(rng: random.Random, n: int, q: int = 0) -> MetricJet2:
    """Random rational 2-jet with a diagonally dominant g of signature (n - q, q)."""
    while True:
        g, dg, ddg = zeros(n, 2), zeros(n, 3), zeros(n, 4)
        r = range(n)
        for i in r:
            for j in range(i, n):
                if i == j:
                    g[i][i] = Fraction(rng.randint(3 * n, 5 * n), rng.randint(1, 2)) * (1 if i < n - q else -1)
                else:
                    g[i][j] = g[j][i] = random_rational(rng, 2, 2)
                for k in r:
                    dg[k][i][j] = dg[k][j][i] = random_rational(rng)
                    for l in range(k, n):
                        v = random_rational(rng)
                        ddg[k][l][i][j] = ddg[k][l][j][i] = ddg[l][k][i][j] = ddg[l][k][j][i] = v
        try:
            return MetricJet2(n, g, dg, ddg)
        except GeometryError:
            continue


def solve_curvature_block(w: Weights, cs: CoefficientSet, samples: int = 4, seed: int = 7):
    """Find the curvature-block weights that make the intrinsic formula agree
    with the flat-chart quantization on conformally flat presentations.

    Returns None when no choice works (the coefficient set admits no
    conformally invariant completion).
    """
    n = w.n
    rng = random.Random(seed)
    g0 = w.metric.matrix()
    rows, rhs = [], []
    for _ in range(samples):
        f = random_factor_jet(rng, n)
        m = flat_presentation(g0, f)
        s = random_symbol_jet(rng, n, first_order=False)
        target = flat_point_operator(w, s, cs)
        base = quantize_point(w, m, s, f, cs, block=(0, 0))
        diff = base - target
        if any(v for v in diff.entries()[:-1]):
            return None
        fr = _frame(m)
        t1, t2 = _curvature_terms(fr, s, f)
        rows.append([t1, t2])
        rhs.append(-diff.A0.re)
        if diff.A0.im:
            return None
    sol = solve(rows, rhs)
    if sol.kind == "none":
        return None
    k1, k2 = sol.particular
    if n == 1:
        k2 = Fraction(0)
    return k1, k2


# Hamiltonians ------------------------------------------------------------------------


def hamiltonian_jets(w: Weights, m: MetricJet2, a: ConnectionJet | None = None) -> SymbolJet2:
    """Jets of g^{jk}(xi_j - A_j)(xi_k - A_k) as a weight-delta density,
    normalized by |det g|^{delta/2} at the point."""
    n = m.n
    delta = w.delta
    fr = _frame(m)
    gi, dg, ddg = m.ginv, m.dg, m.ddg
    r = range(n)
    Gt, dGt = fr.Gt, fr.dGt
    # jets of g^{-1}
    dgi = [[[-sum(gi[i][a_] * dg[k][a_][b] * gi[b][j] for a_ in r for b in r) for j in r] for i in r] for k in r]
    ddgi = zeros(n, 4)
    for k, l, i, j in product(r, r, r, r):
        v = Fraction(0)
        for a_, b in product(r, r):
            v -= dgi[l][i][a_] * dg[k][a_][b] * gi[b][j] + gi[i][a_] * ddg[k][l][a_][b] * gi[b][j] \
                + gi[i][a_] * dg[k][a_][b] * dgi[l][b][j]
        ddgi[k][l][i][j] = v
    # rho = (|det g| / |det g(0)|)^{delta/2}: rho = 1, d rho = delta Gamma, dd rho = delta dGamma + delta^2 Gamma Gamma
    rho1 = [delta * Gt[k] for k in r]
    rho2 = [[delta * dGt[l][k] + delta * delta * Gt[k] * Gt[l] for l in r] for k in r]
    P2 = [[gi[i][j] for j in r] for i in r]
    dP2 = [[[dgi[k][i][j] + rho1[k] * gi[i][j] for j in r] for i in r] for k in r]
    ddP2 = [[[[ddgi[k][l][i][j] + rho1[k] * dgi[l][i][j] + rho1[l] * dgi[k][i][j] + rho2[k][l] * gi[i][j]
               for j in r] for i in r] for l in r] for k in r]
    if a is None:
        return SymbolJet2(n, P2, dP2, ddP2)
    A, dA = a.A, a.dA
    # P1^k = -2 rho g^{jk} A_j, P0 = rho g^{jk} A_j A_k
    P1 = [-2 * sum(gi[j][k] * A[j] for j in r) for k in r]
    dP1 = [[-2 * sum(dgi[l][j][k] * A[j] + gi[j][k] * dA[l][j] + rho1[l] * gi[j][k] * A[j] for j in r)
            for k in r] for l in r]
    P0 = sum(gi[j][k] * A[j] * A[k] for j in r for k in r)
    return SymbolJet2(n, P2, dP2, ddP2, P1, dP1, P0)


def laplacian_point_operator(lam, m: MetricJet2, hbar, C) -> PointOperator:
    """-hbar^2 (g^{ij} nabla_i nabla_j + C R) on lam-densities."""
    fr = _frame(m)
    A2, A1, A0 = _hessian_operator(fr, Fraction(lam), m.ginv)
    h2 = -Fraction(hbar) ** 2
    op = PointOperator(A2, A1, A0 + Fraction(C) * fr.curv.R).scale(h2)
    return op


def _geodesic_weights_check(w: Weights):
    if w.n < 2:
        raise ValueError("the geodesic Hamiltonian formula needs n >= 2")
    if is_resonant(w.n, w.delta):
        raise ResonanceError("resonant weights: use resonant_laplacians")


def quantize_geodesic(w: Weights, m: MetricJet2, hbar, presentation=None) -> PointOperator:
    """Q(H) for H = g^{ij} xi_i xi_j, normalized by |vol_g|^delta at the point."""
    _geodesic_weights_check(w)
    return quantize_point(w, m, hamiltonian_jets(w, m), presentation, hbar=hbar)


def quantize_minimal_coupling(w: Weights, m: MetricJet2, a: ConnectionJet, hbar, presentation=None) -> PointOperator:
    _geodesic_weights_check(w)
    return quantize_point(w, m, hamiltonian_jets(w, m, a), presentation, hbar=hbar)


def minimal_coupling_formula(w: Weights, m: MetricJet2, a: ConnectionJet, hbar, C) -> PointOperator:
    """-hbar^2 g(nabla + i/hbar A)(nabla + i/hbar A) - hbar^2 C R + i hbar k g^{jk} nabla_j A_k,
    with k = (1 - lam - mu)/(1 - delta)."""
    n = m.n
    r = range(n)
    hbar = Fraction(hbar)
    fr = _frame(m)
    gi = m.ginv
    base = laplacian_point_operator(w.lam, m, hbar, C)
    I = ExactScalar(0, 1)
    divA = sum(gi[j][k] * (a.dA[j][k] - sum(fr.curv.Gamma[l][j][k] * a.A[l] for l in r)) for j in r for k in r)
    gAA = sum(gi[j][k] * a.A[j] * a.A[k] for j in r for k in r)
    A1 = [I * (-2 * hbar * sum(gi[j][k] * a.A[j] for j in r)) for k in r]
    # nabla_k on lam-densities contributes -lam Gamma_k to the zero-order part
    A0 = (I * (-hbar * divA) + gAA + I * (2 * hbar * w.lam * sum(gi[j][k] * a.A[j] * fr.Gt[k] for j in r for k in r)))
    anomaly = anomaly_coefficient(w)
    A0 = A0 + I * (hbar * anomaly * divA)
    extra = PointOperator([[0] * n for _ in r], A1, A0)
    return base + extra


def anomaly_coefficient(w: Weights) -> Fraction:
    return (1 - w.lam - w.mu) / (1 - w.delta)


RESONANT_CASES = ("yamabe", "laplace", "new", "sturm_liouville")


def resonant_case_weights(case: str, n: int) -> Weights:
    if case == "yamabe":
        lam, mu = Fraction(n - 2, 2 * n), Fraction(n + 2, 2 * n)
    elif case == "laplace":
        lam, mu = Fraction(0), Fraction(1)
    elif case == "new":
        lam, mu = Fraction(-1, n), Fraction(n + 1, n)
    elif case == "sturm_liouville":
        if n != 1:
            raise ValueError("sturm_liouville requires n = 1")
        lam, mu = Fraction(-1, 2), Fraction(3, 2)
    else:
        raise ValueError(f"unknown case {case!r}; expected one of {RESONANT_CASES}")
    if case != "sturm_liouville" and n < 2:
        raise ValueError(f"{case} requires n >= 2")
    return Weights(n, n, 0, lam, mu)


def resonant_scalar_coefficient(case: str, n: int) -> Fraction:
    """The scalar-curvature coefficient c in -hbar^2 (Delta + c R) for each case
    (for sturm_liouville, the coefficient of S/g)."""
    if case == "yamabe":
        return -Fraction(n - 2, 4 * (n - 1))
    if case == "laplace":
        return Fraction(0)
    if case == "new":
        return Fraction(1, (n - 1) * (n + 2))
    if case == "sturm_liouville":
        return Fraction(-1, 2)
    raise ValueError(case)


def resonant_laplacians(case: str, n: int, m: MetricJet2, hbar, presentation=None,
                        signature_q: int = 0, free_value=0) -> PointOperator:
    """Q(H) at the symmetric member of the resonant family.

    ``free_value`` fixes any parameter that symmetry leaves free (only the
    n = 2 Laplace case, where Q(H) does not depend on it).
    """
    w = resonant_case_weights(case, n)
    w = Weights(n, n - signature_q, signature_q, w.lam, w.mu)
    cs = coefficients(w, None, True)
    if not cs.resolved:
        cs = coefficients(w, free_value, True)
    cs.require_resolved()
    return quantize_point(w, m, hamiltonian_jets(w, m), presentation, cs, hbar=hbar)


def scalar_curvature_coefficient(op: PointOperator, lam, m: MetricJet2, hbar) -> Fraction:
    """c such that op = -hbar^2 (Delta_lam + c R) at the point (requires R != 0)."""
    base = laplacian_point_operator(lam, m, hbar, 0)
    diff = op - base
    if any(v for v in diff.entries()[:-1]):
        raise ValueError("operator is not a Laplacian plus a scalar term")
    R = curvature_from_jets(m).R
    if R == 0:
        raise ValueError("scalar curvature vanishes at the point")
    val = diff.A0 / (-Fraction(hbar) ** 2 * R)
    if not val.is_real():
        raise ValueError("non-real scalar coefficient")
    return val.re
