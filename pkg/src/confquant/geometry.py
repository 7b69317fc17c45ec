"""Exact pseudo-Riemannian geometry at a single point, from 2-jets.

Index conventions: ``dg[k][i][j] = d_k g_ij``, ``ddg[k][l][i][j] = d_k d_l g_ij``,
``Gamma[k][i][j] = Gamma^k_ij`` and ``dGamma[m][k][i][j] = d_m Gamma^k_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .linalg import determinant, inverse
from .scalar import format_rational, parse_rational


class GeometryError(ValueError):
    pass


def _fr(x):
    return parse_rational(x) if isinstance(x, str) else Fraction(x)


def _nest(data, depth):
    if depth == 0:
        return _fr(data)
    return [_nest(d, depth - 1) for d in data]


def _fmt(data):
    if isinstance(data, list):
        return [_fmt(d) for d in data]
    return format_rational(data)


def zeros(n: int, depth: int):
    if depth == 1:
        return [Fraction(0)] * n
    return [zeros(n, depth - 1) for _ in range(n)]


@dataclass
class MetricJet2:
    n: int
    g: list
    dg: list
    ddg: list

    def __post_init__(self):
        n = self.n
        self.g = _nest(self.g, 2)
        self.dg = _nest(self.dg, 3)
        self.ddg = _nest(self.ddg, 4)
        if len(self.g) != n or len(self.dg) != n or len(self.ddg) != n:
            raise GeometryError("jet arrays have the wrong shape")
        r = range(n)
        for i, j in product(r, r):
            if self.g[i][j] != self.g[j][i]:
                raise GeometryError("g must be symmetric")
            for k in r:
                if self.dg[k][i][j] != self.dg[k][j][i]:
                    raise GeometryError("dg must be symmetric in (i, j)")
                for l in r:
                    a = self.ddg[k][l][i][j]
                    if a != self.ddg[k][l][j][i] or a != self.ddg[l][k][i][j]:
                        raise GeometryError("ddg must be symmetric in (i, j) and (k, l)")
        if determinant(self.g) == 0:
            raise GeometryError("metric is singular")
        self._ginv = None

    @property
    def ginv(self) -> list:
        if self._ginv is None:
            self._ginv = inverse(self.g)
        return self._ginv

    @classmethod
    def constant(cls, g: Sequence[Sequence]) -> "MetricJet2":
        n = len(g)
        return cls(n, [list(r) for r in g], zeros(n, 3), zeros(n, 4))

    def to_json(self) -> dict:
        return {"n": self.n, "g": _fmt(self.g), "dg": _fmt(self.dg), "ddg": _fmt(self.ddg)}

    @classmethod
    def from_json(cls, obj: dict) -> "MetricJet2":
        return cls(int(obj["n"]), obj["g"], obj["dg"], obj["ddg"])

    def __eq__(self, other):
        return (isinstance(other, MetricJet2) and self.n == other.n and self.g == other.g
                and self.dg == other.dg and self.ddg == other.ddg)


@dataclass
class ConformalFactorJet:
    F: Fraction
    dF: list
    ddF: list

    def __post_init__(self):
        self.F = _fr(self.F)
        self.dF = _nest(self.dF, 1)
        self.ddF = _nest(self.ddF, 2)
        n = len(self.dF)
        if self.F <= 0:
            raise GeometryError("conformal factor must be positive")
        if len(self.ddF) != n or any(len(r) != n for r in self.ddF):
            raise GeometryError("ddF has the wrong shape")
        for i, j in product(range(n), range(n)):
            if self.ddF[i][j] != self.ddF[j][i]:
                raise GeometryError("ddF must be symmetric")

    @property
    def n(self) -> int:
        return len(self.dF)

    @classmethod
    def constant(cls, n: int, F=1) -> "ConformalFactorJet":
        return cls(F, zeros(n, 1), zeros(n, 2))

    def to_json(self) -> dict:
        return {"F": format_rational(self.F), "dF": _fmt(self.dF), "ddF": _fmt(self.ddF)}

    @classmethod
    def from_json(cls, obj: dict) -> "ConformalFactorJet":
        return cls(obj["F"], obj["dF"], obj["ddF"])

    def reciprocal(self) -> "ConformalFactorJet":
        """Jets of 1/F."""
        F, n = self.F, self.n
        return ConformalFactorJet(1 / F, [-a / F ** 2 for a in self.dF],
                                  [[-self.ddF[i][j] / F ** 2 + 2 * self.dF[i] * self.dF[j] / F ** 3
                                    for j in range(n)] for i in range(n)])

    def times(self, other: "ConformalFactorJet") -> "ConformalFactorJet":
        """Jet of the product of two factors."""
        n = self.n
        F = self.F * other.F
        dF = [self.dF[i] * other.F + self.F * other.dF[i] for i in range(n)]
        ddF = [[self.ddF[i][j] * other.F + self.dF[i] * other.dF[j] + self.dF[j] * other.dF[i]
                + self.F * other.ddF[i][j] for j in range(n)] for i in range(n)]
        return ConformalFactorJet(F, dF, ddF)


@dataclass
class CurvatureData:
    Gamma: list
    dGamma: list
    Ric: list
    R: Fraction

    @property
    def n(self) -> int:
        return len(self.Ric)

    def trace_gamma(self) -> list:
        """Gamma_i = Gamma^j_ij."""
        n = self.n
        return [sum(self.Gamma[j][i][j] for j in range(n)) for i in range(n)]

    def d_trace_gamma(self) -> list:
        """dG[m][i] = d_m Gamma_i."""
        n = self.n
        return [[sum(self.dGamma[m][j][i][j] for j in range(n)) for i in range(n)] for m in range(n)]


def curvature_from_jets(m: MetricJet2) -> CurvatureData:
    n = m.n
    gi = m.ginv
    r = range(n)
    # first-kind symbols and their derivatives
    low = [[[(m.dg[i][l][j] + m.dg[j][l][i] - m.dg[l][i][j]) / 2 for j in r] for i in r] for l in r]
    dlow = [[[[(m.ddg[p][i][l][j] + m.ddg[p][j][l][i] - m.ddg[p][l][i][j]) / 2 for j in r] for i in r]
              for l in r] for p in r]
    dgi = [[[-sum(gi[k][a] * m.dg[p][a][b] * gi[b][l] for a in r for b in r) for l in r] for k in r] for p in r]
    Gamma = [[[sum(gi[k][l] * low[l][i][j] for l in r) for j in r] for i in r] for k in r]
    dGamma = [[[[sum(dgi[p][k][l] * low[l][i][j] + gi[k][l] * dlow[p][l][i][j] for l in r)
                 for j in r] for i in r] for k in r] for p in r]
    Ric = [[sum(dGamma[k][k][i][j] - dGamma[j][k][i][k] for k in r)
            + sum(Gamma[k][k][l] * Gamma[l][i][j] - Gamma[k][j][l] * Gamma[l][i][k] for k in r for l in r)
            for j in r] for i in r]
    R = sum(gi[i][j] * Ric[i][j] for i in r for j in r)
    return CurvatureData(Gamma, dGamma, Ric, R)


def conformal_rescale(m: MetricJet2, f: ConformalFactorJet) -> MetricJet2:
    """Jets of F g by the product rule."""
    n = m.n
    if f.n != n:
        raise GeometryError("factor and metric dimensions differ")
    r = range(n)
    g = [[f.F * m.g[i][j] for j in r] for i in r]
    dg = [[[f.dF[k] * m.g[i][j] + f.F * m.dg[k][i][j] for j in r] for i in r] for k in r]
    ddg = [[[[f.ddF[k][l] * m.g[i][j] + f.dF[k] * m.dg[l][i][j] + f.dF[l] * m.dg[k][i][j]
              + f.F * m.ddg[k][l][i][j] for j in r] for i in r] for l in r] for k in r]
    return MetricJet2(n, g, dg, ddg)


def flat_presentation(g0: Sequence[Sequence], f: ConformalFactorJet) -> MetricJet2:
    """Jets of the conformally flat metric F g0 with g0 constant."""
    return conformal_rescale(MetricJet2.constant(g0), f)


def hessian_of_factor(m: MetricJet2, f: ConformalFactorJet, curv: CurvatureData | None = None) -> list:
    """nabla_i d_j F with the Levi-Civita connection of m."""
    curv = curv or curvature_from_jets(m)
    n = m.n
    return [[f.ddF[i][j] - sum(curv.Gamma[k][i][j] * f.dF[k] for k in range(n)) for j in range(n)]
            for i in range(n)]


def _factor_invariants(m, f, curv):
    n = m.n
    gi = m.ginv
    H = hessian_of_factor(m, f, curv)
    lap = sum(gi[i][j] * H[i][j] for i in range(n) for j in range(n))
    norm = sum(gi[i][j] * f.dF[i] * f.dF[j] for i in range(n) for j in range(n))
    return H, lap, norm


def gamma_hat(m: MetricJet2, f: ConformalFactorJet, curv: CurvatureData | None = None) -> list:
    """Christoffel symbols of F g from those of g."""
    curv = curv or curvature_from_jets(m)
    n = m.n
    gi = m.ginv
    up = [sum(gi[k][j] * f.dF[j] for j in range(n)) for k in range(n)]
    c = 1 / (2 * f.F)
    return [[[curv.Gamma[k][i][j] + c * (f.dF[i] * (j == k) + f.dF[j] * (i == k) - up[k] * m.g[i][j])
              for j in range(n)] for i in range(n)] for k in range(n)]


def ricci_hat(m: MetricJet2, f: ConformalFactorJet, curv: CurvatureData | None = None) -> list:
    """Ricci tensor of F g from that of g."""
    curv = curv or curvature_from_jets(m)
    n = m.n
    H, lap, norm = _factor_invariants(m, f, curv)
    F = f.F
    scal = -(lap / F + Fraction(n - 4, 2) * norm / (F * F)) / 2
    return [[curv.Ric[i][j] - Fraction(n - 2, 2) * (H[i][j] / F - Fraction(3, 2) * f.dF[i] * f.dF[j] / (F * F))
             + scal * m.g[i][j] for j in range(n)] for i in range(n)]


def r_hat(m: MetricJet2, f: ConformalFactorJet, curv: CurvatureData | None = None) -> Fraction:
    """Scalar curvature of F g from that of g."""
    curv = curv or curvature_from_jets(m)
    n = m.n
    _, lap, norm = _factor_invariants(m, f, curv)
    F = f.F
    return curv.R / F - (n - 1) * (lap / F ** 2 + Fraction(n - 6, 4) * norm / F ** 3)


def gamma_conformally_flat(g0: Sequence[Sequence], f: ConformalFactorJet) -> list:
    """Christoffel symbols of F g0 for constant g0."""
    return gamma_hat(MetricJet2.constant(g0), f, CurvatureData(zeros(len(g0), 3), zeros(len(g0), 4),
                                                                zeros(len(g0), 2), Fraction(0)))


# Schwarzian derivatives --------------------------------------------------------------


@dataclass
class DiffeoJet1D:
    d1: Fraction
    d2: Fraction
    d3: Fraction

    def __post_init__(self):
        self.d1, self.d2, self.d3 = _fr(self.d1), _fr(self.d2), _fr(self.d3)
        if self.d1 == 0:
            raise GeometryError("phi' must be nonzero")

    def metric_factor(self) -> ConformalFactorJet:
        """Jet of F = phi'^2, so that phi^*(dy^2) = F dx^2."""
        a, b, c = self.d1, self.d2, self.d3
        return ConformalFactorJet(a * a, [2 * a * b], [[2 * b * b + 2 * a * c]])


@dataclass
class SchwarzianTensor:
    S: object  # n x n list, or a scalar when n = 1

    def to_json(self):
        return {"S": _fmt(self.S) if isinstance(self.S, list) else format_rational(self.S)}


def schwarzian_1d(j: DiffeoJet1D) -> Fraction:
    """phi'''/phi' - 3/2 (phi''/phi')^2."""
    u = j.d2 / j.d1
    return j.d3 / j.d1 - Fraction(3, 2) * u * u


def schwarzian_from_factor_1d(f: ConformalFactorJet) -> Fraction:
    """The classical Schwarzian of phi written through F = phi'^2:
    F''/(2F) - 5/8 (F'/F)^2."""
    if f.n != 1:
        raise GeometryError("one-dimensional factor expected")
    F, F1, F2 = f.F, f.dF[0], f.ddF[0][0]
    return F2 / (2 * F) - Fraction(5, 8) * (F1 / F) ** 2


def presentation_base(m: MetricJet2, f: ConformalFactorJet) -> list:
    """The constant metric g0 with m = jets(F g0); reject anything else."""
    if f.n != m.n:
        raise GeometryError("factor and metric dimensions differ")
    g0 = [[v / f.F for v in row] for row in m.g]
    if flat_presentation(g0, f) != m:
        raise GeometryError("metric jets are not the conformally flat presentation F * g0 of this factor")
    return g0


def schwarzian_formula(f: ConformalFactorJet, m: MetricJet2) -> list:
    """(1/2F) nabla dF - (3/4F^2) dF dF + (1/8F^2) |dF|^2 g with nabla, g from m."""
    curv = curvature_from_jets(m)
    H, _, norm = _factor_invariants(m, f, curv)
    F = f.F
    n = m.n
    return [[H[i][j] / (2 * F) - Fraction(3, 4) * f.dF[i] * f.dF[j] / F ** 2 + norm * m.g[i][j] / (8 * F ** 2)
             for j in range(n)] for i in range(n)]


def schwarzian_nd(f: ConformalFactorJet, m: MetricJet2) -> SchwarzianTensor:
    """Schwarzian tensor of the presentation m = F g0.

    With g0 = F^{-1} g the formula above is applied to the factor 1/F and
    the sign is reversed.  This is the tensor for which R = -2 g^{ij} S_ij
    holds and which gives the classical Schwarzian of phi when n = 1 and
    F = phi'^2.
    """
    presentation_base(m, f)
    S = [[-v for v in row] for row in schwarzian_formula(f.reciprocal(), m)]
    if m.n == 1:
        return SchwarzianTensor(S[0][0])
    return SchwarzianTensor(S)


def sphere_factor(n: int) -> ConformalFactorJet:
    """Stereographic chart of the unit sphere at the origin: F = 4/(1+|x|^2)^2."""
    return ConformalFactorJet(4, [0] * n, [[-16 if i == j else 0 for j in range(n)] for i in range(n)])


def hyperbolic_factor(n: int) -> ConformalFactorJet:
    """Ball model of hyperbolic space at the origin: F = 4/(1-|x|^2)^2."""
    return ConformalFactorJet(4, [0] * n, [[16 if i == j else 0 for j in range(n)] for i in range(n)])


def exponential_factor() -> ConformalFactorJet:
    """F = phi'^2 for phi = e^x at x = 0."""
    return ConformalFactorJet(1, [2], [[4]])
