"""Quantization on flat R^{p,q}: two independent constructions and their checks.

Densities are trivialized by |dx^1 ... dx^n| so symbols, operators and
densities are plain polynomials; operators are identified with symbols by
writing xi_i for d/dx^i (normal ordering).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import invariants as inv
from .coefficients import (CoefficientSet, UnresolvedResonanceError, Weights, coefficients,
                           first_order_coefficients)
from .invariants import Action, DiffOperator2, VectorField
from .poly import Poly
from .scalar import ExactScalar, format_rational


@dataclass(frozen=True)
class Symbol2:
    P: Poly
    weights: Weights

    def __post_init__(self):
        if self.P.n != self.weights.n:
            raise ValueError("symbol dimension differs from weights")
        if self.P.xi_degree() > 2:
            raise ValueError("symbols must have xi-degree <= 2")

    def part(self, k: int) -> Poly:
        return self.P.homogeneous(k)

    def to_json(self) -> dict:
        out = self.P.to_json()
        out["weights"] = self.weights.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Symbol2":
        return cls(Poly.from_json(obj), Weights.from_json(obj["weights"]))


@dataclass(frozen=True)
class QuantizationParams:
    """Weights plus the optional Planck constant and resonance data.

    ``free_value`` fixes the free parameter of a resonant family; ``alpha``
    fixes the free first-order coefficient at delta = 1.
    """

    weights: Weights
    hbar: Optional[Fraction] = None
    free_value: Optional[Fraction] = None
    pin_by_symmetry: bool = True
    alpha: Optional[Fraction] = None

    def coefficient_set(self) -> CoefficientSet:
        return coefficients(self.weights, self.free_value, self.pin_by_symmetry)


def apply_hbar(s: Symbol2, hbar) -> Symbol2:
    """Multiply the degree-k part by (i hbar)^k."""
    ih = ExactScalar(0, Fraction(hbar))
    P = s.part(0) + s.part(1).scale(ih) + s.part(2).scale(ih * ih)
    return Symbol2(P, s.weights)


def _first_order_only(s: Symbol2) -> bool:
    return s.P.xi_degree() <= 1


def resolve_coefficients(params: QuantizationParams, s: Symbol2) -> CoefficientSet:
    """The coefficient set to use for this symbol, handling delta = 1 at first order."""
    w = params.weights
    if w.delta == 1 and _first_order_only(s):
        alpha = params.alpha
        if alpha is None and params.pin_by_symmetry and w.lam + w.mu == 1:
            alpha = Fraction(1, 2)
        a = first_order_coefficients(w, alpha)
        zero = Fraction(0)
        return CoefficientSet(w, alpha=a, gammas=[zero, a, zero, zero, zero], resonant=True,
                              free_parameter={"name": "alpha", "value": a})
    cs = params.coefficient_set()
    if not cs.resolved:
        raise UnresolvedResonanceError(
            f"resonant family at delta = {format_rational(w.delta)} needs a free value "
            f"for {cs.family['free']}")
    return cs


def _prepared(params: QuantizationParams, s: Symbol2) -> Symbol2:
    if s.weights != params.weights:
        raise ValueError("symbol weights differ from quantization weights")
    return apply_hbar(s, params.hbar) if params.hbar is not None else s


def quantize_components(params: QuantizationParams, s: Symbol2,
                        coeffs: CoefficientSet | None = None) -> DiffOperator2:
    """Component formula: A2 = P2, A1 and A0 from alpha and beta1..beta4."""
    cs = coeffs if coeffs is not None else resolve_coefficients(params, s)
    s = _prepared(params, s)
    m = s.weights.metric
    n = m.n
    P2 = DiffOperator2.from_poly(s.part(2)).A2
    P1 = DiffOperator2.from_poly(s.part(1)).A1
    P0 = s.part(0)
    alpha = cs.alpha
    b1, b2, b3, b4 = (cs.betas.get(f"beta{k}", Fraction(0)) or Fraction(0) for k in range(1, 5))
    trace = Poly.zero(n)
    for k in range(n):
        trace = trace + P2[k][k].scale(m.sign(k))
    A1 = []
    for i in range(n):
        div = Poly.zero(n)
        for j in range(n):
            div = div + P2[i][j].diff_var(j)
        A1.append(P1[i] + div.scale(b1) + trace.diff_var(i).scale(b2 * m.sign(i)))
    A0 = P0
    for i in range(n):
        A0 = A0 + P1[i].diff_var(i).scale(alpha)
        A0 = A0 + trace.diff_var(i, 2).scale(b4 * m.sign(i))
        for j in range(n):
            A0 = A0 + P2[i][j].diff_var(i).diff_var(j).scale(b3)
    return DiffOperator2(P2, A1, A0)


def ansatz_action(m, gammas) -> Action:
    """Id + g1 G0 + g2 D + g3 Eu D + g4 L0 + g5 D^2 as an action on symbols."""
    G0, D, Eu, L0 = (inv.invariant_action(t, m) for t in ("G0", "D", "Euler", "L0"))
    ops = [G0, D, Eu @ D, L0, D @ D]
    Q = inv.identity()
    for g, op in zip(gammas, ops):
        if g:
            Q = Q + Fraction(g) * op
    return Q


def quantize_ansatz(params: QuantizationParams, s: Symbol2,
                    coeffs: CoefficientSet | None = None) -> DiffOperator2:
    """Invariant-operator construction, read off through the normal ordering."""
    cs = coeffs if coeffs is not None else resolve_coefficients(params, s)
    s = _prepared(params, s)
    Q = ansatz_action(s.weights.metric, cs.gammas)
    return DiffOperator2.from_poly(Q(s.P))


def apply_operator(A: DiffOperator2, f: Poly) -> Poly:
    return A.apply(f)


def equivariance_residual(params: QuantizationParams, X: VectorField, s: Symbol2,
                          coeffs: CoefficientSet | None = None) -> DiffOperator2:
    """Q(L^delta_X P) - L^{lam,mu}_X(Q(P)); zero iff Q intertwines X on P."""
    w = params.weights
    cs = coeffs if coeffs is not None else resolve_coefficients(params, s)
    moved = Symbol2(inv.lie_symbol(X, w.delta, s.P), w)
    lhs = quantize_components(params, moved, cs)
    rhs = inv.lie_operator_defn(X, w.lam, w.mu, quantize_components(params, s, cs))
    return lhs - rhs


def equation_rhs_action(m, lam) -> Action:
    """(-1/2 R T (Eu - 1) + 2 Eu + 2(n lam - 1)) Eu."""
    R, T, Eu = (inv.invariant_action(t, m) for t in ("R", "T", "Euler"))
    inner = Fraction(-1, 2) * (R @ T @ (Eu - inv.scalar(1))) + 2 * Eu + inv.scalar(2 * (m.n * Fraction(lam) - 1))
    return inner @ Eu


def equivariance_equation_residual(params: QuantizationParams, s: Symbol2,
                                   gammas=None) -> Poly:
    """[Q, L^delta_Xbar] - (-1/2 R T (Eu-1) + 2 Eu + 2(n lam - 1)) Eu Q applied to P."""
    w = params.weights
    m = w.metric
    if gammas is None:
        gammas = resolve_coefficients(params, s).gammas
    Q = ansatz_action(m, gammas)
    lhs = inv.contracted_commutator(m, Q, w.delta, s.P)
    return lhs - equation_rhs_action(m, w.lam)(Q(s.P))


def formal_adjoint(A: DiffOperator2) -> DiffOperator2:
    """Adjoint for the pairing of lam- and (1-lam)-densities in the flat chart."""
    return DiffOperator2.from_poly(inv.formal_adjoint_poly(A.to_poly()))


def mutate(cs: CoefficientSet, name: str, delta=1) -> CoefficientSet:
    """A copy of ``cs`` with one coefficient shifted, keeping both encodings in step."""
    new = dataclasses.replace(cs, betas=dict(cs.betas), gammas=list(cs.gammas))
    delta = Fraction(delta)
    if name == "alpha":
        new.alpha = cs.alpha + delta
        new.gammas[1] += delta
        new.gammas[2] -= delta  # keep beta1 = 2(g2 + g3)
    elif name.startswith("beta"):
        k = int(name[4:])
        new.betas[name] = (cs.betas.get(name) or 0) + delta
        if k == 1:
            new.gammas[2] += delta / 2
        elif k == 2:
            new.gammas[0] += delta / 2
        elif k == 3:
            new.gammas[4] += delta / 2
        elif k == 4:
            new.gammas[3] += delta / 2
    elif name.startswith("gamma"):
        k = int(name[5:]) - 1
        new.gammas[k] += delta
    else:
        raise ValueError(f"unknown coefficient {name!r}")
    return new
