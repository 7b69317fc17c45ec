"""Verification suites shared by the test-suite and the command line."""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import curved, geometry
from . import invariants as inv
from .coefficients import (Weights, coefficients, gauge_fix_1d, is_resonant,
                           solve_equivariance_system, the_solution)
from .flat import (QuantizationParams, Symbol2, equivariance_residual, formal_adjoint, quantize_ansatz,
                   quantize_components)
from .poly import FlatMetric, Poly, exponent_tuples

DEFAULT_SEED = 20240611
SUITES = ("equivariance", "commutators", "ideal", "system", "adjoint", "conformal-invariance",
          "curvature-transforms", "agreement")
HALF = Fraction(1, 2)
SUITE_WEIGHTS = ((HALF, HALF), (Fraction(1, 3), Fraction(3, 4)))


def default_seed() -> int:
    env = os.environ.get("CONFQUANT_SEED")
    return int(env) if env not in (None, "") else DEFAULT_SEED


@dataclass
class VerifyReport:
    suite: str
    cases_run: int = 0
    failures: list = field(default_factory=list)
    seed: int = DEFAULT_SEED
    elapsed: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, case: str, residual) -> None:
        self.failures.append({"case": case, "residual": str(residual)})

    def check(self, case: str, residual) -> None:
        """Count one case; record it when the residual is not exactly zero."""
        self.cases_run += 1
        if _nonzero(residual):
            self.fail(case, _summary(residual))

    def to_json(self) -> dict:
        return {"suite": self.suite, "cases_run": self.cases_run, "failures": list(self.failures),
                "seed": self.seed, "elapsed": round(self.elapsed, 3), "notes": list(self.notes)}


def _nonzero(r) -> bool:
    if isinstance(r, bool):
        return not r
    if hasattr(r, "is_zero"):
        return not r.is_zero()
    return r != 0


def _summary(r) -> str:
    text = str(r.to_json()) if hasattr(r, "to_json") and not isinstance(r, Poly) else str(r)
    return text if len(text) <= 200 else text[:197] + "..."


# random data -------------------------------------------------------------------------


def signatures(n: int) -> list[tuple[int, int]]:
    return [(n - q, q) for q in range(0, n // 2 + 1)]


def random_poly(rng: random.Random, n: int, max_x: int = 3, max_xi: int = 2, terms: int = 6) -> Poly:
    out = Poly.zero(n)
    for _ in range(terms):
        xe = tuple(rng.randint(0, max_x) for _ in range(n))
        while sum(xe) > max_x:
            xe = tuple(max(0, e - 1) for e in xe)
        xie = rng.choice([e for k in range(max_xi + 1) for e in exponent_tuples(n, k)])
        c = curved.random_rational(rng, 5, 4)
        out = out + Poly.monomial(n, xe, xie, c)
    return out


def random_weights(rng: random.Random, n: int) -> Weights:
    while True:
        lam = curved.random_rational(rng, 5, 5)
        mu = curved.random_rational(rng, 5, 5)
        if not is_resonant(n, mu - lam) and not (n == 1 and mu - lam == 3):
            return Weights(n, n, 0, lam, mu)


def monomial_symbols(n: int, max_x: int = 3) -> list[Poly]:
    return [Poly.monomial(n, xe, xie) for xd in range(max_x + 1) for xe in exponent_tuples(n, xd)
            for k in range(3) for xie in exponent_tuples(n, k)]


def random_operator(rng: random.Random, n: int, max_x: int = 3) -> inv.DiffOperator2:
    """A random operator of order <= 2 with polynomial coefficients."""
    return inv.DiffOperator2.from_poly(random_poly(rng, n, max_x, 2, terms=6))


# suites ------------------------------------------------------------------------------


def suite_equivariance(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for p, q in signatures(n):
            for lam, mu in SUITE_WEIGHTS:
                w = Weights(n, p, q, lam, mu)
                params = QuantizationParams(w)
                cs = params.coefficient_set()
                gens = inv.conformal_generators(w.metric)
                for P in monomial_symbols(n, max_degree):
                    s = Symbol2(P, w)
                    for X in gens:
                        rep.check(f"n={n} sig=({p},{q}) w=({lam},{mu}) {X.ident} P={P}",
                                  equivariance_residual(params, X, s, cs))


def suite_agreement(rep: VerifyReport, rng, ns, max_degree):
    """Component formula vs invariant-operator Ansatz, and curved vs flat at a point."""
    for n in ns:
        for p, q in signatures(n):
            for lam, mu in SUITE_WEIGHTS:
                w = Weights(n, p, q, lam, mu)
                params = QuantizationParams(w)
                cs = params.coefficient_set()
                for P in monomial_symbols(n, max_degree):
                    s = Symbol2(P, w)
                    rep.check(f"ansatz n={n} sig=({p},{q}) w=({lam},{mu}) P={P}",
                              quantize_components(params, s, cs) - quantize_ansatz(params, s, cs))
                for k in range(3):
                    f = curved.random_factor_jet(rng, n)
                    m = geometry.flat_presentation(w.metric.matrix(), f)
                    sj = curved.random_symbol_jet(rng, n)
                    got = curved.quantize_point(w, m, sj, f, cs)
                    rep.check(f"curved-vs-flat n={n} sig=({p},{q}) w=({lam},{mu}) #{k}",
                              got - curved.flat_point_operator(w, sj, cs))


def suite_commutators(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for p, q in signatures(n):
            m = FlatMetric(p, q)
            D, G, L = (inv.invariant_action(t, m) for t in ("D", "G", "L"))
            euclid = inv.euclidean_generators(m)
            for k in range(10):
                P = random_poly(rng, n, max_degree)
                delta = curved.random_rational(rng, 3, 3)
                for rel in inv.COMMUTATION_RELATIONS:
                    rep.check(f"{rel} n={n} sig=({p},{q}) delta={delta} #{k}",
                              inv.commutation_residual(rel, delta, m, P))
                rep.check(f"[D,G]=L n={n} #{k}", inv.bracket(D, G)(P) - L(P))
                rep.check(f"[L,G]=0 n={n} #{k}", inv.bracket(L, G)(P))
                rep.check(f"[L,D]=0 n={n} #{k}", inv.bracket(L, D)(P))
                for tag in ("R", "E", "T", "G", "D", "L"):
                    for X in euclid:
                        lhs = inv.apply_invariant(tag, m, inv.lie_symbol(X, 0, P))
                        rep.check(f"{tag} commutes with {X.ident} n={n} #{k}",
                                  lhs - inv.lie_symbol(X, 0, inv.apply_invariant(tag, m, P)))
                lam, mu = curved.random_rational(rng, 3, 3), curved.random_rational(rng, 3, 3)
                A = random_operator(rng, n, max_degree)
                per_r = inv.inversion_action_formula(m, lam, mu, A)
                for r, Ar in enumerate(per_r, start=1):
                    X = inv.VectorFieldGenerator("inversion", (r,), m)
                    rep.check(f"inversion lemma r={r} n={n} #{k}", Ar - inv.lie_operator_defn(X, lam, mu, A))


def suite_ideal(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        m = FlatMetric(n, 0)
        if n == 2:
            for k in range(30):
                P = random_poly(rng, n, max_degree)
                rep.check(f"Z(P)=0 n=2 #{k}", inv.ideal_generator_Z(m, P))
            continue
        rep.cases_run += 1
        witness = None
        for P in monomial_symbols(n, 2):
            z = inv.ideal_generator_Z(m, P)
            if not z.is_zero():
                witness = (P, z)
                break
        if witness is None:
            rep.fail(f"n={n}", "no nonzero witness for Z found")
        else:
            rep.notes.append(f"nonzero witness found at n={n}: Z({witness[0]}) = {witness[1]}")


def suite_system(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for k in range(10):
            w = random_weights(rng, n)
            sol = solve_equivariance_system(w)
            closed = the_solution(n, w.lam, w.mu)
            want = gauge_fix_1d(closed) if n == 1 else closed
            rep.check(f"system n={n} w=({w.lam},{w.mu})", sol.kind == "unique" and sol.gammas == want)
            cs = coefficients(w)
            lhs_rows = [list(map(Fraction, row)) for row in _system_rows(w)]
            resid = [sum(a * g for a, g in zip(row, closed)) - b for row, b in zip(lhs_rows, _system_rhs(w))]
            rep.check(f"closed form solves the 5x5 system n={n} w=({w.lam},{w.mu})", all(v == 0 for v in resid))
            rep.check(f"coefficient set n={n} w=({w.lam},{w.mu})", cs.gammas == want)


def _system_rows(w):
    from .coefficients import the_system
    return the_system(w.n, w.lam, w.mu)[0]


def _system_rhs(w):
    from .coefficients import the_system
    return the_system(w.n, w.lam, w.mu)[1]


def suite_adjoint(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for p, q in signatures(n):
            for lam in (Fraction(0), Fraction(1, 4), HALF):
                w = Weights(n, p, q, lam, 1 - lam)
                for hbar in (Fraction(1), Fraction(2, 3)):
                    params = QuantizationParams(w, hbar=hbar, free_value=Fraction(0))
                    for k in range(4):
                        P = random_poly(rng, n, max_degree)
                        A = quantize_components(params, Symbol2(P, w))
                        rep.check(f"adjoint n={n} sig=({p},{q}) lam={lam} hbar={hbar} #{k}", formal_adjoint(A) - A)
            # a pair off the line lam + mu = 1 must break self-adjointness
            w = Weights(n, p, q, Fraction(1, 3), Fraction(3, 4))
            params = QuantizationParams(w, hbar=Fraction(1))
            rep.cases_run += 1
            found = False
            for P in monomial_symbols(n, 2):
                A = quantize_components(params, Symbol2(P, w))
                if not (formal_adjoint(A) - A).is_zero():
                    rep.notes.append(f"violation witness off lam+mu=1 at n={n}: P = {P}")
                    found = True
                    break
            if not found:
                rep.fail(f"no adjoint violation witness n={n}", "all zero")


def suite_conformal_invariance(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for p, q in signatures(n):
            for lam, mu in SUITE_WEIGHTS:
                w = Weights(n, p, q, lam, mu)
                cs = coefficients(w)
                for k in range(4 if n >= 3 else 6):
                    f = curved.random_factor_jet(rng, n)
                    s = curved.random_symbol_jet(rng, n)
                    if n >= 3:
                        m = curved.random_metric_jet(rng, n, q)
                        r = curved.conformal_invariance_residual(w, m, f, s, cs)
                    else:
                        f0 = curved.random_factor_jet(rng, n)
                        m = geometry.flat_presentation(w.metric.matrix(), f0)
                        r = curved.conformal_invariance_residual(w, m, f, s, cs, presentation=f0)
                    rep.check(f"n={n} sig=({p},{q}) w=({lam},{mu}) #{k}", r)


def suite_curvature_transforms(rep: VerifyReport, rng, ns, max_degree):
    for n in ns:
        for q in range(0, n // 2 + 1):
            for k in range(5):
                m = curved.random_metric_jet(rng, n, q)
                f = curved.random_factor_jet(rng, n)
                direct = geometry.curvature_from_jets(geometry.conformal_rescale(m, f))
                curv = geometry.curvature_from_jets(m)
                tag = f"n={n} q={q} #{k}"
                rep.check(f"Gamma-hat {tag}", geometry.gamma_hat(m, f, curv) == direct.Gamma)
                rep.check(f"Ricci-hat {tag}", geometry.ricci_hat(m, f, curv) == direct.Ric)
                rep.check(f"R-hat {tag}", geometry.r_hat(m, f, curv) - direct.R)
                if n == 2:
                    g0 = FlatMetric(n - q, q).matrix()
                    pm = geometry.flat_presentation(g0, f)
                    S = geometry.schwarzian_nd(f, pm).S
                    gi = pm.ginv
                    tr = sum(gi[i][j] * S[i][j] for i in range(n) for j in range(n))
                    rep.check(f"trace identity {tag}", geometry.curvature_from_jets(pm).R + 2 * tr)


_SUITES: dict[str, tuple[Callable, tuple]] = {
    "equivariance": (suite_equivariance, (1, 2, 3)),
    "agreement": (suite_agreement, (1, 2, 3)),
    "commutators": (suite_commutators, (2, 3)),
    "ideal": (suite_ideal, (2, 3)),
    "system": (suite_system, (1, 2, 3, 4)),
    "adjoint": (suite_adjoint, (1, 2)),
    "conformal-invariance": (suite_conformal_invariance, (1, 2, 3, 4)),
    "curvature-transforms": (suite_curvature_transforms, (2, 3, 4)),
}


def run_suite(name: str, n: int | None = None, seed: int | None = None, max_degree: int | None = None) -> VerifyReport:
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    if n is not None and n < 1:
        raise ValueError("n must be >= 1")
    seed = default_seed() if seed is None else seed
    fn, default_ns = _SUITES[name]
    ns = (n,) if n is not None else default_ns
    rep = VerifyReport(name, seed=seed)
    rng = random.Random(seed)
    start = time.perf_counter()
    fn(rep, rng, ns, 3 if max_degree is None else max_degree)
    rep.elapsed = time.perf_counter() - start
    return rep
