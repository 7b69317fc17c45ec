"""Coefficients of the conformally equivariant quantization map.

The map on symbols of degree <= 2 is  Id + g1 G0 + g2 D + g3 Eu D + g4 L0 + g5 D^2
(the ``gammas``).  In components it reads
  A1 = P1 + b1 d_j P2^{ij} + b2 g^{ij} g_kl d_j P2^{kl}
  A0 = P0 + alpha d_i P1^i + b3 d_ij P2^{ij} + b4 g^{ij} g_kl d_ij P2^{kl}
with alpha = g2, b1 = 2(g2 + g3), b2 = 2 g1, b3 = 2 g5, b4 = 2 g4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import SolutionSet, UPoly, solve, special_parameter_values
from .poly import FlatMetric
from .scalar import format_rational, parse_rational

GAMMA_NAMES = ("gamma1", "gamma2", "gamma3", "gamma4", "gamma5")
BETA_NAMES = ("beta1", "beta2", "beta3", "beta4", "beta5", "beta6")


class ResonanceError(ValueError):
    """Closed forms requested at a resonant shift."""


class InadmissiblePairError(ValueError):
    """A resonant shift with weights outside the admissible list."""

    def __init__(self, msg, admissible=()):
        super().__init__(msg)
        self.admissible = list(admissible)


class UnresolvedResonanceError(ValueError):
    """A resonant family whose free parameter has not been fixed."""


@dataclass(frozen=True)
class Weights:
    n: int
    p: int
    q: int
    lam: Fraction
    mu: Fraction

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.p < 0 or self.q < 0 or self.p + self.q != self.n:
            raise ValueError(f"signature ({self.p},{self.q}) does not match n={self.n}")
        object.__setattr__(self, "lam", parse_rational(self.lam))
        object.__setattr__(self, "mu", parse_rational(self.mu))

    @classmethod
    def of(cls, lam, mu, p: int, q: int = 0) -> "Weights":
        return cls(p + q, p, q, lam, mu)

    @property
    def delta(self) -> Fraction:
        return self.mu - self.lam

    @property
    def metric(self) -> FlatMetric:
        return FlatMetric(self.p, self.q)

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "q": self.q,
                "lambda": format_rational(self.lam), "mu": format_rational(self.mu)}

    @classmethod
    def from_json(cls, obj: dict) -> "Weights":
        n = int(obj["n"])
        p = int(obj.get("p", n))
        q = int(obj.get("q", n - p))
        return cls(n, p, q, obj["lambda"], obj["mu"])


# resonances --------------------------------------------------------------------


def resonant_deltas(n: int) -> list[Fraction]:
    """Shifts where the equivariant map fails to exist or to be unique."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return [Fraction(1), Fraction(3, 2), Fraction(2)]
    return sorted({Fraction(2, n), Fraction(n + 2, 2 * n), Fraction(1),
                   Fraction(n + 1, n), Fraction(n + 2, n)})


def is_resonant(n: int, delta) -> bool:
    return Fraction(delta) in resonant_deltas(n)


def generic_denominators(n: int, delta) -> list[Fraction]:
    """Factors that the closed forms divide by."""
    d = Fraction(delta)
    if n == 1:
        return [1 - d, 2 - d, 3 - 2 * d]
    return [1 - d, 2 + n * (1 - d), 1 + n * (1 - d), 2 + n * (1 - 2 * d), 2 - n * d]


# the linear system -------------------------------------------------------------------


def the_system(n: int, lam, mu) -> tuple[list[list], list]:
    """Equivariance conditions on (g1..g5); entries may be Fractions or UPolys."""
    delta = mu - lam
    a = 2 + n * (1 - delta)
    A = [
        [2 - n * delta, -1, -1, 0, 0],
        [-n * lam, 0, 0, n * (1 - 2 * delta) + 2, -1],
        [0, -n * lam, -n * lam, 0, 2 * (n * (1 - delta) + 1)],
        [0, 1 - delta, 0, 0, 0],
        [0, a, a, 0, 0],
    ]
    b = [Fraction(-1, 2), 0, 0, lam, n * lam + 1]
    return A, b


def one_dim_system(lam, mu) -> tuple[list[list], list]:
    """The n = 1 conditions on (g2, g3, g5) with g1 = g4 = 0.

    In one dimension G0 = Eu D and L0 = D^2 on symbols of degree <= 2, so only
    g2, g1 + g3 and g4 + g5 matter; the gauge g1 = g4 = 0 picks a representative.
    """
    delta = mu - lam
    A = [
        [1 - delta, 0, 0],
        [2 * (2 - delta), 2 * (2 - delta), 0],
        [-2 * lam, -2 * lam, 2 * (3 - 2 * delta)],
    ]
    b = [lam, 2 * lam + 1, 0]
    return A, b


def _embed_1d(v):
    return [Fraction(0), v[0], v[1], Fraction(0), v[2]]


def gauge_fix_1d(gammas: Sequence) -> list[Fraction]:
    """The n = 1 representative (0, g2, g1 + g3, 0, g4 + g5) of a gamma vector."""
    g = [Fraction(v) for v in gammas]
    return [Fraction(0), g[1], g[0] + g[2], Fraction(0), g[3] + g[4]]


@dataclass
class EquivarianceSolution:
    weights: "Weights"
    kind: str  # unique | none | family
    gammas: Optional[list] = None
    nullspace: list = field(default_factory=list)
    free_parameter: Optional[str] = None
    # lambda-free mode
    lambda_free: bool = False
    generic: Optional[bool] = None
    lambdas: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "weights": self.weights.to_json()}
        if self.lambda_free:
            out.update(lambda_free=True, generic_lambda_admissible=self.generic,
                       lambdas=[format_rational(v) for v in self.lambdas])
            return out
        if self.gammas is not None:
            out["gammas"] = dict(zip(GAMMA_NAMES, (format_rational(v) for v in self.gammas)))
        out["nullspace"] = [[format_rational(v) for v in b] for b in self.nullspace]
        out["free_parameter"] = self.free_parameter
        return out


def _system_for(n, lam, mu):
    if n == 1:
        return one_dim_system(lam, mu)
    return the_system(n, lam, mu)


def _solve_at(n, lam, mu) -> SolutionSet:
    A, b = _system_for(n, lam, mu)
    s = solve(A, b)
    if n == 1 and s.kind != "none":
        s = SolutionSet(s.kind, _embed_1d(s.particular), [_embed_1d(v) for v in s.nullspace], s.rank)
    return s


def _free_name(delta, nullspace) -> Optional[str]:
    if len(nullspace) != 1:
        return None
    order = (2, 1, 3, 4, 0) if delta == 1 else (3, 2, 4, 1, 0)
    for k in order:
        if nullspace[0][k] != 0:
            return GAMMA_NAMES[k]
    return None


def solve_equivariance_system(w: Weights, lambda_free: bool = False) -> EquivarianceSolution:
    """Solve the equivariance conditions exactly.

    With ``lambda_free`` the shift delta = mu - lam is held fixed and lam is
    treated as unknown; the result lists the lam values admitting a solution.
    """
    n, delta = w.n, w.delta
    if not lambda_free:
        s = _solve_at(n, w.lam, w.mu)
        return EquivarianceSolution(w, s.kind, s.particular, s.nullspace, _free_name(delta, s.nullspace))
    t = UPoly.var()
    A, b = _system_for(n, t, t + delta)
    generic, candidates = special_parameter_values(A, b)
    lambdas = [lam for lam in candidates if _solve_at(n, lam, lam + delta).kind != "none"]
    return EquivarianceSolution(w, "lambda_free", lambda_free=True, generic=generic, lambdas=lambdas)


@dataclass(frozen=True)
class ResonanceSlice:
    n: int
    delta: Fraction
    resonant: bool
    pairs: tuple


@dataclass(frozen=True)
class ResonanceReport:
    n: int
    resonant_deltas: tuple
    pairs: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "resonant_deltas": [format_rational(d) for d in self.resonant_deltas],
            "pairs": {format_rational(d): [[format_rational(a), format_rational(b)] for a, b in ps]
                      for d, ps in self.pairs.items()},
        }


def classify_resonance(n: int, delta) -> ResonanceSlice:
    """Resonance membership and, if resonant, the admissible weights found by the lam-free solve."""
    if n < 1:
        raise ValueError("n must be >= 1")
    delta = Fraction(delta)
    if not is_resonant(n, delta):
        return ResonanceSlice(n, delta, False, ())
    sol = solve_equivariance_system(Weights(n, n, 0, 0, delta), lambda_free=True)
    if sol.generic:
        raise AssertionError(f"shift {delta} is listed as resonant but the system is generically solvable")
    return ResonanceSlice(n, delta, True, tuple((lam, lam + delta) for lam in sol.lambdas))


def resonance_report(n: int) -> ResonanceReport:
    deltas = resonant_deltas(n)
    return ResonanceReport(n, tuple(deltas), {d: classify_resonance(n, d).pairs for d in deltas})


# closed forms -----------------------------------------------------------------------


def _resonance_guard(n, lam, mu):
    if is_resonant(n, mu - lam):
        raise ResonanceError(f"delta = {format_rational(mu - lam)} is resonant for n = {n}; "
                             "use resonant_coefficients")


def alpha_value(n, lam, mu) -> Fraction:
    lam, mu = Fraction(lam), Fraction(mu)
    delta = mu - lam
    if delta == 1:
        raise ResonanceError("alpha is undetermined at delta = 1")
    return lam / (1 - delta)


def beta14(n, lam, mu) -> list[Fraction]:
    lam, mu = Fraction(lam), Fraction(mu)
    if n == 1:
        c1, c0 = one_dim_coefficients(lam, mu)
        return [c1, Fraction(0), c0, Fraction(0)]
    _resonance_guard(n, lam, mu)
    d = mu - lam
    b1 = 2 * (n * lam + 1) / (2 + n * (1 - d))
    b2 = n * (lam + mu - 1) / ((2 + n * (1 - d)) * (2 - n * d))
    b3 = n * lam * (n * lam + 1) / ((1 + n * (1 - d)) * (2 + n * (1 - d)))
    b4 = (n * lam * (n * n * mu * (2 - lam - mu) + 2 * (n * lam + 1) ** 2 - n * (n + 1))
          / ((1 + n * (1 - d)) * (2 + n * (1 - d)) * (2 + n * (1 - 2 * d)) * (2 - n * d)))
    return [b1, b2, b3, b4]


def beta56(n, lam, mu) -> list[Fraction]:
    """Ricci and scalar-curvature coefficients (n >= 3)."""
    if n < 3:
        raise ValueError("beta5, beta6 are defined only for n >= 3")
    lam, mu = Fraction(lam), Fraction(mu)
    d = mu - lam
    num = n * n * lam * (mu - 1)
    den5 = (n - 2) * (1 + n * (1 - d))
    den6 = (n - 1) * (n - 2) * (1 + n * (1 - d)) * (2 + n * (1 - 2 * d))
    if den5 == 0 or den6 == 0:
        raise ResonanceError("beta5/beta6 closed forms divide by zero at these weights")
    return [num / den5, num * (n * d - 2) / den6]


def one_dim_coefficients(lam, mu) -> tuple[Fraction, Fraction]:
    """(c1, c0): A1 = P1 + c1 P2', A0 = P0 + alpha P1' + c0 P2'' in one dimension."""
    lam, mu = Fraction(lam), Fraction(mu)
    d = mu - lam
    if d in (Fraction(3, 2), Fraction(2)):
        raise ResonanceError(f"delta = {format_rational(d)} is resonant for n = 1")
    return (2 * lam + 1) / (2 - d), lam * (2 * lam + 1) / ((3 - 2 * d) * (2 - d))


def the_solution(n, lam, mu) -> list[Fraction]:
    """Closed-form gammas off resonance (valid for every n >= 1)."""
    lam, mu = Fraction(lam), Fraction(mu)
    d = mu - lam
    try:
        g1 = n * (lam + mu - 1) / (2 * (n * d - 2) * (n * (d - 1) - 2))
        g2 = lam / (1 - d)
        g3 = (1 - lam - mu) / ((d - 1) * (n * (d - 1) - 2))
        g4 = (n * lam * (2 + (4 * lam - 1) * n + (2 * lam ** 2 - lam * mu - mu ** 2 + 2 * mu - 1) * n ** 2)
              / (2 * (n * (d - 1) - 1) * (n * (2 * d - 1) - 2) * (n * d - 2) * (n * (d - 1) - 2)))
        g5 = n * lam * (n * lam + 1) / (2 * (n * (d - 1) - 1) * (n * (d - 1) - 2))
    except ZeroDivisionError:
        raise ResonanceError(f"closed-form gammas divide by zero at delta = {format_rational(d)}") from None
    return [g1, g2, g3, g4, g5]


def curvature_constant(n, lam, mu) -> Optional[Fraction]:
    """Scalar-curvature coefficient C of the quantized geodesic Hamiltonian.

    Where the closed form is 0/0 on the symmetric line lam + mu = 1 (n = 2,
    weights (0, 1)) the limit along that line is returned; None when undefined.
    """
    if n < 2:
        return None
    lam, mu = Fraction(lam), Fraction(mu)
    d = mu - lam
    den = (n - 1) * (n + 2 - 2 * n * d)
    num = n * n * lam * (mu - 1)
    if den != 0:
        return num / den
    if num == 0 and lam + mu == 1:
        # -n^2 lam^2 / ((n-1)(2 - n + 4 n lam)) along mu = 1 - lam
        if n == 2:
            return -lam / 2
        den_sym = (n - 1) * (2 - n + 4 * n * lam)
        if den_sym != 0:
            return -n * n * lam * lam / den_sym
    return None


def gammas_to_components(gammas: Sequence) -> dict:
    g1, g2, g3, g4, g5 = (Fraction(v) for v in gammas)
    return {"alpha": g2, "beta1": 2 * (g2 + g3), "beta2": 2 * g1, "beta3": 2 * g5, "beta4": 2 * g4}


# coefficient sets -------------------------------------------------------------------


@dataclass
class CoefficientSet:
    weights: Weights
    alpha: Optional[Fraction] = None
    betas: dict = field(default_factory=dict)
    gammas: Optional[list] = None
    C: Optional[Fraction] = None
    resonant: bool = False
    free_parameter: Optional[dict] = None
    inapplicable: dict = field(default_factory=dict)
    family: Optional[dict] = None

    @property
    def resolved(self) -> bool:
        return self.gammas is not None

    def beta(self, k: int) -> Optional[Fraction]:
        return self.betas.get(f"beta{k}")

    def require_resolved(self) -> "CoefficientSet":
        if not self.resolved:
            raise UnresolvedResonanceError(
                f"resonant weights {self.weights.to_json()} leave "
                f"{(self.family or {}).get('free', 'a parameter')} free; supply a free value")
        return self

    def to_json(self) -> dict:
        def fmt(v):
            return None if v is None else format_rational(v)

        out = {"weights": self.weights.to_json(), "delta": format_rational(self.weights.delta),
               "resonant": self.resonant, "alpha": fmt(self.alpha)}
        for name in BETA_NAMES:
            out[name] = fmt(self.betas.get(name))
        for k, name in enumerate(GAMMA_NAMES):
            out[name] = fmt(self.gammas[k]) if self.gammas else None
        out["C"] = fmt(self.C)
        out["free_parameter"] = (None if self.free_parameter is None else
                                 {"name": self.free_parameter["name"],
                                  "value": fmt(self.free_parameter.get("value"))})
        out["inapplicable"] = dict(self.inapplicable)
        if self.family is not None:
            out["family"] = {
                "particular": [fmt(v) for v in self.family["particular"]],
                "nullspace": [[fmt(v) for v in b] for b in self.family["nullspace"]],
                "free": self.family.get("free"),
                "admissible_pairs": [[fmt(a), fmt(b)] for a, b in self.family.get("admissible", [])],
            }
        return out


def _fill_from_gammas(cs: CoefficientSet, gammas: list):
    n, lam, mu = cs.weights.n, cs.weights.lam, cs.weights.mu
    cs.gammas = list(gammas)
    comp = gammas_to_components(gammas)
    cs.alpha = comp["alpha"]
    for k in range(1, 5):
        cs.betas[f"beta{k}"] = comp[f"beta{k}"]
    if n >= 3:
        try:
            cs.betas["beta5"], cs.betas["beta6"] = beta56(n, lam, mu)
        except ResonanceError:
            cs.inapplicable["beta5"] = cs.inapplicable["beta6"] = "closed form is 0/0 at these weights"
    else:
        reason = "replaced by the Schwarzian term for n <= 2"
        cs.inapplicable["beta5"] = cs.inapplicable["beta6"] = reason
    cs.C = curvature_constant(n, lam, mu)
    if cs.C is None:
        cs.inapplicable["C"] = "n = 1" if n == 1 else "closed form undefined at these weights"


def generic_coefficients(w: Weights) -> CoefficientSet:
    """Closed-form coefficients at non-resonant weights, checked against the system."""
    n, lam, mu = w.n, w.lam, w.mu
    _resonance_guard(n, lam, mu)
    cs = CoefficientSet(w)
    if n == 1:
        c1, c0 = one_dim_coefficients(lam, mu)
        a = alpha_value(n, lam, mu)
        gam = [Fraction(0), a, c1 / 2 - a, Fraction(0), c0 / 2]
    else:
        gam = the_solution(n, lam, mu)
    A, b = _system_for(n, lam, mu)
    check = gam if n >= 2 else [gam[1], gam[2], gam[4]]
    for row, rhs in zip(A, b):
        if sum(Fraction(a) * g for a, g in zip(row, check)) != rhs:
            raise AssertionError("closed-form gammas fail the equivariance system")
    _fill_from_gammas(cs, gam)
    if n >= 2:
        # the component closed forms must agree with the gamma dictionary
        if [cs.betas[f"beta{k}"] for k in range(1, 5)] != beta14(n, lam, mu) or cs.alpha != alpha_value(n, lam, mu):
            raise AssertionError("beta closed forms disagree with the gamma dictionary")
    return cs


def symmetry_rows() -> tuple[list[list[Fraction]], list[Fraction]]:
    """Formal self-adjointness: alpha = 1/2, beta1 = 1, beta2 = 0, on gammas."""
    rows = [[0, 1, 0, 0, 0], [0, 2, 2, 0, 0], [2, 0, 0, 0, 0]]
    return [[Fraction(v) for v in r] for r in rows], [Fraction(1, 2), Fraction(1), Fraction(0)]


def _restrict(particular, nullspace, rows, rhs) -> SolutionSet:
    """Impose extra linear conditions on the affine family particular + span(nullspace)."""
    if not nullspace:
        ok = all(sum(a * x for a, x in zip(r, particular)) == v for r, v in zip(rows, rhs))
        return SolutionSet("unique" if ok else "none", list(particular) if ok else None, [])
    A = [[sum(a * x for a, x in zip(r, b)) for b in nullspace] for r in rows]
    bb = [v - sum(a * x for a, x in zip(r, particular)) for r, v in zip(rows, rhs)]
    s = solve(A, bb)
    if s.kind == "none":
        return s
    new_p = [p + sum(c * b[k] for c, b in zip(s.particular, nullspace)) for k, p in enumerate(particular)]
    new_null = [[sum(c * b[k] for c, b in zip(v, nullspace)) for k in range(len(particular))] for v in s.nullspace]
    return SolutionSet(s.kind, new_p, new_null)


def resonant_coefficients(w: Weights, free_value=None, pin_by_symmetry: bool = True) -> CoefficientSet:
    """Coefficients on a resonant family.

    The family is pinned by formal self-adjointness when lam + mu = 1 and
    ``pin_by_symmetry`` is set; any parameter still free is set to
    ``free_value``.  Without enough data the set is returned unresolved,
    carrying the family description.
    """
    n, lam, mu, delta = w.n, w.lam, w.mu, w.delta
    if not is_resonant(n, delta):
        raise ValueError("weights are not resonant; use generic_coefficients")
    sl = classify_resonance(n, delta)
    sol = _solve_at(n, lam, mu)
    if sol.kind == "none":
        raise InadmissiblePairError(
            f"(lambda, mu) = ({format_rational(lam)}, {format_rational(mu)}) is not admissible "
            f"at resonant delta = {format_rational(delta)}", sl.pairs)
    cs = CoefficientSet(w, resonant=True)
    free = _free_name(delta, sol.nullspace)
    cs.family = {"particular": sol.particular, "nullspace": sol.nullspace,
                 "free": free if free else [GAMMA_NAMES[k] for k in range(5) if any(b[k] for b in sol.nullspace)],
                 "admissible": list(sl.pairs)}
    current = sol
    if pin_by_symmetry and lam + mu == 1 and current.kind == "family":
        rows, rhs = symmetry_rows()
        pinned = _restrict(current.particular, current.nullspace, rows, rhs)
        if pinned.kind == "none":
            raise AssertionError("symmetry conditions are inconsistent with the resonant family")
        current = pinned
    name = _free_name(delta, current.nullspace) if current.kind == "family" else None
    if current.kind == "family" and free_value is not None:
        if name is None:
            raise UnresolvedResonanceError("family has more than one free parameter")
        k = GAMMA_NAMES.index(name)
        row = [Fraction(1 if j == k else 0) for j in range(5)]
        current = _restrict(current.particular, current.nullspace, [row], [parse_rational(free_value)])
        cs.free_parameter = {"name": name, "value": parse_rational(free_value)}
    elif current is not sol:
        cs.free_parameter = {"name": free if free else "symmetry", "value": None, "pinned_by": "symmetry"}
    if current.kind == "unique":
        _fill_from_gammas(cs, current.particular)
        if cs.free_parameter is not None and cs.free_parameter.get("value") is None and free:
            cs.free_parameter["value"] = current.particular[GAMMA_NAMES.index(free)]
    else:
        cs.family["free"] = name or cs.family["free"]
        cs.free_parameter = {"name": cs.family["free"], "value": None}
    return cs


def coefficients(w: Weights, free_value=None, pin_by_symmetry: bool = True) -> CoefficientSet:
    """generic_coefficients off resonance, resonant_coefficients on it."""
    if is_resonant(w.n, w.delta):
        return resonant_coefficients(w, free_value, pin_by_symmetry)
    return generic_coefficients(w)


def first_order_coefficients(w: Weights, alpha=None) -> Fraction:
    """alpha for first-order symbols; free at delta = 1 where only (0, 1) is admissible."""
    if w.delta != 1:
        return alpha_value(w.n, w.lam, w.mu)
    if (w.lam, w.mu) != (0, 1):
        raise InadmissiblePairError("at delta = 1 only (lambda, mu) = (0, 1) is admissible", [(0, 1)])
    if alpha is None:
        raise UnresolvedResonanceError("alpha is free at delta = 1; supply its value")
    return parse_rational(alpha)
