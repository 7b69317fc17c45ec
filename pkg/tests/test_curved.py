import random
from fractions import Fraction as F

import pytest

from confquant.coefficients import ResonanceError, Weights, coefficients, curvature_constant
from confquant.curved import (ConnectionJet, PointOperator, PresentationRequired, SymbolJet2, _curvature_terms,
                              _frame, anomaly_coefficient, conformal_invariance_residual,
                              curvature_block_closed_form, flat_point_operator, hamiltonian_jets,
                              laplacian_point_operator, minimal_coupling_formula, quantize_geodesic,
                              quantize_minimal_coupling, quantize_point, random_factor_jet, random_metric_jet,
                              random_rational, random_symbol_jet, resonant_case_weights, resonant_laplacians,
                              resonant_scalar_coefficient, scalar_curvature_coefficient, solve_curvature_block)
from confquant.geometry import MetricJet2, exponential_factor, flat_presentation, schwarzian_nd, sphere_factor
from confquant.linalg import solve
from confquant.verify import random_weights


def _diag(n, q=0):
    return [[(1 if i < n - q else -1) if i == j else 0 for j in range(n)] for i in range(n)]


def _connection(rng, n):
    return ConnectionJet([random_rational(rng) for _ in range(n)],
                         [[random_rational(rng) for _ in range(n)] for _ in range(n)])


@pytest.mark.parametrize("n,q", [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0)])
def test_reduces_to_flat_quantization(n, q):
    rng = random.Random(n + 10 * q)
    for _ in range(4):
        w = random_weights(rng, n)
        w = Weights(n, n - q, q, w.lam, w.mu)
        s = random_symbol_jet(rng, n)
        m = MetricJet2.constant(_diag(n, q))
        pres = random_factor_jet(rng, n) if n <= 2 else None
        if pres is not None:
            pres = type(pres).constant(n)
        assert quantize_point(w, m, s, pres) == flat_point_operator(w, s)


@pytest.mark.parametrize("n,q", [(3, 0), (3, 1), (4, 0), (4, 1)])
def test_conformal_invariance(n, q):
    rng = random.Random(7 * n + q)
    for _ in range(5):
        w0 = random_weights(rng, n)
        w = Weights(n, n - q, q, w0.lam, w0.mu)
        m = random_metric_jet(rng, n, q)
        f = random_factor_jet(rng, n)
        assert conformal_invariance_residual(w, m, f, random_symbol_jet(rng, n)) == 0


@pytest.mark.parametrize("n,q", [(1, 0), (2, 0), (2, 1)])
def test_conformal_invariance_through_presentations(n, q):
    rng = random.Random(3 * n + q)
    for _ in range(5):
        w0 = random_weights(rng, n)
        w = Weights(n, n - q, q, w0.lam, w0.mu)
        f0 = random_factor_jet(rng, n)
        m = flat_presentation(_diag(n, q), f0)
        f = random_factor_jet(rng, n)
        assert conformal_invariance_residual(w, m, f, random_symbol_jet(rng, n), presentation=f0) == 0


def test_wrong_curvature_weight_breaks_invariance():
    rng = random.Random(11)
    w = Weights(3, 3, 0, F(1, 3), F(3, 4))
    b5, b6 = curvature_block_closed_form(w)
    m, f, s = random_metric_jet(rng, 3), random_factor_jet(rng, 3), random_symbol_jet(rng, 3)
    assert conformal_invariance_residual(w, m, f, s, block=(b5, b6)) == 0
    assert conformal_invariance_residual(w, m, f, s, block=(b5 + 1, b6)) != 0


def test_low_dimensions_need_a_presentation():
    rng = random.Random(1)
    for n in (1, 2):
        w = Weights(n, n, 0, F(1, 3), F(3, 4))
        with pytest.raises(PresentationRequired):
            quantize_point(w, random_metric_jet(rng, n), random_symbol_jet(rng, n))
    # first-order symbols never need one
    w = Weights(2, 2, 0, F(1, 3), F(3, 4))
    s = random_symbol_jet(rng, 2)
    s1 = SymbolJet2(2, [[0, 0], [0, 0]], [[[0] * 2] * 2] * 2, [[[[0] * 2] * 2] * 2] * 2, s.P1, s.dP1, s.P0)
    quantize_point(w, random_metric_jet(rng, 2), s1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_closed_form_block_matches_flat_agreement(n):
    rng = random.Random(n)
    for _ in range(3):
        w = random_weights(rng, n)
        assert solve_curvature_block(w, coefficients(w)) == curvature_block_closed_form(w)


@pytest.mark.parametrize("n,q,lam,mu", [(3, 0, F(1, 3), F(3, 4)), (2, 0, F(1, 3), F(3, 4)), (2, 1, F(1, 5), F(2, 3))])
def test_zero_order_terms_in_the_flat_chart(n, q, lam, mu):
    """In a conformally flat chart the curvature block equals an explicit
    combination of F-jets contracted with P."""
    rng = random.Random(3)
    w = Weights(n, n - q, q, lam, mu)
    cs = coefficients(w)
    g0 = w.metric.matrix()
    r = range(n)
    rows, rhs = [], []
    for _ in range(8):
        f = random_factor_jet(rng, n)
        m = flat_presentation(g0, f)
        s = random_symbol_jet(rng, n, False)
        d = quantize_point(w, m, s, f, cs, block=(0, 0)) - flat_point_operator(w, s, cs)
        Fv, dF, ddF, P = f.F, f.dF, f.ddF, s.P2
        trP = sum(g0[k][k] * P[k][k] for k in r)
        rows.append([sum(P[i][j] * ddF[i][j] for i in r for j in r) / Fv,
                     sum(P[i][j] * dF[i] * dF[j] for i in r for j in r) / Fv ** 2,
                     trP * sum(g0[i][i] * ddF[i][i] for i in r) / Fv,
                     trP * sum(g0[i][i] * dF[i] ** 2 for i in r) / Fv ** 2])
        rhs.append(-d.A0.re)
    fit = solve(rows, rhs).particular
    d = mu - lam
    pre = n * n * lam * (1 - mu) / (2 * (1 + n * (1 - d)))
    k = 1 / (2 + n * (1 - 2 * d))
    assert fit == [pre, -pre * F(3, 2), pre * k, -pre * k * F(1, 2) * (2 + n * (d - 1))]


def test_geodesic_quantization_on_the_sphere(model_metrics):
    for model in model_metrics:
        n = model["n"]
        m = MetricJet2.from_json(model["metric"])
        for lam, mu in [(F(1, 2), F(1, 2)), (F(1, 3), F(3, 4)), (F(0), F(0))]:
            w = Weights(n, n, 0, lam, mu)
            C = curvature_constant(n, lam, mu)
            op = quantize_geodesic(w, m, F(2, 3))
            assert op == laplacian_point_operator(lam, m, F(2, 3), C)
            if lam == mu == F(1, 2) and n == 3:
                assert scalar_curvature_coefficient(op, lam, m, F(2, 3)) == F(-9, 40)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_geodesic_on_random_backgrounds(n):
    rng = random.Random(n)
    for _ in range(3):
        w = random_weights(rng, n)
        f = random_factor_jet(rng, n)
        if n == 2:
            m, pres = flat_presentation(_diag(2), f), f
        else:
            m, pres = random_metric_jet(rng, n), None
        C = curvature_constant(n, w.lam, w.mu)
        assert quantize_geodesic(w, m, 1, pres) == laplacian_point_operator(w.lam, m, 1, C)


@pytest.mark.parametrize("n", [3, 4])
def test_minimal_coupling(n):
    rng = random.Random(20 + n)
    for _ in range(4):
        w = random_weights(rng, n)
        m, a = random_metric_jet(rng, n), _connection(rng, n)
        C = curvature_constant(n, w.lam, w.mu)
        hbar = F(rng.randint(1, 4), rng.randint(1, 3))
        assert quantize_minimal_coupling(w, m, a, hbar) == minimal_coupling_formula(w, m, a, hbar, C)
        zero = ConnectionJet([0] * n, [[0] * n for _ in range(n)])
        assert quantize_minimal_coupling(w, m, zero, hbar) == quantize_geodesic(w, m, hbar)


def test_anomaly_coefficient():
    assert anomaly_coefficient(Weights(3, 3, 0, F(1, 3), F(2, 3))) == 0
    assert anomaly_coefficient(Weights(3, 3, 0, 0, 0)) == 1
    assert anomaly_coefficient(Weights(3, 3, 0, F(1, 3), F(3, 4))) != 0


def test_geodesic_rejects_resonant_weights():
    m = MetricJet2.constant(_diag(3))
    with pytest.raises(ResonanceError):
        quantize_geodesic(resonant_case_weights("yamabe", 3), m, 1)


@pytest.mark.parametrize("case", ["yamabe", "laplace", "new"])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_resonant_laplacians(case, n):
    f = sphere_factor(n)
    m = flat_presentation(_diag(n), f)
    w = resonant_case_weights(case, n)
    op = resonant_laplacians(case, n, m, 1, f if n <= 2 else None)
    c = scalar_curvature_coefficient(op, w.lam, m, 1)
    assert c == resonant_scalar_coefficient(case, n)
    if n >= 3:
        assert c == curvature_constant(n, w.lam, w.mu)


@pytest.mark.parametrize("case", ["yamabe", "laplace", "new"])
def test_resonant_laplacians_on_random_metrics(case):
    rng = random.Random(4)
    for n, q in [(3, 0), (4, 1)]:
        m = random_metric_jet(rng, n, q)
        w = resonant_case_weights(case, n)
        op = resonant_laplacians(case, n, m, F(1, 2), signature_q=q)
        C = resonant_scalar_coefficient(case, n)
        assert op == laplacian_point_operator(w.lam, m, F(1, 2), C)
        f = random_factor_jet(rng, n)
        cs = coefficients(Weights(n, n - q, q, w.lam, w.mu), None, True)
        s = hamiltonian_jets(w, m)
        assert conformal_invariance_residual(Weights(n, n - q, q, w.lam, w.mu), m, f, s, cs) == 0


def test_sturm_liouville():
    f = exponential_factor()
    m = flat_presentation([[1]], f)
    w = resonant_case_weights("sturm_liouville", 1)
    op = resonant_laplacians("sturm_liouville", 1, m, 1, f)
    S = schwarzian_nd(f, m).S
    assert S == F(-1, 2)
    diff = op - laplacian_point_operator(w.lam, m, 1, 0)
    assert diff.A0.re == S / (2 * m.g[0][0]) == F(-1, 4)
    assert resonant_scalar_coefficient("sturm_liouville", 1) * -S / m.g[0][0] == diff.A0.re


def test_point_operator_json_and_arithmetic():
    op = PointOperator([[1, 2], [2, 3]], [F(1, 2), 0], F(-1, 3))
    assert op.to_json()["A0"] == "-1/3"
    assert (op - op).is_zero()
    assert op.scale(2).max_abs() == 6
    with pytest.raises(ValueError):
        PointOperator([[1, 2], [0, 3]], [0, 0], 0)
    s = random_symbol_jet(random.Random(0), 3)
    assert SymbolJet2.from_json(s.to_json()) == s
    a = _connection(random.Random(0), 2)
    assert ConnectionJet.from_json(a.to_json()) == a


def test_curvature_terms_use_the_schwarzian_in_two_dimensions():
    f = sphere_factor(2)
    m = flat_presentation(_diag(2), f)
    s = random_symbol_jet(random.Random(5), 2, False)
    with pytest.raises(PresentationRequired):
        _curvature_terms(_frame(m), s, None)
    t1, t2 = _curvature_terms(_frame(m), s, f)
    S = schwarzian_nd(f, m).S
    assert t1 == sum(S[i][j] * s.P2[i][j] for i in range(2) for j in range(2))
