import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from confquant import invariants as inv
from confquant.poly import FlatMetric, Poly
from confquant.verify import random_operator, random_poly

METRICS = [FlatMetric(2, 0), FlatMetric(1, 1), FlatMetric(3, 0), FlatMetric(2, 1)]
seeds = st.integers(0, 10 ** 6)


def act(tag, m):
    return inv.invariant_action(tag, m)


@pytest.mark.parametrize("m", METRICS, ids=str)
@given(seed=seeds)
def test_sl2_relations(m, seed):
    P = random_poly(random.Random(seed), m.n)
    R, E, T = act("R", m), act("E", m), act("T", m)
    assert inv.bracket(T, R)(P) == act("E", m)(P).scale(4)
    assert inv.bracket(E, R)(P) == R(P).scale(2)
    assert inv.bracket(E, T)(P) == T(P).scale(-2)


@pytest.mark.parametrize("m", METRICS, ids=str)
@given(seed=seeds)
def test_euclidean_invariants_relations(m, seed):
    P = random_poly(random.Random(seed), m.n)
    D, G, L = act("D", m), act("G", m), act("L", m)
    assert inv.bracket(D, G)(P) == L(P)
    assert inv.bracket(L, G)(P).is_zero()
    assert inv.bracket(L, D)(P).is_zero()


@pytest.mark.parametrize("m", METRICS, ids=str)
def test_invariants_commute_with_euclidean_generators(m):
    rng = random.Random(5)
    for _ in range(5):
        P = random_poly(rng, m.n)
        for tag in ("R", "E", "T", "G", "D", "L"):
            for X in inv.euclidean_generators(m):
                lhs = inv.apply_invariant(tag, m, inv.lie_symbol(X, 0, P))
                assert lhs == inv.lie_symbol(X, 0, inv.apply_invariant(tag, m, P)), (tag, X.ident)


def test_dilation_does_not_commute_with_g():
    # G shifts (x-degree - xi-degree) by -2, so it cannot commute with the
    # dilation: the commutation check above is able to fail
    m = FlatMetric(2, 0)
    X = inv.VectorFieldGenerator("dilation", (), m)
    P = Poly.parse("x1^2*xi1", 2)
    G = act("G", m)
    assert inv.lie_symbol(X, 0, G(P)) != G(inv.lie_symbol(X, 0, P))


@pytest.mark.parametrize("m", METRICS, ids=str)
def test_six_commutation_relations(m):
    rng = random.Random(11)
    for _ in range(8):
        P = random_poly(rng, m.n)
        delta = F(rng.randint(-6, 6), rng.randint(1, 4))
        for rel in inv.COMMUTATION_RELATIONS:
            assert inv.commutation_residual(rel, delta, m, P).is_zero(), rel


def test_commutation_check_detects_wrong_constant():
    m = FlatMetric(2, 0)
    P = Poly.parse("x1^2*xi2^2 + x2*xi1", 2)
    for rel in inv.COMMUTATION_RELATIONS:
        assert not inv.commutation_residual(rel, F(1, 3), m, P, rhs_shift=1).is_zero()


@given(seed=seeds)
def test_ideal_vanishes_in_dimension_two(seed):
    m = FlatMetric(2, 0)
    assert inv.ideal_generator_Z(m, random_poly(random.Random(seed), 2)).is_zero()


def test_ideal_vanishes_in_lorentzian_plane():
    m = FlatMetric(1, 1)
    rng = random.Random(3)
    for _ in range(20):
        assert inv.ideal_generator_Z(m, random_poly(rng, 2)).is_zero()


def test_frozen_nonzero_witness_in_dimension_three(z_witness):
    m = FlatMetric(z_witness["p"], z_witness["q"])
    P = Poly.parse(z_witness["P"], z_witness["n"])
    assert inv.ideal_generator_Z(m, P) == Poly.parse(z_witness["Z"], 3)


@pytest.mark.parametrize("m", [FlatMetric(1, 0)] + METRICS, ids=str)
def test_inversion_formula_matches_definition(m):
    rng = random.Random(17)
    for _ in range(6):
        lam, mu = F(rng.randint(-4, 4), rng.randint(1, 3)), F(rng.randint(-4, 4), rng.randint(1, 3))
        A = random_operator(rng, m.n)
        for r, Ar in enumerate(inv.inversion_action_formula(m, lam, mu, A), start=1):
            X = inv.VectorFieldGenerator("inversion", (r,), m)
            assert Ar == inv.lie_operator_defn(X, lam, mu, A)


def test_contraction_uses_raised_index():
    # in signature (1,1) contracting with lower-index xi_r gives a different symbol
    m = FlatMetric(1, 1)
    P = Poly.parse("x1*xi2^2 + x2^2*xi1", 2)
    delta = F(1, 3)
    raised = inv.contracted_inversion_symbol(m, delta, P)
    lowered = Poly.zero(2)
    for r in (1, 2):
        X = inv.VectorFieldGenerator("inversion", (r,), m)
        lowered = lowered + Poly.xi(2, r) * inv.lie_symbol(X, delta, P)
    assert raised != lowered


def test_operator_lie_derivative_rejects_order_growth():
    m = FlatMetric(1, 0)
    X = inv.VectorFieldGenerator("translation", (1,), m)
    with pytest.raises(inv.InvariantViolation):
        inv.DiffOperator2.from_poly(Poly.parse("xi1^3", 1))
    assert inv.lie_operator_defn(X, 0, 0, Poly.parse("x1*xi1^2", 1)) == inv.DiffOperator2.from_poly(
        Poly.parse("xi1^2", 1))


def test_lie_density_rejects_symbols():
    m = FlatMetric(1, 0)
    X = inv.VectorFieldGenerator("dilation", (), m)
    with pytest.raises(ValueError):
        inv.lie_density(X, 0, Poly.parse("xi1", 1))


def test_composition_and_adjoint():
    a, b, c = (Poly.parse(t, 1) for t in ("x1*xi1", "xi1^2 + x1", "x1^2"))
    assert inv.compose(inv.compose(a, b), c) == inv.compose(a, inv.compose(b, c))
    # (x d)^* = -d x = -x d - 1
    assert inv.formal_adjoint_poly(a) == Poly.parse("-x1*xi1 - 1", 1)
    f = Poly.parse("x1^3", 1)
    assert inv.apply_operator_poly(inv.compose(a, b), f) == inv.apply_operator_poly(a, inv.apply_operator_poly(b, f))


def test_generator_ids_round_trip():
    m = FlatMetric(2, 1)
    for X in inv.conformal_generators(m):
        assert inv.VectorFieldGenerator.parse(X.ident, m).components == X.components
    assert len(inv.conformal_generators(m)) == (m.n + 1) * (m.n + 2) // 2
    with pytest.raises(ValueError):
        inv.VectorFieldGenerator.parse("rotation:1:1", m)


def test_vector_fields_are_conformal_killing():
    # L_X g = (2/n) div X g for every generator
    for m in METRICS:
        n = m.n
        for X in inv.conformal_generators(m):
            div = X.divergence()
            for i in range(n):
                for j in range(n):
                    lhs = (X.components[j].dx(i + 1).scale(m.sign(j)) + X.components[i].dx(j + 1).scale(m.sign(i)))
                    rhs = div.scale(F(2, n) * (m.sign(i) if i == j else 0))
                    assert lhs == rhs, (X.ident, i, j)


def test_diff_operator_json_and_validation():
    A = inv.DiffOperator2.from_poly(Poly.parse("x1*xi1*xi2 + xi1 + 3", 2))
    assert A.A2[0][1] == Poly.parse("1/2*x1", 2)
    assert inv.DiffOperator2.from_json(A.to_json()) == A
    assert A.to_poly() == Poly.parse("x1*xi1*xi2 + xi1 + 3", 2)
    with pytest.raises(ValueError):
        inv.DiffOperator2([[Poly.x(2, 1), Poly.zero(2)], [Poly.one(2), Poly.zero(2)]],
                          [Poly.zero(2)] * 2, Poly.zero(2))
