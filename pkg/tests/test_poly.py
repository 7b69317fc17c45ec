from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from confquant.poly import DimensionError, FlatMetric, Poly, exponent_tuples, metric_contract
from confquant.scalar import ExactScalar, I


@st.composite
def polys(draw, n=2, max_x=2, max_xi=2):
    P = Poly.zero(n)
    for _ in range(draw(st.integers(0, 5))):
        xe = [draw(st.integers(0, max_x)) for _ in range(n)]
        xie = [draw(st.integers(0, max_xi)) for _ in range(n)]
        c = ExactScalar(Fraction(draw(st.integers(-19, 19)), draw(st.integers(1, 9))),
                        draw(st.sampled_from([0, 0, Fraction(1, 3)])))
        P = P + Poly.monomial(n, xe, xie, c)
    return P


def test_constructors_and_indexing():
    x1, xi2 = Poly.x(2, 1), Poly.xi(2, 2)
    P = x1 * x1 * xi2
    assert P.coefficient((2, 0), (0, 1)) == 1
    assert P.xi_degree() == 1 and P.x_degree() == 2
    assert P.partial("x1") == (x1 * xi2).scale(2)
    assert P.partial("xi2") == x1 * x1
    with pytest.raises((ValueError, IndexError)):
        Poly.x(2, 3)


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionError):
        Poly.x(2, 1) + Poly.x(3, 1)


def test_parse_examples():
    P = Poly.parse("xi1^2 + xi2^2", 2)
    assert P == FlatMetric(2, 0).xi_square()
    assert Poly.parse("x1*xi1 - 1/2*I*x2", 2) == Poly.x(2, 1) * Poly.xi(2, 1) - Poly.x(2, 2).scale(I * Fraction(1, 2))


@given(polys())
def test_text_and_json_round_trip(P):
    assert Poly.parse(str(P), 2) == P
    assert Poly.from_json(P.to_json()) == P


@given(polys(), polys())
def test_leibniz_rule(a, b):
    for var in range(4):
        assert (a * b).diff_var(var) == a.diff_var(var) * b + a * b.diff_var(var)


@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(polys())
def test_euler_counts_xi_degree(P):
    total = Poly.zero(2)
    for k in range(5):
        total = total + P.homogeneous(k).scale(k)
    assert P.euler() == total


@given(polys())
def test_homogeneous_parts_sum_back(P):
    assert sum((P.homogeneous(k) for k in range(5)), Poly.zero(2)) == P


def test_evaluation():
    P = Poly.parse("x1^2*xi2 + 3", 2)
    assert P.evaluate([2, 5], [0, 1]) == 7
    assert P.evaluate_x([1, 0]) == Poly.parse("xi2 + 3", 2)


@pytest.mark.parametrize("p,q,expected", [(2, 0, "xi1^2 + xi2^2"), (1, 1, "xi1^2 - xi2^2")])
def test_metric_square(p, q, expected):
    assert FlatMetric(p, q).xi_square() == Poly.parse(expected, p + q)


def test_metric_contraction_uses_signature():
    m = FlatMetric(1, 1)
    a = [Poly.x(2, 1), Poly.x(2, 2)]
    assert metric_contract(m, a, a) == m.x_square()


def test_exponent_tuples_count():
    assert len(list(exponent_tuples(3, 2))) == 6
    assert all(sum(e) == 3 for e in exponent_tuples(2, 3))
