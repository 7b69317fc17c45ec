from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from confquant.linalg import SingularMatrixError, UPoly, determinant, inverse, rref, solve, special_parameter_values

small = st.builds(F, st.integers(-6, 6), st.integers(1, 7))


def test_unique_solution():
    s = solve([[2, 1], [1, 3]], [3, 5])
    assert s.kind == "unique"
    assert s.particular == [F(4, 5), F(7, 5)]


def test_family_and_inconsistent():
    fam = solve([[1, 1], [2, 2]], [1, 2])
    assert fam.kind == "family" and len(fam.nullspace) == 1
    assert solve([[1, 1], [2, 2]], [1, 3]).kind == "none"


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_solutions_satisfy_system(A, b):
    s = solve(A, b)
    if s.kind == "none":
        return
    for vec in [s.particular] + [[p + v for p, v in zip(s.particular, null)] for null in s.nullspace]:
        assert [sum(a * x for a, x in zip(row, vec)) for row in A] == list(b)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_times_matrix_is_identity(A):
    if determinant(A) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(A)
        return
    B = inverse(A)
    prod = [[sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert prod == [[1 if i == j else 0 for j in range(3)] for i in range(3)]


def test_rref_pivots():
    R, piv = rref([[0, 2, 4], [1, 1, 1]])
    assert piv == [0, 1]
    assert R[0] == [1, 0, -1]


def test_upoly_roots():
    t = UPoly.var()
    p = (t - F(1, 2)) * (t + 3) * (t - 2)
    assert sorted(p.rational_roots()) == [-3, F(1, 2), 2]
    assert p(F(1, 2)) == 0


def test_special_values_detect_singular_parameter():
    t = UPoly.var()
    one = UPoly.lift(1)
    # (t - 1) x = 1 is solvable except at t = 1
    ok, cands = special_parameter_values([[t - one]], [one])
    assert ok and F(1) in cands
