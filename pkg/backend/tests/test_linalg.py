import pytest

from app.core import linalg
from app.core.errors import NotLocallyInvertibleError
from app.core.scalar_series import as_scalar


def m(rows):
    return linalg.to_matrix(rows)


def test_rank_and_nullspace():
    A = m([["1", "2"], ["2", "4"]])
    assert linalg.rank(A) == 1
    K = linalg.nullspace(A)
    assert K.shape == (2, 1)
    assert linalg.is_zero(linalg.matmul(A, K))


def test_zero_sized_shapes():
    empty = linalg.zeros(3, 0)
    assert linalg.rank(empty) == 0
    assert linalg.column_space(empty).shape == (3, 0)
    assert linalg.nullspace(linalg.zeros(0, 2)).shape == (2, 2)
    assert linalg.matmul(linalg.zeros(2, 0), linalg.zeros(0, 3)).shape == (2, 3)


def test_inverse_and_det_over_gaussian_rationals():
    A = m([["1", "i"], ["0", "2"]])
    inv = linalg.inverse(A)
    assert linalg.equal(linalg.matmul(A, inv), linalg.identity(2))
    assert linalg.det(A) == 2
    with pytest.raises(NotLocallyInvertibleError):
        linalg.inverse(m([["1", "1"], ["1", "1"]]))


def test_solve_and_inconsistent_system():
    A = m([["1", "0"], ["0", "0"]])
    X = linalg.solve(A, m([["3"], ["0"]]))
    assert X[0, 0] == 3
    assert linalg.try_solve(A, m([["0"], ["1"]])) is None


def test_extend_to_basis_keeps_leading_columns():
    B = m([["0"], ["1"], ["1"]])
    E = linalg.extend_to_basis(B)
    assert E.shape == (3, 3)
    assert linalg.rank(E) == 3
    assert linalg.equal(E[:, :1], B)


def test_intersect():
    A = m([["1", "0"], ["0", "1"], ["0", "0"]])
    B = m([["1", "0"], ["0", "0"], ["0", "1"]])
    meet = linalg.intersect(A, B)
    assert meet.shape[1] == 1
    assert linalg.in_span(meet, m([["1"], ["0"], ["0"]]))


def test_inner_is_conjugate_linear_in_second_slot():
    x = linalg.to_vector(["i"])
    y = linalg.to_vector(["1"])
    assert linalg.inner(x, y) == as_scalar("i")
    assert linalg.inner(y, x) == as_scalar("-i")


def test_hermitian_positive():
    assert linalg.is_hermitian_positive(m([["2", "i"], ["-i", "2"]]))
    assert not linalg.is_hermitian_positive(m([["1", "2"], ["2", "1"]]))
    assert not linalg.is_hermitian_positive(m([["1", "i"], ["i", "1"]]))
