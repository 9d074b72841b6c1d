"""
Exact linear algebra over Gaussian rationals on numpy object arrays.

Matrices are ``numpy.ndarray`` with ``dtype=object`` holding ExactScalar
entries. Shapes with a zero dimension are legal everywhere, which is what the
chain-complex code needs for zero-dimensional spaces.
"""

from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import DimensionMismatchError, NotLocallyInvertibleError
from app.core.scalar_series import ONE, ZERO, ExactScalar, as_scalar

Matrix = np.ndarray


def zeros(rows: int, cols: int) -> Matrix:
    return np.full((rows, cols), ZERO, dtype=object)


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for k in range(n):
        out[k, k] = ONE
    return out


def to_matrix(data: Any, rows: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    """Build an exact matrix from nested lists of scalars or scalar strings."""
    if isinstance(data, np.ndarray) and data.ndim == 2:
        out = zeros(*data.shape)
        for (i, j), value in np.ndenumerate(data):
            out[i, j] = as_scalar(value)
        return out
    rows_data = [list(r) for r in data]
    if rows is None:
        rows = len(rows_data)
    if cols is None:
        cols = len(rows_data[0]) if rows_data else 0
    if len(rows_data) != rows or any(len(r) != cols for r in rows_data):
        raise DimensionMismatchError(f"expected a {rows}x{cols} matrix")
    out = zeros(rows, cols)
    for i, row in enumerate(rows_data):
        for j, value in enumerate(row):
            out[i, j] = as_scalar(value)
    return out


def to_vector(data: Iterable[Any]) -> Matrix:
    values = [as_scalar(v) for v in data]
    out = zeros(len(values), 1)
    for k, v in enumerate(values):
        out[k, 0] = v
    return out


def to_lists(A: Matrix) -> List[List[str]]:
    return [[str(A[i, j]) for j in range(A.shape[1])] for i in range(A.shape[0])]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if A.shape[1] != B.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {A.shape} by {B.shape}")
    out = zeros(A.shape[0], B.shape[1])
    if A.shape[1] == 0:
        return out
    for i in range(A.shape[0]):
        row = A[i]
        nonzero = [k for k in range(A.shape[1]) if row[k]]
        if not nonzero:
            continue
        for j in range(B.shape[1]):
            acc = ZERO
            for k in nonzero:
                b = B[k, j]
                if b:
                    acc = acc + row[k] * b
            out[i, j] = acc
    return out


def add(A: Matrix, B: Matrix) -> Matrix:
    if A.shape != B.shape:
        raise DimensionMismatchError(f"cannot add {A.shape} and {B.shape}")
    out = zeros(*A.shape)
    for index in np.ndindex(A.shape):
        out[index] = A[index] + B[index]
    return out


def sub(A: Matrix, B: Matrix) -> Matrix:
    return add(A, scale(B, -ONE))


def scale(A: Matrix, factor: Any) -> Matrix:
    factor = as_scalar(factor)
    out = zeros(*A.shape)
    for index in np.ndindex(A.shape):
        out[index] = A[index] * factor
    return out


def conj_transpose(A: Matrix) -> Matrix:
    out = zeros(A.shape[1], A.shape[0])
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            out[j, i] = A[i, j].conjugate()
    return out


def is_zero(A: Matrix) -> bool:
    return not any(bool(x) for x in A.flat)


def equal(A: Matrix, B: Matrix) -> bool:
    return A.shape == B.shape and all(a == b for a, b in zip(A.flat, B.flat))


def hstack(blocks: Sequence[Matrix], rows: Optional[int] = None) -> Matrix:
    blocks = list(blocks)
    if not blocks:
        return zeros(rows or 0, 0)
    return np.concatenate(blocks, axis=1) if len(blocks) > 1 else blocks[0].copy()


def vstack(blocks: Sequence[Matrix], cols: Optional[int] = None) -> Matrix:
    blocks = list(blocks)
    if not blocks:
        return zeros(0, cols or 0)
    return np.concatenate(blocks, axis=0) if len(blocks) > 1 else blocks[0].copy()


def rref(A: Matrix) -> Tuple[Matrix, List[int]]:
    """
    Reduced row echelon form by Gauss-Jordan elimination.

    Args:
        A: exact matrix.

    Returns:
        (R, pivots) where pivots lists the pivot column of each nonzero row.
        The first nonzero entry of a column is used as pivot, so the result is
        deterministic.
    """
    R = A.copy()
    rows, cols = R.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot = next((i for i in range(r, rows) if R[i, c]), None)
        if pivot is None:
            continue
        if pivot != r:
            R[[r, pivot]] = R[[pivot, r]]
        inv = R[r, c].inverse()
        for j in range(c, cols):
            R[r, j] = R[r, j] * inv
        for i in range(rows):
            if i != r and R[i, c]:
                factor = R[i, c]
                for j in range(c, cols):
                    if R[r, j]:
                        R[i, j] = R[i, j] - factor * R[r, j]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: Matrix) -> int:
    if A.size == 0:
        return 0
    return len(rref(A)[1])


def nullspace(A: Matrix) -> Matrix:
    """Columns spanning ker A, one per free column of the echelon form."""
    cols = A.shape[1]
    if A.shape[0] == 0:
        return identity(cols)
    R, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    out = zeros(cols, len(free))
    for k, f in enumerate(free):
        out[f, k] = ONE
        for row, p in enumerate(pivots):
            out[p, k] = -R[row, f]
    return out


def column_space(A: Matrix) -> Matrix:
    """The pivot columns of A, a basis of its range."""
    if A.size == 0:
        return zeros(A.shape[0], 0)
    _, pivots = rref(A)
    return A[:, pivots].copy() if pivots else zeros(A.shape[0], 0)


def solve(A: Matrix, B: Matrix) -> Matrix:
    """A particular solution X of A X = B; raises if the system is inconsistent."""
    if A.shape[0] != B.shape[0]:
        raise DimensionMismatchError(f"cannot solve {A.shape} against {B.shape}")
    n = A.shape[1]
    if A.shape[0] == 0:
        return zeros(n, B.shape[1])
    R, pivots = rref(hstack([A, B]))
    if any(p >= n for p in pivots):
        raise NotLocallyInvertibleError("linear system has no solution")
    X = zeros(n, B.shape[1])
    for row, p in enumerate(pivots):
        for j in range(B.shape[1]):
            X[p, j] = R[row, n + j]
    return X


def try_solve(A: Matrix, B: Matrix) -> Optional[Matrix]:
    try:
        return solve(A, B)
    except NotLocallyInvertibleError:
        return None


def inverse(A: Matrix) -> Matrix:
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatchError(f"cannot invert a {A.shape} matrix")
    if n == 0:
        return zeros(0, 0)
    R, pivots = rref(hstack([A, identity(n)]))
    if pivots[:n] != list(range(n)):
        raise NotLocallyInvertibleError("matrix is singular")
    return R[:, n:].copy()


def det(A: Matrix) -> ExactScalar:
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatchError(f"determinant of a {A.shape} matrix")
    M = A.copy()
    result = ONE
    for c in range(n):
        pivot = next((i for i in range(c, n) if M[i, c]), None)
        if pivot is None:
            return ZERO
        if pivot != c:
            M[[c, pivot]] = M[[pivot, c]]
            result = -result
        result = result * M[c, c]
        inv = M[c, c].inverse()
        for i in range(c + 1, n):
            if M[i, c]:
                factor = M[i, c] * inv
                for j in range(c, n):
                    M[i, j] = M[i, j] - factor * M[c, j]
    return result


def in_span(B: Matrix, v: Matrix) -> bool:
    if v.shape[1] == 0:
        return True
    return rank(hstack([B, v])) == rank(B)


def extend_to_basis(B: Matrix) -> Matrix:
    """Append standard basis vectors to the independent columns of B until square."""
    n = B.shape[0]
    basis = column_space(B)
    for k in range(n):
        if basis.shape[1] == n:
            break
        e = zeros(n, 1)
        e[k, 0] = ONE
        if not in_span(basis, e):
            basis = hstack([basis, e])
    return basis


def intersect(A: Matrix, B: Matrix) -> Matrix:
    """Basis of span(A) ∩ span(B)."""
    if A.shape[1] == 0 or B.shape[1] == 0:
        return zeros(A.shape[0], 0)
    kernel = nullspace(hstack([A, scale(B, -ONE)]))
    if kernel.shape[1] == 0:
        return zeros(A.shape[0], 0)
    return column_space(matmul(A, kernel[: A.shape[1], :]))


def inner(x: Matrix, y: Matrix, gram: Optional[Matrix] = None) -> ExactScalar:
    """<x, y> = y^H G x, conjugate-linear in the second slot."""
    gx = x if gram is None else matmul(gram, x)
    acc = ZERO
    for k in range(gx.shape[0]):
        if gx[k, 0] and y[k, 0]:
            acc = acc + gx[k, 0] * y[k, 0].conjugate()
    return acc


def is_hermitian_positive(G: Matrix) -> bool:
    """Conjugate symmetry plus positive leading principal minors."""
    n = G.shape[0]
    if G.shape != (n, n) or not equal(G, conj_transpose(G)):
        return False
    for k in range(1, n + 1):
        minor = det(G[:k, :k])
        if minor.im != 0 or minor.re <= 0:
            return False
    return True
