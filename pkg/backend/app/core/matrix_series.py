"""
Matrix-valued Laurent families: products, adjoint families, local inversion
and the local Smith normal form at the center.

A MapFamily stores its coefficient matrices A_k (exponent ``valuation + k``)
as exact numpy object matrices, so products and Toeplitz blocks read directly
off the coefficients. ``entries`` gives the same data as a grid of
LaurentSeries.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.core import linalg
from app.core.errors import (
    CenterMismatchError,
    DimensionMismatchError,
    InsufficientTruncationError,
    NotLocallyInvertibleError,
)
from app.core.linalg import Matrix
from app.core.scalar_series import (
    DEFAULT_INVERSE_ORDER,
    ONE,
    ZERO,
    ExactScalar,
    LaurentSeries,
    binomial,
    as_scalar,
    series_arith,
)

logger = logging.getLogger(__name__)

INF = float("inf")


@dataclass(frozen=True, eq=False)
class MapFamily:
    """sigma -> sum_k coeffs[k] * (sigma - center)**(valuation + k), a rows x cols family."""

    rows: int
    cols: int
    center: ExactScalar
    valuation: int
    coeffs: Tuple[Matrix, ...]
    order: int
    exact: bool = False

    @classmethod
    def build(
        cls,
        coeffs: Sequence[Any],
        valuation: int = 0,
        order: Optional[int] = None,
        center: Any = ZERO,
        shape: Optional[Tuple[int, int]] = None,
    ) -> "MapFamily":
        """Normalize coefficient matrices; ``order=None`` builds an exact family."""
        mats = [m if isinstance(m, np.ndarray) else linalg.to_matrix(m) for m in coeffs]
        if shape is None:
            if not mats:
                raise DimensionMismatchError("shape is required for a family without coefficients")
            shape = mats[0].shape
        rows, cols = shape
        if any(m.shape != (rows, cols) for m in mats):
            raise DimensionMismatchError(f"coefficient shapes differ from {shape}")
        center = as_scalar(center)
        if order is not None:
            top = order - valuation + 1
            if top < 0:
                mats = []
                valuation = order + 1
            else:
                mats = mats[:top] + [linalg.zeros(rows, cols) for _ in range(top - len(mats))]
        start = 0
        while start < len(mats) and linalg.is_zero(mats[start]):
            start += 1
        mats = mats[start:]
        valuation += start
        if order is None:
            while mats and linalg.is_zero(mats[-1]):
                mats.pop()
            if not mats:
                return cls(rows, cols, center, 0, (), -1, True)
            return cls(rows, cols, center, valuation, tuple(mats), valuation + len(mats) - 1, True)
        if not mats:
            return cls(rows, cols, center, order + 1, (), order, False)
        return cls(rows, cols, center, valuation, tuple(mats), order, False)

    @classmethod
    def constant(cls, matrix: Any, center: Any = ZERO) -> "MapFamily":
        mat = matrix if isinstance(matrix, np.ndarray) else linalg.to_matrix(matrix)
        return cls.build([mat], 0, None, center, mat.shape)

    @classmethod
    def identity(cls, n: int, center: Any = ZERO) -> "MapFamily":
        return cls.build([linalg.identity(n)], 0, None, center, (n, n))

    @classmethod
    def zero(cls, rows: int, cols: int, center: Any = ZERO, order: Optional[int] = None) -> "MapFamily":
        return cls.build([], 0, order, center, (rows, cols))

    @classmethod
    def from_entries(cls, grid: Sequence[Sequence[LaurentSeries]], rows: int, cols: int) -> "MapFamily":
        """Assemble a family from a grid of series sharing one center."""
        flat = [s for row in grid for s in row]
        if len(grid) != rows or any(len(row) != cols for row in grid):
            raise DimensionMismatchError(f"entry grid is not {rows}x{cols}")
        if not flat:
            return cls.zero(rows, cols)
        center = flat[0].center
        if any(s.center != center for s in flat):
            raise CenterMismatchError("entries of a family must share one center")
        exact = all(s.exact for s in flat)
        order = None if exact else int(min(s.precision for s in flat))
        nonzero = [s for s in flat if not s.is_zero]
        if not nonzero:
            return cls.zero(rows, cols, center, order)
        low = min(s.valuation for s in nonzero)
        high = order if order is not None else max(s.valuation + len(s.coeffs) - 1 for s in nonzero)
        mats = []
        for k in range(low, high + 1):
            m = linalg.zeros(rows, cols)
            for i in range(rows):
                for j in range(cols):
                    s = grid[i][j]
                    if s.exact or k <= s.order:
                        m[i, j] = s.coeff(k)
            mats.append(m)
        return cls.build(mats, low, order, center, (rows, cols))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def holomorphic_flag(self) -> bool:
        return self.is_zero or self.valuation >= 0

    @property
    def precision(self) -> float:
        return INF if self.exact else self.order

    @property
    def degree(self) -> int:
        """Highest stored exponent (the polynomial degree of an exact family)."""
        return self.valuation + len(self.coeffs) - 1 if self.coeffs else -1

    def coeff(self, exponent: int) -> Matrix:
        if not self.exact and exponent > self.order:
            raise InsufficientTruncationError(
                f"coefficient matrix of exponent {exponent} requested, family known to order {self.order}"
            )
        index = exponent - self.valuation
        if 0 <= index < len(self.coeffs):
            return self.coeffs[index]
        return linalg.zeros(self.rows, self.cols)

    def entry(self, i: int, j: int) -> LaurentSeries:
        values = [m[i, j] for m in self.coeffs]
        return LaurentSeries.build(values, self.valuation, None if self.exact else self.order, self.center)

    @property
    def entries(self) -> Tuple[Tuple[LaurentSeries, ...], ...]:
        return tuple(tuple(self.entry(i, j) for j in range(self.cols)) for i in range(self.rows))

    def truncate(self, order: int) -> "MapFamily":
        if not self.exact and order >= self.order:
            return self
        mats = [self.coeff(k) for k in range(self.valuation, order + 1)] if self.coeffs else []
        return MapFamily.build(mats, self.valuation, order, self.center, self.shape)

    def shift(self, power: int) -> "MapFamily":
        """Multiply by (sigma - center)**power."""
        if self.exact and self.is_zero:
            return self
        return MapFamily(
            self.rows, self.cols, self.center, self.valuation + power, self.coeffs, self.order + power, self.exact
        )

    def scale(self, factor: Any) -> "MapFamily":
        factor = as_scalar(factor)
        mats = [linalg.scale(m, factor) for m in self.coeffs]
        return MapFamily.build(mats, self.valuation, None if self.exact else self.order, self.center, self.shape)

    def __add__(self, other: "MapFamily") -> "MapFamily":
        return map_add(self, other)

    def __sub__(self, other: "MapFamily") -> "MapFamily":
        return map_add(self, other.scale(-ONE))

    def __neg__(self) -> "MapFamily":
        return self.scale(-ONE)

    def __matmul__(self, other: "MapFamily") -> "MapFamily":
        return map_mul(self, other)

    def block(self, row_basis: Matrix, col_basis: Matrix) -> "MapFamily":
        """row_basis-coordinates of A restricted to span(col_basis): L A C per coefficient."""
        mats = [linalg.matmul(linalg.matmul(row_basis, m), col_basis) for m in self.coeffs]
        return MapFamily.build(
            mats,
            self.valuation,
            None if self.exact else self.order,
            self.center,
            (row_basis.shape[0], col_basis.shape[1]),
        )

    def derivative(self) -> "MapFamily":
        mats = [linalg.scale(m, self.valuation + k) for k, m in enumerate(self.coeffs)]
        return MapFamily.build(
            mats, self.valuation - 1, None if self.exact else self.order - 1, self.center, self.shape
        )

    def divide_by_sigma(self) -> "MapFamily":
        if not self.holomorphic_flag or (self.coeffs and self.valuation < 1):
            raise NotLocallyInvertibleError("family does not vanish at the center")
        if not self.exact and self.order < 1:
            raise InsufficientTruncationError("order exhausted by division")
        return self.shift(-1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "center": str(self.center),
            "valuation": self.valuation,
            "order": None if self.exact else self.order,
            "coeffs": [linalg.to_lists(m) for m in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MapFamily":
        rows, cols = int(data["rows"]), int(data["cols"])
        mats = [linalg.to_matrix(m, rows, cols) for m in data.get("coeffs", [])]
        return cls.build(mats, int(data.get("valuation", 0)), data.get("order"), data.get("center", "0"), (rows, cols))


def _check_same_center(A: MapFamily, B: MapFamily):
    if A.center != B.center:
        raise CenterMismatchError(f"families centered at {A.center} and {B.center}")


def _assemble(values: Dict[int, Matrix], order: float, center: ExactScalar, shape) -> MapFamily:
    if not values:
        return MapFamily.zero(shape[0], shape[1], center, None if order == INF else int(order))
    low = min(values)
    high = max(values) if order == INF else int(order)
    mats = [values.get(k, linalg.zeros(*shape)) for k in range(low, high + 1)]
    return MapFamily.build(mats, low, None if order == INF else int(order), center, shape)


def map_add(A: MapFamily, B: MapFamily) -> MapFamily:
    _check_same_center(A, B)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"cannot add {A.shape} and {B.shape} families")
    order = min(A.precision, B.precision)
    values: Dict[int, Matrix] = {}
    for F in (A, B):
        for k, m in enumerate(F.coeffs):
            e = F.valuation + k
            if e <= order:
                values[e] = linalg.add(values[e], m) if e in values else m
    return _assemble(values, order, A.center, A.shape)


def map_mul(A: MapFamily, B: MapFamily) -> MapFamily:
    """Product with order min(A.order + B.valuation, B.order + A.valuation)."""
    _check_same_center(A, B)
    if A.cols != B.rows:
        raise DimensionMismatchError(f"cannot multiply {A.shape} by {B.shape} families")
    shape = (A.rows, B.cols)
    if (A.exact and A.is_zero) or (B.exact and B.is_zero):
        return MapFamily.zero(shape[0], shape[1], A.center)
    order = min(A.precision + B.valuation, B.precision + A.valuation)
    values: Dict[int, Matrix] = {}
    for i, a in enumerate(A.coeffs):
        for j, b in enumerate(B.coeffs):
            e = A.valuation + i + B.valuation + j
            if e > order:
                continue
            prod = linalg.matmul(a, b)
            values[e] = linalg.add(values[e], prod) if e in values else prod
    return _assemble(values, order, A.center, shape)


def adjoint_family(
    A: MapFamily, gram_dom: Optional[Matrix] = None, gram_cod: Optional[Matrix] = None
) -> MapFamily:
    """
    sigma -> G_dom^-1 A(conj sigma)^H G_cod, a family at the conjugate center.

    The coefficients of A(conj sigma)^H in powers of (sigma - conj center) are
    the conjugate transposes of those of A.
    """
    if gram_dom is not None and gram_dom.shape != (A.cols, A.cols):
        raise DimensionMismatchError("domain Gram matrix does not match the family")
    if gram_cod is not None and gram_cod.shape != (A.rows, A.rows):
        raise DimensionMismatchError("codomain Gram matrix does not match the family")
    left = linalg.inverse(gram_dom) if gram_dom is not None else None
    mats = []
    for m in A.coeffs:
        adj = linalg.conj_transpose(m)
        if gram_cod is not None:
            adj = linalg.matmul(adj, gram_cod)
        if left is not None:
            adj = linalg.matmul(left, adj)
        mats.append(adj)
    return MapFamily.build(
        mats, A.valuation, None if A.exact else A.order, A.center.conjugate(), (A.cols, A.rows)
    )


def translate_family(A: MapFamily, theta: Any) -> MapFamily:
    """tau_theta on every entry: same coefficients, center moved to center - theta."""
    theta = as_scalar(theta)
    if not theta:
        return A
    return MapFamily(A.rows, A.cols, A.center - theta, A.valuation, A.coeffs, A.order, A.exact)


def expand_family_at(A: MapFamily, point: Any) -> MapFamily:
    """Re-expand an exact holomorphic polynomial family about another point."""
    point = as_scalar(point)
    if point == A.center:
        return A
    if not A.exact or not A.holomorphic_flag:
        raise InsufficientTruncationError("re-expansion needs an exact polynomial family")
    d = point - A.center
    top = A.degree
    mats = []
    for j in range(0, top + 1):
        acc = linalg.zeros(A.rows, A.cols)
        for k in range(max(j, A.valuation), top + 1):
            acc = linalg.add(acc, linalg.scale(A.coeff(k), binomial(k, j) * d ** (k - j)))
        mats.append(acc)
    return MapFamily.build(mats, 0, None, point, A.shape)


def evaluate_family(A: MapFamily, point: Any) -> Matrix:
    """Value of an exact holomorphic polynomial family at a point."""
    if not A.exact or not A.holomorphic_flag:
        raise InsufficientTruncationError("evaluation needs an exact polynomial family")
    d = as_scalar(point) - A.center
    value = linalg.zeros(A.rows, A.cols)
    for k in range(A.degree, -1, -1):
        value = linalg.add(linalg.scale(value, d), A.coeff(k))
    return value


def local_inverse(A: MapFamily, order: Optional[int] = None) -> MapFamily:
    """
    Inverse near the center by constant-term inversion and Neumann recursion.

    Args:
        A: square holomorphic family with A(center) invertible.
        order: order wanted for an exact non-constant A; truncated input keeps
            its own order.

    Returns:
        B with A B = B A = I up to the provable order.
    """
    if A.rows != A.cols:
        raise DimensionMismatchError("local inverse of a non-square family")
    if not A.holomorphic_flag:
        raise NotLocallyInvertibleError("family has a pole at the center")
    n = A.rows
    if n == 0:
        return MapFamily.identity(0, A.center)
    if not A.exact and A.order < 0:
        raise InsufficientTruncationError("constant term of the family is unknown")
    try:
        head = linalg.inverse(A.coeff(0))
    except NotLocallyInvertibleError:
        raise NotLocallyInvertibleError("constant term is singular; use the local Smith form instead")
    if A.exact and A.degree <= 0:
        return MapFamily.build([head], 0, None, A.center, (n, n))
    target = A.order if not A.exact else (order if order is not None else DEFAULT_INVERSE_ORDER)
    inv: List[Matrix] = [head]
    for k in range(1, target + 1):
        acc = linalg.zeros(n, n)
        for j in range(1, k + 1):
            a = A.coeff(j)
            if not linalg.is_zero(a):
                acc = linalg.add(acc, linalg.matmul(a, inv[k - j]))
        inv.append(linalg.scale(linalg.matmul(head, acc), -ONE))
    return MapFamily.build(inv, 0, target, A.center, (n, n))


class SmithForm(NamedTuple):
    """A = U diag((sigma - center)**e) V with U, V locally invertible."""

    U: MapFamily
    exponents: List[int]
    V: MapFamily


def _unit_part(s: LaurentSeries) -> LaurentSeries:
    return s.shift(-s.valuation)


def _elementary(n: int, center: ExactScalar) -> List[List[LaurentSeries]]:
    one = LaurentSeries.constant(ONE, center)
    zero = LaurentSeries.zero(center)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _grid(A: MapFamily) -> List[List[LaurentSeries]]:
    return [list(row) for row in A.entries]


def generic_rank(A: MapFamily) -> int:
    """Rank over the rational function field of an exact polynomial family."""
    if not A.exact:
        raise InsufficientTruncationError("generic rank needs an exact family")
    full = min(A.rows, A.cols)
    if full == 0 or A.is_zero:
        return 0
    best = 0
    samples = full * max(A.degree, 0) + 1
    for k in range(samples + 1):
        point = A.center + (k + 1)
        best = max(best, linalg.rank(evaluate_family(A, point)))
        if best == full:
            break
    return best


def _eliminate(A: MapFamily, expected_rank: Optional[int]):
    rows, cols = A.shape
    center = A.center
    M = _grid(A)
    E = _elementary(rows, center)
    F = _elementary(cols, center)
    exponents: List[int] = []
    units: List[LaurentSeries] = []
    for k in range(min(rows, cols)):
        if expected_rank is not None and k >= expected_rank:
            break
        best = None
        undetermined = None
        for i in range(k, rows):
            for j in range(k, cols):
                s = M[i][j]
                if s.is_zero:
                    if not s.exact:
                        undetermined = s.order if undetermined is None else min(undetermined, s.order)
                    continue
                if best is None or s.valuation < M[best[0]][best[1]].valuation:
                    best = (i, j)
        if best is None:
            if undetermined is not None and expected_rank is None:
                raise InsufficientTruncationError(
                    f"remaining block is zero only up to order {undetermined}; rank cannot be certified"
                )
            if undetermined is not None:
                raise InsufficientTruncationError("truncation too small for the expected rank")
            break
        v = M[best[0]][best[1]].valuation
        if undetermined is not None and undetermined + 1 < v:
            raise InsufficientTruncationError(
                f"pivot valuation {v} exceeds the order {undetermined} of an undetermined entry"
            )
        i0, j0 = best
        M[k], M[i0] = M[i0], M[k]
        E[k], E[i0] = E[i0], E[k]
        for row in M:
            row[k], row[j0] = row[j0], row[k]
        for row in F:
            row[k], row[j0] = row[j0], row[k]
        pivot = M[k][k]
        unit = _unit_part(pivot)
        for i in range(k + 1, rows):
            a = M[i][k]
            if a.is_zero and a.exact:
                continue
            quotient = a.shift(-v)
            M[i] = [series_arith(unit, M[i][c], "mul") - series_arith(quotient, M[k][c], "mul") for c in range(cols)]
            E[i] = [series_arith(unit, E[i][c], "mul") - series_arith(quotient, E[k][c], "mul") for c in range(rows)]
        for j in range(k + 1, cols):
            b = M[k][j]
            if b.is_zero and b.exact:
                continue
            quotient = b.shift(-v)
            for r in range(rows):
                M[r][j] = series_arith(M[r][j], unit, "mul") - series_arith(M[r][k], quotient, "mul")
            for r in range(cols):
                F[r][j] = series_arith(F[r][j], unit, "mul") - series_arith(F[r][k], quotient, "mul")
        exponents.append(v)
        units.append(unit)
    return exponents, units, E, F


def local_smith_form(A: MapFamily, order: Optional[int] = None) -> SmithForm:
    """
    Local Smith form at the center by valuation pivoting.

    Exact families are eliminated on truncations of growing order once their
    generic rank is known; truncated families use their own order and raise
    InsufficientTruncationError when a pivot or the rank cannot be certified.
    Exponents of rank-deficient families cover the nonzero invariant factors.
    """
    if not A.holomorphic_flag:
        raise NotLocallyInvertibleError("local Smith form needs a holomorphic family")
    rows, cols = A.shape
    if A.exact:
        expected = generic_rank(A)
        budget = order if order is not None else max(8, 2 * (A.degree + 1))
        while True:
            try:
                exponents, units, E, F = _eliminate(A.truncate(budget), expected)
                break
            except InsufficientTruncationError:
                if budget > 4096:
                    raise
                budget *= 2
                logger.debug(f"Smith elimination retried at order {budget}")
    else:
        exponents, units, E, F = _eliminate(A, None)
    Emap = MapFamily.from_entries(E, rows, rows)
    Fmap = MapFamily.from_entries(F, cols, cols)
    inv_order = min(Emap.precision, Fmap.precision)
    inv_order = int(inv_order) if inv_order != INF else (order or DEFAULT_INVERSE_ORDER)
    Einv = local_inverse(Emap, inv_order)
    V = local_inverse(Fmap, inv_order)
    one = LaurentSeries.constant(ONE, A.center)
    zero = LaurentSeries.zero(A.center)
    diag = [[(units[i] if i < len(units) else one) if i == j else zero for j in range(rows)] for i in range(rows)]
    U = map_mul(Einv, MapFamily.from_entries(diag, rows, rows))
    logger.debug(f"local Smith exponents {exponents} for a {rows}x{cols} family")
    return SmithForm(U, exponents, V)


def smith_diagonal(exponents: Sequence[int], rows: int, cols: int, center: Any = ZERO) -> MapFamily:
    mats: Dict[int, Matrix] = {}
    for k, e in enumerate(exponents):
        m = mats.setdefault(e, linalg.zeros(rows, cols))
        m[k, k] = ONE
    if not mats:
        return MapFamily.zero(rows, cols, center)
    low = min(mats)
    seq = [mats.get(e, linalg.zeros(rows, cols)) for e in range(low, max(mats) + 1)]
    return MapFamily.build(seq, low, None, center, (rows, cols))


def composition_defect(A: MapFamily, B: MapFamily) -> Optional[Tuple[int, int, int]]:
    """First (exponent, row, col) where A B is nonzero, or None when A B = 0 up to order."""
    prod = map_mul(A, B)
    for k, m in enumerate(prod.coeffs):
        for (i, j), value in np.ndenumerate(m):
            if value:
                return prod.valuation + k, i, j
    return None


def families_agree(A: MapFamily, B: MapFamily) -> bool:
    return (A - B).is_zero
