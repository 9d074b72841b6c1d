"""
Holomorphic families of finite chain complexes.

    0 -> F_0 --P_0(sigma)--> F_1 --P_1(sigma)--> ... --P_{m-1}(sigma)--> F_m -> 0

Includes validation, Laplacian families, adjoint complexes, indicial-family
builders with the i-shift alignment, and the gauge-conjugated ground-truth
generator.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core import linalg
from app.core.errors import DimensionMismatchError, IdentityViolationError, CenterMismatchError
from app.core.linalg import Matrix
from app.core.matrix_series import (
    MapFamily,
    adjoint_family,
    composition_defect,
    expand_family_at,
    map_mul,
    translate_family,
)
from app.core.scalar_series import I_UNIT, ONE, ZERO, ExactScalar, as_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ComplexFamily:
    dims: Tuple[int, ...]
    maps: Tuple[MapFamily, ...]
    center: ExactScalar
    grams: Tuple[Optional[Matrix], ...]

    @classmethod
    def create(
        cls,
        dims: Sequence[int],
        maps: Sequence[MapFamily],
        center: Any = None,
        grams: Optional[Sequence[Optional[Matrix]]] = None,
    ) -> "ComplexFamily":
        dims = tuple(int(n) for n in dims)
        maps = tuple(maps)
        if len(maps) != len(dims) - 1:
            raise DimensionMismatchError(f"{len(dims)} spaces need {len(dims) - 1} maps, got {len(maps)}")
        if center is None:
            center = maps[0].center if maps else ZERO
        center = as_scalar(center)
        for q, P in enumerate(maps):
            if P.shape != (dims[q + 1], dims[q]):
                raise DimensionMismatchError(
                    f"P_{q} has shape {P.shape}, expected {(dims[q + 1], dims[q])}"
                )
            if P.center != center:
                raise CenterMismatchError(f"P_{q} is centered at {P.center}, complex at {center}")
        if grams is None:
            grams = [None] * len(dims)
        grams = tuple(grams)
        if len(grams) != len(dims):
            raise DimensionMismatchError("one Gram matrix (or None) per space is required")
        for q, G in enumerate(grams):
            if G is not None and not linalg.is_hermitian_positive(G):
                raise DimensionMismatchError(f"Gram matrix of F_{q} is not Hermitian positive definite")
            if G is not None and G.shape != (dims[q], dims[q]):
                raise DimensionMismatchError(f"Gram matrix of F_{q} has the wrong size")
        return cls(dims, maps, center, grams)

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def order(self) -> Optional[int]:
        """Common truncation order, None when every map is an exact polynomial."""
        bounds = [P.order for P in self.maps if not P.exact]
        return min(bounds) if bounds else None

    @property
    def is_polynomial(self) -> bool:
        return all(P.exact and P.holomorphic_flag for P in self.maps)

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q < len(self.dims) else 0

    def gram(self, q: int) -> Optional[Matrix]:
        return self.grams[q] if 0 <= q < len(self.grams) else None

    def map_at(self, q: int) -> MapFamily:
        """P_q, or the zero map into/out of a zero space outside the complex."""
        if 0 <= q < len(self.maps):
            return self.maps[q]
        return MapFamily.zero(self.dim(q + 1), self.dim(q), self.center)

    def replace_maps(self, maps: Sequence[MapFamily], center: Optional[ExactScalar] = None) -> "ComplexFamily":
        return ComplexFamily(self.dims, tuple(maps), self.center if center is None else center, self.grams)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": str(self.center),
            "order": self.order,
            "dims": list(self.dims),
            "maps": [P.to_dict() for P in self.maps],
            "gram": [None if G is None else linalg.to_lists(G) for G in self.grams],
        }


def validate_complex(C: ComplexFamily) -> Dict[str, Any]:
    """Composition-zero check; the report carries the first violation per degree."""
    failures = []
    for q in range(C.length - 1):
        defect = composition_defect(C.maps[q + 1], C.maps[q])
        if defect is not None:
            exponent, row, col = defect
            failures.append({"q": q, "exponent": exponent, "entry": [row, col]})
    if failures:
        logger.info(f"complex fails composition-zero at {len(failures)} degree(s)")
    return {"valid": not failures, "failures": failures}


def adjoint_map(C: ComplexFamily, q: int) -> MapFamily:
    """P_q^star : F_{q+1} -> F_q at the conjugate center."""
    return adjoint_family(C.map_at(q), C.gram(q), C.gram(q + 1))


def laplacian_family(C: ComplexFamily, q: int) -> MapFamily:
    """
    Box_q(sigma) = P_q^*(sigma - 2i Im c) P_q(sigma) + P_{q-1}(sigma) P_{q-1}^*(sigma - 2i Im c).

    The shift moves the adjoint families from the conjugate center back onto
    the center c, so both terms are families at c.
    """
    shift = -2 * I_UNIT * C.center.im
    upper = translate_family(adjoint_map(C, q), shift)
    lower = translate_family(adjoint_map(C, q - 1), shift)
    return map_mul(upper, C.map_at(q)) + map_mul(C.map_at(q - 1), lower)


def adjoint_complex(C: ComplexFamily) -> ComplexFamily:
    """
    The adjoint complex with arrows reversed and degrees renumbered.

    Degree j of the result is F_{m-j}; its j-th map is P_{m-1-j}^star. The class
    group H^{q+1}(P^star) therefore sits in degree m-1-q of the result.
    """
    m = C.length
    maps = [adjoint_map(C, m - 1 - j) for j in range(m)]
    return ComplexFamily(
        tuple(reversed(C.dims)), tuple(maps), C.center.conjugate(), tuple(reversed(C.grams))
    )


def adjoint_degree(C: ComplexFamily, q: int) -> int:
    """Degree of adjoint_complex(C) that holds H^{q+1}(P^star)."""
    return C.length - 1 - q


def translate_complex(C: ComplexFamily, theta: Any) -> ComplexFamily:
    theta = as_scalar(theta)
    if not theta:
        return C
    maps = [translate_family(P, theta) for P in C.maps]
    return C.replace_maps(maps, C.center - theta)


def expand_complex_at(C: ComplexFamily, point: Any) -> ComplexFamily:
    """Re-expand a polynomial complex about another point."""
    point = as_scalar(point)
    maps = [expand_family_at(P, point) for P in C.maps]
    return C.replace_maps(maps, point)


def derivative_pair(C: ComplexFamily) -> Tuple[List[MapFamily], List[MapFamily]]:
    """
    T_q = P_q' and S_q = P_q''/2.

    Differentiating P_{q+1}P_q = 0 once gives P_{q+1}T_q + T_{q+1}P_q = 0, and
    twice gives T_{q+1}T_q = -(P_{q+1}S_q + S_{q+1}P_q).
    """
    T = [P.derivative() for P in C.maps]
    S = [P.derivative().derivative().scale(Fraction(1, 2)) for P in C.maps]
    return T, S


@dataclass
class IndicialInput:
    bP: List[Matrix]
    Lambda: List[Matrix]
    gamma: Fraction
    anchor: int = 0
    grams: Optional[List[Optional[Matrix]]] = None

    @property
    def dims(self) -> List[int]:
        if not self.bP:
            return []
        return [self.bP[0].shape[1]] + [B.shape[0] for B in self.bP]


def _first_nonzero(M: Matrix) -> Optional[List[int]]:
    for (i, j), value in np.ndenumerate(M):
        if value:
            return [i, j]
    return None


def check_indicial_input(inp: IndicialInput) -> List[Dict[str, Any]]:
    """
    Violations of A_{q+1}(sigma + i) A_q(sigma) = 0 coefficient by coefficient,
    and of Lambda-exactness at inner degrees.
    """
    problems: List[Dict[str, Any]] = []
    m = len(inp.bP)
    if len(inp.Lambda) != m:
        raise DimensionMismatchError("bP and Lambda need the same number of maps")
    dims = inp.dims
    for q in range(m):
        shape = (dims[q + 1], dims[q])
        if inp.bP[q].shape != shape or inp.Lambda[q].shape != shape:
            raise DimensionMismatchError(f"indicial data of degree {q} is not {shape}")
    for q in range(m - 1):
        b0, b1 = inp.bP[q], inp.bP[q + 1]
        l0, l1 = inp.Lambda[q], inp.Lambda[q + 1]
        l1l0 = linalg.matmul(l1, l0)
        by_exponent = {
            2: l1l0,
            1: linalg.add(linalg.add(linalg.matmul(b1, l0), linalg.matmul(l1, b0)), linalg.scale(l1l0, I_UNIT)),
            0: linalg.add(linalg.matmul(b1, b0), linalg.scale(linalg.matmul(l1, b0), I_UNIT)),
        }
        for exponent in (0, 1, 2):
            entry = _first_nonzero(by_exponent[exponent])
            if entry is not None:
                problems.append({"q": q, "exponent": exponent, "entry": entry})
    for q in range(1, m):
        if linalg.rank(inp.Lambda[q]) + linalg.rank(inp.Lambda[q - 1]) != dims[q]:
            problems.append({"q": q, "exponent": None, "entry": None, "reason": "Lambda not exact"})
    return problems


def indicial_family(inp: IndicialInput, degree: int, center: Any = ZERO) -> MapFamily:
    """A_q(sigma) = bP_q + sigma * Lambda_q expanded at ``center``."""
    center = as_scalar(center)
    b, lam = inp.bP[degree], inp.Lambda[degree]
    return MapFamily.build([linalg.add(b, linalg.scale(lam, center)), lam], 0, None, center, b.shape)


def adjoint_indicial_family(inp: IndicialInput, degree: int, center: Any = ZERO) -> MapFamily:
    """A_q^star(sigma) = bP_q^star + (sigma - i(2 gamma - 1)) Lambda_q^star at ``center``."""
    center = as_scalar(center)
    grams = inp.grams or [None] * (len(inp.bP) + 1)
    base = MapFamily.build([inp.bP[degree], inp.Lambda[degree]], 0, None, ZERO, inp.bP[degree].shape)
    adj = adjoint_family(base, grams[degree], grams[degree + 1])
    b_star, lam_star = adj.coeff(0), adj.coeff(1)
    offset = center - I_UNIT * (2 * inp.gamma - 1)
    return MapFamily.build([linalg.add(b_star, linalg.scale(lam_star, offset)), lam_star], 0, None, center, b_star.shape)


def build_indicial(inp: IndicialInput, center: Any = ZERO) -> ComplexFamily:
    """
    The aligned complex P_{q'}(sigma) = A_{q'}(sigma + i(q' - q) + i(gamma - 1/2)).

    Raises IdentityViolationError listing every failing degree and exponent.
    """
    problems = check_indicial_input(inp)
    if problems:
        raise IdentityViolationError("indicial input violates its identities", {"failures": problems})
    center = as_scalar(center)
    half = Fraction(1, 2)
    maps = []
    for degree in range(len(inp.bP)):
        shift = I_UNIT * (degree - inp.anchor) + I_UNIT * (inp.gamma - half)
        b, lam = inp.bP[degree], inp.Lambda[degree]
        maps.append(MapFamily.build([linalg.add(b, linalg.scale(lam, center + shift)), lam], 0, None, center, b.shape))
    return ComplexFamily.create(inp.dims, maps, center, inp.grams)


@dataclass
class GaugeProfile:
    dims: List[int]
    blocks: List[Tuple[int, int]] = field(default_factory=list)
    gauge_degree: int = 2
    center: ExactScalar = ZERO
    trivial_gauge: bool = False


def _pad_counts(profile: GaugeProfile) -> List[int]:
    m = len(profile.dims) - 1
    used = [0] * (m + 1)
    for q, k in profile.blocks:
        if not 0 <= q < m or k < 0:
            raise DimensionMismatchError(f"block ({q}, {k}) does not fit a complex of length {m}")
        used[q] += 1
        used[q + 1] += 1
    residual = [n - u for n, u in zip(profile.dims, used)]
    if any(r < 0 for r in residual):
        raise DimensionMismatchError("profile dims are smaller than the requested blocks")
    pads = []
    carry = 0
    for q in range(m):
        count = residual[q] - carry
        if count < 0:
            raise DimensionMismatchError(f"profile infeasible at degree {q}")
        pads.append(count)
        carry = count
    if residual[m] != carry:
        raise DimensionMismatchError("profile infeasible: top dimension cannot be padded by identity blocks")
    return pads


def _random_scalar(rng: np.random.Generator) -> ExactScalar:
    re = Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 3)))
    im = Fraction(int(rng.integers(-1, 2)), int(rng.integers(1, 3)))
    return ExactScalar(re, im)


def _unitriangular(n: int, degree: int, center: ExactScalar, rng: np.random.Generator) -> MapFamily:
    mats = [linalg.identity(n)] + [linalg.zeros(n, n) for _ in range(degree)]
    for i in range(n):
        for j in range(i + 1, n):
            for d in range(degree + 1):
                mats[d][i, j] = _random_scalar(rng)
    return MapFamily.build(mats, 0, None, center, (n, n))


def _unitriangular_inverse(U: MapFamily) -> MapFamily:
    """(I + N)^-1 = sum_k (-N)^k, a polynomial because N is nilpotent."""
    n = U.rows
    N = U - MapFamily.identity(n, U.center)
    term = MapFamily.identity(n, U.center)
    total = term
    for _ in range(max(n - 1, 0)):
        term = map_mul(term, -N)
        total = total + term
    return total


def _permutation(n: int, rng: np.random.Generator) -> Matrix:
    order = [int(x) for x in rng.permutation(n)]
    P = linalg.zeros(n, n)
    for i, j in enumerate(order):
        P[i, j] = ONE
    return P


def generate_gauge_complex(seed: int, profile: GaugeProfile) -> Tuple[ComplexFamily, Dict[str, Any]]:
    """
    Direct sum of blocks 0 -> C --(sigma - c)^k--> C -> 0 padded with identity
    blocks and conjugated by unitriangular polynomial gauges.

    Returns:
        (complex, ground_truth) with the expected germ-cohomology dims per degree.
    """
    rng = np.random.default_rng(seed)
    center = as_scalar(profile.center)
    dims = list(profile.dims)
    m = len(dims) - 1
    pads = _pad_counts(profile)
    slots = [0] * (m + 1)
    coeff_tables: List[Dict[int, Matrix]] = [{} for _ in range(m)]

    def place(q: int, exponent: int):
        src, dst = slots[q], slots[q + 1]
        slots[q] += 1
        slots[q + 1] += 1
        table = coeff_tables[q]
        mat = table.setdefault(exponent, linalg.zeros(dims[q + 1], dims[q]))
        mat[dst, src] = ONE

    for q, k in profile.blocks:
        place(q, k)
    for q, count in enumerate(pads):
        for _ in range(count):
            place(q, 0)

    maps = []
    for q in range(m):
        table = coeff_tables[q]
        top = max(table) if table else 0
        mats = [table.get(e, linalg.zeros(dims[q + 1], dims[q])) for e in range(top + 1)]
        maps.append(MapFamily.build(mats, 0, None, center, (dims[q + 1], dims[q])))

    if not profile.trivial_gauge:
        gauges, inverses = [], []
        for n in dims:
            perm = _permutation(n, rng)
            U = _unitriangular(n, profile.gauge_degree, center, rng)
            # (U Perm)^-1 = Perm^T U^-1
            gauges.append(map_mul(U, MapFamily.constant(perm, center)))
            inverses.append(map_mul(MapFamily.constant(linalg.conj_transpose(perm), center), _unitriangular_inverse(U)))
        maps = [map_mul(map_mul(gauges[q + 1], P), inverses[q]) for q, P in enumerate(maps)]

    expected = [0] * (m + 1)
    for q, k in profile.blocks:
        expected[q] += k
    C = ComplexFamily.create(dims, maps, center)
    truth = {
        "seed": seed,
        "dims": expected,
        "adjoint_dims": [expected[q] for q in range(m + 1)],
        "blocks": [list(b) for b in profile.blocks],
        "pads": pads,
    }
    logger.debug(f"generated gauge complex dims={dims} blocks={profile.blocks} seed={seed}")
    return C, truth
