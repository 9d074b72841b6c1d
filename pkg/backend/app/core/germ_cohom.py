"""
Germ cohomology of a holomorphic complex at its center.

Singular parts u = sum_{l=1}^{N} u_{-l} (sigma - c)^{-l} are stored as stacked
coordinate vectors [u_{-1}; ...; u_{-N}], and a holomorphic family acts on them
by the block upper-triangular Toeplitz matrix of its Taylor coefficients.
The cohomology ker sP_q / range sP_{q-1} is computed at a depth certified by
the Green pole order and an incoming window from the local Smith form of
P_{q-1}.
"""

import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from app.core import linalg, polynomials
from app.core.errors import (
    CenterMismatchError,
    IdentityViolationError,
    InconsistencyError,
    InsufficientTruncationError,
    NotClosedError,
    NotLocallyInvertibleError,
    SingularFamilyError,
)
from app.core.holo_complex import (
    ComplexFamily,
    adjoint_map,
    derivative_pair,
    expand_complex_at,
    laplacian_family,
)
from app.core.linalg import Matrix
from app.core.matrix_series import (
    MapFamily,
    SmithForm,
    generic_rank,
    local_inverse,
    local_smith_form,
    map_mul,
    smith_diagonal,
    translate_family,
)
from app.core.scalar_series import I_UNIT, ZERO, ExactScalar, as_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PrincipalPart:
    """Coordinates u_{-1}, ..., u_{-N} of a singular part at ``center``."""

    center: ExactScalar
    dim: int
    coeffs: Tuple[Matrix, ...]

    @classmethod
    def from_vector(cls, v: Matrix, dim: int, center: Any = ZERO) -> "PrincipalPart":
        if dim == 0:
            return cls(as_scalar(center), 0, ())
        depth = v.shape[0] // dim
        coeffs = tuple(v[l * dim : (l + 1) * dim, :1].copy() for l in range(depth))
        return cls(as_scalar(center), dim, coeffs)

    @classmethod
    def from_lists(cls, coeffs: Sequence[Sequence[Any]], dim: int, center: Any = ZERO) -> "PrincipalPart":
        return cls(as_scalar(center), dim, tuple(linalg.to_vector(c) for c in coeffs))

    @classmethod
    def zero(cls, dim: int, depth: int = 0, center: Any = ZERO) -> "PrincipalPart":
        return cls(as_scalar(center), dim, tuple(linalg.zeros(dim, 1) for _ in range(depth)))

    @classmethod
    def from_family(cls, g: MapFamily, depth: int) -> "PrincipalPart":
        """Singular part of an n x 1 Laurent family, read to pole order ``depth``."""
        return cls(g.center, g.rows, tuple(g.coeff(-l).copy() for l in range(1, depth + 1)))

    @property
    def depth(self) -> int:
        return len(self.coeffs)

    @property
    def pole_order(self) -> int:
        for l in range(self.depth, 0, -1):
            if not linalg.is_zero(self.coeffs[l - 1]):
                return l
        return 0

    @property
    def is_zero(self) -> bool:
        return self.pole_order == 0

    def to_vector(self, depth: Optional[int] = None) -> Matrix:
        depth = self.depth if depth is None else depth
        if self.pole_order > depth:
            raise InsufficientTruncationError(f"pole order {self.pole_order} exceeds depth {depth}")
        out = linalg.zeros(self.dim * depth, 1)
        for l in range(min(depth, self.depth)):
            out[l * self.dim : (l + 1) * self.dim, :] = self.coeffs[l]
        return out

    def as_family(self) -> MapFamily:
        if not self.coeffs:
            return MapFamily.zero(self.dim, 1, self.center)
        return MapFamily.build(list(reversed(self.coeffs)), -self.depth, None, self.center, (self.dim, 1))

    def __add__(self, other: "PrincipalPart") -> "PrincipalPart":
        depth = max(self.depth, other.depth)
        return PrincipalPart.from_vector(
            linalg.add(self.to_vector(depth), other.to_vector(depth)), self.dim, self.center
        )

    def __sub__(self, other: "PrincipalPart") -> "PrincipalPart":
        return self + other.scale(-1)

    def scale(self, factor: Any) -> "PrincipalPart":
        return PrincipalPart(self.center, self.dim, tuple(linalg.scale(c, factor) for c in self.coeffs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": str(self.center),
            "coeffs": [[str(x) for x in c[:, 0]] for c in self.coeffs[: self.pole_order]],
        }


@dataclass
class CohomBasis:
    degree: int
    depth: int
    center: ExactScalar
    dim_space: int
    reps: List[PrincipalPart]
    boundaries: Matrix
    incoming: int = 0

    @property
    def dim(self) -> int:
        return len(self.reps)

    def rep_matrix(self) -> Matrix:
        if not self.reps:
            return linalg.zeros(self.dim_space * self.depth, 0)
        return linalg.hstack([u.to_vector(self.depth) for u in self.reps])

    def coordinates(self, u: PrincipalPart) -> Matrix:
        """Coefficients of the class of a cycle u in this basis."""
        v = u.to_vector(self.depth)
        system = linalg.hstack([self.rep_matrix(), self.boundaries], rows=v.shape[0])
        try:
            x = linalg.solve(system, v)
        except NotLocallyInvertibleError:
            raise NotClosedError(f"element is not a cycle of degree {self.degree} at depth {self.depth}")
        return x[: self.dim, :]

    def is_boundary(self, u: PrincipalPart) -> bool:
        return linalg.in_span(self.boundaries, u.to_vector(self.depth))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "center": str(self.center),
            "depth": self.depth,
            "incoming": self.incoming,
            "dim": self.dim,
            "reps": [u.to_dict() for u in self.reps],
        }


def germ_map_matrix(P: MapFamily, N_in: int, N_out: int) -> Matrix:
    """
    Matrix of u -> sP u from depth N_in to depth N_out.

    Block (m, l) is P_{l-m} for l >= m, so (sPu)_{-m} = sum_k P_k u_{-(m+k)}.
    """
    if not P.holomorphic_flag:
        raise SingularFamilyError("germ maps need a holomorphic family")
    rows, cols = P.shape
    out = linalg.zeros(rows * N_out, cols * N_in)
    if rows == 0 or cols == 0:
        return out
    taylor = [P.coeff(k) for k in range(max(N_in, 0))]
    for m in range(1, N_out + 1):
        for l in range(m, N_in + 1):
            block = taylor[l - m]
            if not linalg.is_zero(block):
                out[(m - 1) * rows : m * rows, (l - 1) * cols : l * cols] = block
    return out


def _boundary_space(C: ComplexFamily, q: int, N: int, K: int) -> Matrix:
    """Boundaries of depth <= N, from primitives of depth <= N + K."""
    n = C.dim(q)
    if C.dim(q - 1) == 0 or n == 0:
        return linalg.zeros(n * N, 0)
    A = germ_map_matrix(C.map_at(q - 1), N + K, N + K)
    top, deep = A[: n * N, :], A[n * N :, :]
    primitives = linalg.nullspace(deep) if K > 0 else linalg.identity(A.shape[1])
    return linalg.column_space(linalg.matmul(top, primitives))


def _quotient_reps(Z: Matrix, B: Matrix, n: int, N: int) -> List[Matrix]:
    """
    Cycle representatives independent modulo B, ordered by (pole order, index).

    The cycle basis is put in echelon form with the deepest coordinates first,
    so every vector is led by its pole order.
    """
    if Z.shape[1] == 0:
        return []
    perm = [(l - 1) * n + i for l in range(N, 0, -1) for i in range(n)]
    R, pivots = linalg.rref(Z.T[:, perm])
    candidates = []
    for row, p in enumerate(pivots):
        vec = linalg.zeros(n * N, 1)
        for j, coord in enumerate(perm):
            vec[coord, 0] = R[row, j]
        pole, index = N - p // n, p % n
        candidates.append(((pole, index), vec))
    candidates.sort(key=lambda item: item[0])
    kept: List[Matrix] = []
    span = B
    for _, vec in candidates:
        if not linalg.in_span(span, vec):
            kept.append(vec)
            span = linalg.hstack([span, vec])
    return kept


def cohomology_at(C: ComplexFamily, q: int, N: int, incoming: Optional[int] = None) -> CohomBasis:
    """
    ker sP_q / range sP_{q-1} on singular parts of depth <= N.

    Args:
        C: the complex.
        q: degree.
        N: depth, at least 1.
        incoming: depth window for primitives of boundaries; computed from the
            local Smith form of P_{q-1} when omitted.

    Returns:
        CohomBasis with deterministic representatives.
    """
    if N < 1:
        raise ValueError("depth must be at least 1")
    if incoming is None:
        incoming = incoming_depth(C, q)
    n = C.dim(q)
    Z = linalg.nullspace(germ_map_matrix(C.map_at(q), N, N))
    B = _boundary_space(C, q, N, incoming)
    reps = [PrincipalPart.from_vector(v, n, C.center) for v in _quotient_reps(Z, B, n, N)]
    logger.debug(
        f"degree {q} depth {N}: {Z.shape[1]} cycles, {B.shape[1]} boundaries, {len(reps)} classes"
    )
    return CohomBasis(q, N, C.center, n, reps, B, incoming)


def _laplacian_smith(C: ComplexFamily, q: int) -> Tuple[MapFamily, SmithForm]:
    box = laplacian_family(C, q)
    try:
        smith = local_smith_form(box)
    except InsufficientTruncationError as e:
        raise SingularFamilyError(f"Laplacian in degree {q} is singular to the available order: {e.message}")
    if len(smith.exponents) < C.dim(q):
        raise SingularFamilyError(f"Laplacian in degree {q} is not generically invertible")
    return box, smith


def green_pole_order(C: ComplexFamily, q: int) -> int:
    """Pole order of the inverse Laplacian at the center: its largest local Smith exponent."""
    if C.dim(q) == 0:
        return 0
    _, smith = _laplacian_smith(C, q)
    return max(smith.exponents, default=0)


def incoming_depth(C: ComplexFamily, q: int) -> int:
    """
    K such that a boundary of depth N has a primitive of depth N + K.

    Largest local Smith exponent of P_{q-1}; the Green pole order in degree
    q-1 when that Smith form cannot be certified.
    """
    if q <= 0 or C.dim(q - 1) == 0 or C.dim(q) == 0:
        return 0
    P = C.map_at(q - 1)
    if P.exact and P.is_zero:
        return 0
    try:
        return max(local_smith_form(P).exponents, default=0)
    except InsufficientTruncationError as e:
        logger.debug(f"incoming window for degree {q} falls back to the Green order: {e.message}")
        return green_pole_order(C, q - 1)


def stabilized_cohomology(C: ComplexFamily, q: int) -> CohomBasis:
    """Cohomology at the certified depth max(L, 1), with the same count required at depth + 1."""
    L = green_pole_order(C, q)
    N = max(L, 1)
    K = incoming_depth(C, q)
    basis = cohomology_at(C, q, N, K)
    deeper = cohomology_at(C, q, N + 1, K)
    if deeper.dim != basis.dim:
        raise InconsistencyError(
            f"degree {q} cohomology not stable: dim {basis.dim} at depth {N}, {deeper.dim} at depth {N + 1}",
            {"degree": q, "depth": N, "dims": [basis.dim, deeper.dim]},
        )
    return basis


class NormalizedRep(NamedTuple):
    rep: PrincipalPart
    witness: PrincipalPart


def _is_cycle(C: ComplexFamily, q: int, u: PrincipalPart) -> bool:
    N = max(u.depth, 1)
    return linalg.is_zero(linalg.matmul(germ_map_matrix(C.map_at(q), N, N), u.to_vector(N)))


def _apply_green(smith: SmithForm, h: MapFamily, L: int) -> MapFamily:
    """Laurent family G h for holomorphic h, known through exponent -1."""
    U, exponents, V = smith
    n = U.rows
    x = map_mul(local_inverse(U, L), h).truncate(L - 1)
    y = map_mul(smith_diagonal([-e for e in exponents], n, n, U.center), x)
    return map_mul(local_inverse(V, L), y)


def representative_normalize(C: ComplexFamily, q: int, u: PrincipalPart) -> NormalizedRep:
    """
    The representative s(G_q P_q^*(sigma - 2i Im c) P_q u) of the class of u.

    Returns the new representative, of pole order at most the Green pole order,
    and a witness w with sP_{q-1} w = rep - u.
    """
    if not _is_cycle(C, q, u):
        raise NotClosedError(f"element is not closed under P_{q}")
    n = C.dim(q)
    L = green_pole_order(C, q)
    if L == 0 or u.is_zero:
        rep = PrincipalPart.zero(n, max(L, 1), C.center)
    else:
        _, smith = _laplacian_smith(C, q)
        shift = -2 * I_UNIT * C.center.im
        P = C.map_at(q)
        h = map_mul(translate_family(adjoint_map(C, q), shift), map_mul(P, u.as_family()))
        rep = PrincipalPart.from_family(_apply_green(smith, h, L), L)

    depth = max(u.depth, rep.depth, 1)
    diff = (rep - u).to_vector(depth)
    if C.dim(q - 1) == 0:
        if not linalg.is_zero(diff):
            raise InconsistencyError("normalized representative differs from a class with no boundaries")
        return NormalizedRep(rep, PrincipalPart.zero(C.dim(q - 1), 0, C.center))
    K = incoming_depth(C, q)
    A = germ_map_matrix(C.map_at(q - 1), depth + K, depth + K)
    target = linalg.vstack([diff, linalg.zeros(n * K, 1)])
    try:
        w = linalg.solve(A, target)
    except NotLocallyInvertibleError:
        raise InconsistencyError(f"normalized representative is not cohomologous to the input in degree {q}")
    return NormalizedRep(rep, PrincipalPart.from_vector(w, C.dim(q - 1), C.center))


def executor_for(workers: int) -> Executor:
    """Process pool for workers > 1, a single worker thread otherwise."""
    if workers and workers > 1:
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=1)


@dataclass
class SpectrumReport:
    degree: int
    determinant: Optional[str]
    degeneracy: List[str]
    candidates: List[Dict[str, Any]]
    unresolved: List[str] = field(default_factory=list)

    @property
    def spectrum(self) -> List[ExactScalar]:
        return [c["point"] for c in self.candidates if c.get("dim")]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "determinant": self.determinant,
            "degeneracy": self.degeneracy,
            "candidates": [{**c, "point": str(c["point"])} for c in self.candidates],
            "spectrum": [str(p) for p in self.spectrum],
            "unresolved": self.unresolved,
        }


def _scan_point(C: ComplexFamily, q: int, point: ExactScalar) -> Dict[str, Any]:
    try:
        local = expand_complex_at(C, point) if point != C.center else C
        basis = stabilized_cohomology(local, q)
    except (SingularFamilyError, InsufficientTruncationError) as e:
        return {"point": point, "dim": None, "depth": None, "error": e.message}
    return {"point": point, "dim": basis.dim, "depth": basis.depth}


def spectrum_scan(
    C: ComplexFamily,
    q: int,
    candidates: Optional[Iterable[Any]] = None,
    workers: int = 1,
) -> SpectrumReport:
    """
    Points where degree-q germ cohomology is nonzero.

    Candidates are the Gaussian-rational roots of det Box_q united with the
    roots of the degeneracy polynomials of P_q and P_{q-1}; irreducible
    nonlinear factors are reported unresolved.
    """
    sources: Dict[ExactScalar, List[str]] = {}
    det_text = None
    degeneracy_text: List[str] = []
    unresolved: List[str] = []
    if candidates is not None:
        for c in candidates:
            sources.setdefault(as_scalar(c), []).append("given")
    else:
        if not C.is_polynomial:
            raise InsufficientTruncationError("spectrum scan needs a polynomial complex or a candidate list")
        det = polynomials.determinant(laplacian_family(C, q))
        if det.is_zero:
            raise SingularFamilyError(f"det of the degree {q} Laplacian vanishes identically")
        det_text = polynomials.poly_to_str(det)
        roots, rest = polynomials.split_roots(det)
        unresolved.extend(rest)
        for r in roots:
            sources.setdefault(r, []).append("laplacian")
        for label, degree in (("P_q", q), ("P_q-1", q - 1)):
            P = C.map_at(degree)
            if P.rows == 0 or P.cols == 0:
                continue
            poly = polynomials.degeneracy_polynomial(P, generic_rank(P))
            degeneracy_text.append(polynomials.poly_to_str(poly))
            if poly.is_zero:
                continue
            roots, rest = polynomials.split_roots(poly)
            unresolved.extend(r for r in rest if r not in unresolved)
            for r in roots:
                sources.setdefault(r, []).append(label)

    points = sorted(sources, key=lambda z: (z.re, z.im))
    with executor_for(workers) as executor:
        results = list(executor.map(partial(_scan_point, C, q), points))
    for entry in results:
        entry["sources"] = sources[entry["point"]]
    logger.debug(f"spectrum scan degree {q}: {len(points)} candidate(s)")
    return SpectrumReport(q, det_text, degeneracy_text, results, unresolved)


def smith_oracle_dims(P: MapFamily) -> List[Optional[int]]:
    """
    [dim H^0, dim H^1] of the two-term complex 0 -> F_0 --P--> F_1 -> 0 from
    local Smith exponents; None marks an infinite-dimensional group.
    """
    smith = local_smith_form(P)
    rank = len(smith.exponents)
    h0 = sum(smith.exponents) if rank == P.cols else None
    h1 = 0 if rank == P.rows else None
    return [h0, h1]


def constant_complex_exact(C: ComplexFamily, q: int) -> bool:
    """Exactness in degree q of the constant complex P(c)."""
    upper = C.map_at(q).coeff(0)
    lower = C.map_at(q - 1).coeff(0)
    return linalg.rank(upper) + linalg.rank(lower) == C.dim(q)


@dataclass
class InducedMaps:
    bases: List[CohomBasis]
    matrices: List[Matrix]
    squares_to_zero: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": [b.dim for b in self.bases],
            "depth": self.bases[0].depth if self.bases else 0,
            "maps": [linalg.to_lists(M) for M in self.matrices],
            "squares_to_zero": self.squares_to_zero,
        }


def _require_zero(total: MapFamily, label: str, q: int):
    if total.is_zero:
        return
    exponent = total.valuation
    lead = total.coeffs[0]
    i, j = next((i, j) for i in range(lead.shape[0]) for j in range(lead.shape[1]) if lead[i, j])
    raise IdentityViolationError(f"{label} is not zero", {"q": q, "exponent": exponent, "entry": [i, j]})


def _check_anticommute(C: ComplexFamily, T: Sequence[MapFamily]):
    for q in range(C.length - 1):
        total = map_mul(C.maps[q + 1], T[q]) + map_mul(T[q + 1], C.maps[q])
        _require_zero(total, f"P_{q + 1} T_{q} + T_{q + 1} P_{q}", q)


def _check_witness(C: ComplexFamily, T: Sequence[MapFamily], S: Sequence[MapFamily]):
    for q in range(C.length - 1):
        total = map_mul(T[q + 1], T[q]) + map_mul(C.maps[q + 1], S[q]) + map_mul(S[q + 1], C.maps[q])
        _require_zero(total, f"T_{q + 1} T_{q} + P_{q + 1} S_{q} + S_{q + 1} P_{q}", q)



def induced_degree1_map(
    C: ComplexFamily,
    T: Sequence[MapFamily],
    S: Optional[Sequence[MapFamily]] = None,
    depth: Optional[int] = None,
) -> InducedMaps:
    """
    Maps H^q -> H^{q+1} induced by families T_q anticommuting with P.

    All bases are taken at one common depth: the largest certified depth, or
    ``depth`` when given (for complexes whose cohomology is not finite).
    With a witness S the composite of consecutive induced maps is checked to
    vanish.
    """
    m = C.length
    if len(T) != m:
        raise IdentityViolationError(f"expected {m} families T_q, got {len(T)}")
    _check_anticommute(C, T)
    if depth is None:
        depth = max([max(green_pole_order(C, q), 1) for q in range(m + 1)])
    bases = [cohomology_at(C, q, depth, incoming_depth(C, q)) for q in range(m + 1)]
    matrices: List[Matrix] = []
    for q in range(m):
        source, target = bases[q], bases[q + 1]
        action = germ_map_matrix(T[q], depth, depth)
        closer = germ_map_matrix(C.map_at(q + 1), depth, depth)
        columns = []
        for u in source.reps:
            image = linalg.matmul(action, u.to_vector(depth))
            if not linalg.is_zero(linalg.matmul(closer, image)):
                raise InconsistencyError(f"T_{q} sends a cycle of degree {q} to a non-cycle")
            columns.append(target.coordinates(PrincipalPart.from_vector(image, C.dim(q + 1), C.center)))
        for k in range(source.boundaries.shape[1]):
            image = linalg.matmul(action, source.boundaries[:, k : k + 1])
            if not target.is_boundary(PrincipalPart.from_vector(image, C.dim(q + 1), C.center)):
                raise InconsistencyError(f"T_{q} sends a boundary of degree {q} to a nontrivial class")
        matrices.append(linalg.hstack(columns, rows=target.dim))
    squares = None
    if S is not None:
        _check_witness(C, T, S)
        for q in range(m - 1):
            if not linalg.is_zero(linalg.matmul(matrices[q + 1], matrices[q])):
                raise InconsistencyError(f"induced maps do not compose to zero at degree {q}")
        squares = True
    return InducedMaps(bases, matrices, squares)


def derivative_secondary(C: ComplexFamily, depth: Optional[int] = None) -> InducedMaps:
    """Maps induced by T = P' with witness S = P''/2."""
    T, S = derivative_pair(C)
    return induced_degree1_map(C, T, S, depth)


def apply_family(F: MapFamily, u: PrincipalPart) -> PrincipalPart:
    """Singular part of F u for a holomorphic family F at the center of u."""
    if F.center != u.center:
        raise CenterMismatchError(f"family at {F.center} applied to a singular part at {u.center}")
    depth = max(u.pole_order, 1)
    image = linalg.matmul(germ_map_matrix(F, depth, depth), u.to_vector(depth))
    return PrincipalPart.from_vector(image, F.rows, u.center)


def sigma_multiply(u: PrincipalPart) -> PrincipalPart:
    """s((sigma - c) u): every coefficient moves one pole order down, u_{-1} drops out."""
    return PrincipalPart(u.center, u.dim, tuple(c.copy() for c in u.coeffs[1:]))


def sigma_divide_part(u: PrincipalPart) -> PrincipalPart:
    """u / (sigma - c), one pole order deeper."""
    return PrincipalPart(u.center, u.dim, (linalg.zeros(u.dim, 1),) + tuple(c.copy() for c in u.coeffs))
