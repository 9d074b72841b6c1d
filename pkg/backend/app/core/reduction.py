"""
Reduction of a complex to its harmonic part at the center.

At the center c each F_q splits orthogonally as N_q + R*_q + R_q with
N_q = ker P_q(c) ∩ ker P_{q-1}*(c), R*_q = range P_q(c)*, R_q = range P_{q-1}(c).
In these coordinates only the block P_{q,32}: R*_q -> R_{q+1} survives at the
center, and eliminating it gives the Schur complement

    P~_q = P_{q,11} - P_{q,12} P_{q,32}^-1 P_{q,31}

on the N spaces, homotopy equivalent to P and vanishing at c.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from app.core import linalg
from app.core.errors import (
    InconsistencyError,
    InsufficientTruncationError,
    NotClosedError,
    NotLocallyInvertibleError,
    SingularFamilyError,
)
from app.core.germ_cohom import (
    PrincipalPart,
    apply_family,
    green_pole_order,
    incoming_depth,
    representative_normalize,
    sigma_divide_part,
    sigma_multiply,
    stabilized_cohomology,
)
from app.core.holo_complex import (
    ComplexFamily,
    adjoint_complex,
    adjoint_degree,
    translate_complex,
)
from app.core.linalg import Matrix
from app.core.matrix_series import MapFamily, adjoint_family, local_inverse, map_mul
from app.core.residue_pairing import cohomology_pairing_matrix, germ_pairing
from app.core.scalar_series import DEFAULT_INVERSE_ORDER, ONE, ZERO

logger = logging.getLogger(__name__)


@dataclass
class HodgeData:
    """Per-degree bases of N_q, R*_q, R_q and the change of basis S_q = [N | R* | R]."""

    center: Any
    N: List[Matrix]
    Rstar: List[Matrix]
    R: List[Matrix]
    grams: List[Matrix]

    def basis(self, q: int) -> Matrix:
        return linalg.hstack([self.N[q], self.Rstar[q], self.R[q]], rows=self.N[q].shape[0])

    def sizes(self, q: int) -> Tuple[int, int, int]:
        return self.N[q].shape[1], self.Rstar[q].shape[1], self.R[q].shape[1]

    def projection(self, q: int, part: str) -> Matrix:
        """Projection onto one summand along the other two."""
        S = self.basis(q)
        a, b, c = self.sizes(q)
        select = {"N": range(0, a), "Rstar": range(a, a + b), "R": range(a + b, a + b + c)}[part]
        E = linalg.zeros(S.shape[1], S.shape[1])
        for k in select:
            E[k, k] = ONE
        return linalg.matmul(linalg.matmul(S, E), linalg.inverse(S))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": str(self.center),
            "dims": [list(self.sizes(q)) for q in range(len(self.N))],
        }


def _gram(C: ComplexFamily, q: int) -> Matrix:
    G = C.gram(q)
    return linalg.identity(C.dim(q)) if G is None else G


def _constant_adjoint(C: ComplexFamily, q: int) -> Matrix:
    """G_q^-1 P_q(c)^H G_{q+1}."""
    A = C.map_at(q).coeff(0)
    return linalg.matmul(linalg.matmul(linalg.inverse(_gram(C, q)), linalg.conj_transpose(A)), _gram(C, q + 1))


def hodge_decompose(C: ComplexFamily) -> HodgeData:
    """Kernel, coimage and image splitting of the constant complex at the center."""
    N, Rstar, R = [], [], []
    for q in range(C.length + 1):
        n = C.dim(q)
        G = _gram(C, q)
        if not linalg.is_hermitian_positive(G):
            raise SingularFamilyError(f"Gram matrix of F_{q} is not positive definite")
        here = C.map_at(q).coeff(0)
        back = _constant_adjoint(C, q - 1)
        N.append(linalg.nullspace(linalg.vstack([here, back], cols=n)))
        Rstar.append(linalg.column_space(_constant_adjoint(C, q)))
        R.append(linalg.column_space(C.map_at(q - 1).coeff(0)))
        total = N[-1].shape[1] + Rstar[-1].shape[1] + R[-1].shape[1]
        if total != n:
            raise InconsistencyError(f"Hodge summands of F_{q} have total dimension {total}, expected {n}")
    logger.debug(f"Hodge sizes {[(a.shape[1], b.shape[1], c.shape[1]) for a, b, c in zip(N, Rstar, R)]}")
    return HodgeData(C.center, N, Rstar, R, [_gram(C, q) for q in range(C.length + 1)])


@dataclass
class ReductionData:
    hodge: HodgeData
    Q: List[MapFamily]
    Phi: List[MapFamily]
    Psi: List[MapFamily]
    ptilde: ComplexFamily
    source: ComplexFamily = field(repr=False)

    def phi_star(self, q: int) -> MapFamily:
        """Adjoint of Phi_q : F_q -> N_q, a map N_q -> F_q at the conjugate center."""
        return adjoint_family(self.Phi[q], self.hodge.grams[q], self.ptilde.gram(q))

    def psi_star(self, q: int) -> MapFamily:
        """Adjoint of Psi_q : N_q -> F_q, a map F_q -> N_q at the conjugate center."""
        return adjoint_family(self.Psi[q], self.ptilde.gram(q), self.hodge.grams[q])

    def verify(self):
        """Raise InconsistencyError unless every homotopy identity holds up to order."""
        C, Pt = self.source, self.ptilde
        for q in range(C.length + 1):
            n = C.dim(q)
            phipsi = map_mul(self.Phi[q], self.Psi[q])
            if not (phipsi - MapFamily.identity(Pt.dim(q), C.center)).is_zero:
                raise InconsistencyError(f"Phi_{q} Psi_{q} is not the identity")
            homotopy = map_mul(self.Q[q + 1], C.map_at(q)) if q < C.length else MapFamily.zero(n, n, C.center)
            if q > 0:
                homotopy = homotopy + map_mul(C.map_at(q - 1), self.Q[q])
            lhs = map_mul(self.Psi[q], self.Phi[q])
            rhs = MapFamily.identity(n, C.center) - homotopy
            if not (lhs - rhs).is_zero:
                raise InconsistencyError(f"Psi_{q} Phi_{q} differs from I - (QP + PQ)")
        for q in range(Pt.length):
            if not linalg.is_zero(Pt.maps[q].coeff(0)):
                raise InconsistencyError(f"reduced map {q} does not vanish at the center")
            if not (map_mul(Pt.maps[q], self.Phi[q]) - map_mul(self.Phi[q + 1], C.maps[q])).is_zero:
                raise InconsistencyError(f"Phi is not a chain map at degree {q}")
            if not (map_mul(C.maps[q], self.Psi[q]) - map_mul(self.Psi[q + 1], Pt.maps[q])).is_zero:
                raise InconsistencyError(f"Psi is not a chain map at degree {q}")
        for q in range(Pt.length - 1):
            if not map_mul(Pt.maps[q + 1], Pt.maps[q]).is_zero:
                raise InconsistencyError(f"reduced complex fails composition-zero at degree {q}")


def schur_reduce(C: ComplexFamily, order: Optional[int] = None, checked: bool = True) -> ReductionData:
    """
    Reduced complex on the N spaces together with Phi, Psi and the homotopy Q.

    Args:
        C: complex at any center; blocks are taken at C.center.
        order: truncation order for P_{q,32}^-1 when it is not a constant.
        checked: verify the homotopy identities.
    """
    order = DEFAULT_INVERSE_ORDER if order is None else order
    hodge = hodge_decompose(C)
    m = C.length
    S = [hodge.basis(q) for q in range(m + 1)]
    Sinv = [linalg.inverse(s) for s in S]

    def rows(q: int, part: str) -> Matrix:
        a, b, c = hodge.sizes(q)
        span = {"N": (0, a), "Rstar": (a, a + b), "R": (a + b, a + b + c)}[part]
        return Sinv[q][span[0] : span[1], :]

    def cols(q: int, part: str) -> Matrix:
        return {"N": hodge.N, "Rstar": hodge.Rstar, "R": hodge.R}[part][q]

    def block(q: int, row: str, col: str) -> MapFamily:
        return C.maps[q].block(rows(q + 1, row), cols(q, col))

    inv32: List[MapFamily] = []
    p12, p31, p11 = [], [], []
    for q in range(m):
        p32 = block(q, "R", "Rstar")
        try:
            inv32.append(local_inverse(p32, order))
        except NotLocallyInvertibleError:
            raise InconsistencyError(f"block R*_{q} -> R_{q + 1} is singular at the center")
        p11.append(block(q, "N", "N"))
        p12.append(block(q, "N", "Rstar"))
        p31.append(block(q, "R", "N"))

    center = C.center
    reduced = [p11[q] - map_mul(map_mul(p12[q], inv32[q]), p31[q]) for q in range(m)]

    Phi, Psi = [], []
    for q in range(m + 1):
        phi = MapFamily.constant(rows(q, "N"), center)
        if q > 0:
            phi = phi - map_mul(map_mul(p12[q - 1], inv32[q - 1]), MapFamily.constant(rows(q, "R"), center))
        Phi.append(phi)
        psi = MapFamily.constant(cols(q, "N"), center)
        if q < m:
            correction = map_mul(inv32[q], p31[q])
            psi = psi - map_mul(MapFamily.constant(cols(q, "Rstar"), center), correction)
        Psi.append(psi)

    # Q_q : F_q -> F_{q-1}, nonzero only on R_q -> R*_{q-1}
    Q = [MapFamily.zero(0, C.dim(0), center)]
    for q in range(1, m + 1):
        Q.append(inv32[q - 1].block(cols(q - 1, "Rstar"), rows(q, "R")))
    Q.append(MapFamily.zero(C.dim(m), 0, center))

    grams = [
        linalg.matmul(linalg.matmul(linalg.conj_transpose(hodge.N[q]), hodge.grams[q]), hodge.N[q])
        for q in range(m + 1)
    ]
    dims = [hodge.N[q].shape[1] for q in range(m + 1)]
    ptilde = ComplexFamily(tuple(dims), tuple(reduced), center, tuple(grams))
    data = ReductionData(hodge, Q, Phi, Psi, ptilde, C)
    if checked:
        data.verify()
    logger.debug(f"Schur reduction: dims {C.dims} -> {tuple(dims)}")
    return data


def pairing_transport(
    C: ComplexFamily, red: ReductionData, q: int, u: PrincipalPart, v: PrincipalPart
) -> Any:
    """
    <Phi_q u, Psi*_{q+1} v> on the reduced complex, required to equal <u, v> on C.
    """
    A = adjoint_complex(C)
    if not _closed(C, q, u):
        raise NotClosedError(f"u is not closed in degree {q}")
    if not _closed(A, adjoint_degree(C, q), v):
        raise NotClosedError(f"v is not closed for the adjoint in degree {q + 1}")
    direct = germ_pairing(C.maps[q], u, v, C.gram(q + 1))
    reduced = germ_pairing(
        red.ptilde.maps[q],
        apply_family(red.Phi[q], u),
        apply_family(red.psi_star(q + 1), v),
        red.ptilde.gram(q + 1),
    )
    if reduced != direct:
        raise InconsistencyError(
            f"reduced pairing {reduced} differs from the direct pairing {direct} in degree {q}"
        )
    return reduced


def _closed(C: ComplexFamily, q: int, u: PrincipalPart) -> bool:
    if u.is_zero:
        return True
    return apply_family(C.map_at(q), u).is_zero


def sigma_divide(C: ComplexFamily) -> ComplexFamily:
    """P^_q = P_q / (sigma - c) for a complex vanishing at its center."""
    maps = []
    for q, P in enumerate(C.maps):
        try:
            maps.append(P.divide_by_sigma())
        except NotLocallyInvertibleError:
            raise NotLocallyInvertibleError(f"P_{q} does not vanish at the center")
    return C.replace_maps(maps)


def j_map(u: PrincipalPart) -> PrincipalPart:
    """Classes of the divided complex are classes of the original with the same representative."""
    return PrincipalPart(u.center, u.dim, u.coeffs)


@dataclass
class LevelReport:
    level: int
    dim: int
    adjoint_dim: int
    new: int
    filtration: List[int]
    js_checks: int
    range_dim: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "dim": self.dim,
            "adjoint_dim": self.adjoint_dim,
            "new": self.new,
            "filtration": self.filtration,
            "js_checks": self.js_checks,
            "range_dim": self.range_dim,
        }


@dataclass
class Certificate:
    degree: int
    dim: int
    adjoint_dim: int
    levels: List[LevelReport]
    classes: List[PrincipalPart]
    partners: List[PrincipalPart]
    matrix: Matrix
    direct_dim: int
    direct_adjoint_dim: int
    cross_check: bool

    @property
    def passed(self) -> bool:
        return self.cross_check and self.dim == self.adjoint_dim

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "dim": self.dim,
            "adjoint_dim": self.adjoint_dim,
            "direct_dim": self.direct_dim,
            "direct_adjoint_dim": self.direct_adjoint_dim,
            "levels": [lv.to_dict() for lv in self.levels],
            "classes": [u.to_dict() for u in self.classes],
            "partners": [v.to_dict() for v in self.partners],
            "pairing": linalg.to_lists(self.matrix),
            "cross_check": self.cross_check,
        }


def _sigma_matrix(basis) -> Matrix:
    """Multiplication by sigma on H^q in the coordinates of the basis."""
    return linalg.hstack([basis.coordinates(sigma_multiply(u)) for u in basis.reps], rows=basis.dim)


def _filtration(q: int, basis, S: Matrix) -> List[int]:
    """dim range sigma^k on H^q for k = 0, 1, ... until it vanishes."""
    if basis.dim == 0:
        return [0]
    power = linalg.identity(basis.dim)
    dims = []
    for _ in range(basis.depth + 1):
        dims.append(linalg.rank(power))
        if dims[-1] == 0:
            return dims
        power = linalg.matmul(S, power)
    raise InconsistencyError(f"sigma is not nilpotent on degree {q} cohomology")


def _check_division_range(level: int, S: Matrix, J: Matrix) -> int:
    """range j = range sigma on H^q; returns their common dimension."""
    sigma_rank = linalg.rank(S)
    j_rank = linalg.rank(J)
    joint = linalg.rank(linalg.hstack([S, J], rows=S.shape[0]))
    if not sigma_rank == j_rank == joint:
        raise InconsistencyError(
            f"level {level}: range of j differs from range of sigma",
            {"sigma_rank": sigma_rank, "j_rank": j_rank, "joint_rank": joint},
        )
    if j_rank != J.shape[1]:
        raise InconsistencyError(f"level {level}: j is not injective on divided classes")
    return j_rank


def _pair_lists(P: MapFamily, us: List[PrincipalPart], vs: List[PrincipalPart], gram) -> Matrix:
    M = linalg.zeros(len(us), len(vs))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            M[i, j] = germ_pairing(P, u, v, gram)
    return M


def _certify_level(
    C: ComplexFamily, q: int, order: int, level: int, max_levels: int, reports: List[LevelReport]
) -> Tuple[List[PrincipalPart], List[PrincipalPart]]:
    """
    Classes of H^q(C) and adjoint partners with a nonsingular pairing matrix,
    C centered at 0.
    """
    if level > max_levels:
        raise InsufficientTruncationError(f"reduction did not terminate within {max_levels} levels")
    red = schur_reduce(C, order)
    Pt = red.ptilde
    if Pt.dim(q) == 0:
        reports.append(LevelReport(level, 0, 0, 0, [0], 0))
        return [], []
    basis = stabilized_cohomology(Pt, q)
    adjoint_basis = stabilized_cohomology(adjoint_complex(Pt), adjoint_degree(Pt, q))
    if basis.dim == 0:
        reports.append(LevelReport(level, 0, adjoint_basis.dim, 0, [0], 0))
        return [], []

    P_q = Pt.maps[q]
    gram_next = Pt.gram(q + 1)
    divided = sigma_divide(Pt)
    old_classes, old_partners = _certify_level(divided, q, order, level + 1, max_levels, reports)

    # h(u) = (P~ u)_0 vanishes exactly on classes coming from the divided complex
    new_classes, new_partners, values = [], [], []
    for u in basis.reps:
        h = linalg.zeros(P_q.rows, 1)
        for l in range(1, u.pole_order + 1):
            h = linalg.add(h, linalg.matmul(P_q.coeff(l), u.coeffs[l - 1]))
        candidate = linalg.hstack(values + [h], rows=P_q.rows)
        if linalg.rank(candidate) > len(values):
            values.append(h)
            new_classes.append(u)
            new_partners.append(PrincipalPart.from_vector(h, P_q.rows, Pt.center.conjugate()))
    js_checks = 0
    lifted_old_partners = []
    for u_hat, w_hat in zip(old_classes, old_partners):
        v = sigma_divide_part(w_hat)
        lhs = germ_pairing(P_q, j_map(u_hat), v, gram_next)
        rhs = germ_pairing(divided.maps[q], u_hat, sigma_multiply(v), gram_next)
        if lhs != rhs:
            raise InconsistencyError(f"level {level}: divided pairing {rhs} differs from {lhs}")
        js_checks += 1
        lifted_old_partners.append(v)
    lifted_old = [j_map(u) for u in old_classes]
    classes = new_classes + lifted_old
    partners = new_partners + lifted_old_partners
    if len(classes) != basis.dim:
        raise InconsistencyError(
            f"level {level}: {len(new_classes)} new and {len(old_classes)} divided classes, expected {basis.dim}"
        )
    S = _sigma_matrix(basis)
    range_dim = _check_division_range(level, S, _coordinates(Pt, q, basis, lifted_old))
    reports.append(
        LevelReport(
            level, basis.dim, adjoint_basis.dim, len(new_classes), _filtration(q, basis, S), js_checks, range_dim
        )
    )
    return (
        [apply_family(red.Psi[q], u) for u in classes],
        [apply_family(red.phi_star(q + 1), v) for v in partners],
    )


def recursive_certify(C: ComplexFamily, q: int, order: Optional[int] = None) -> Certificate:
    """
    Nondegeneracy of the degree-q pairing by repeated reduction and division.

    Each level reduces to the harmonic part, splits off the classes with
    (P~ u)(0) != 0 (paired against (P~ u)(0)/sigma) and recurses on P~/sigma for
    the rest. Classes and partners are lifted back to C and compared with the
    direct computation.
    """
    theta = C.center
    base = translate_complex(C, theta)
    L = green_pole_order(C, q)
    direct = cohomology_pairing_matrix(C, q, checked=False)
    max_levels = direct.rows + 1
    budget = order if order is not None else max(DEFAULT_INVERSE_ORDER, 2 * (L + incoming_depth(C, q) + 2) + max_levels)
    reports: List[LevelReport] = []
    try:
        classes, partners = _certify_level(base, q, budget, 0, max_levels, reports)
    except InsufficientTruncationError as e:
        raise InsufficientTruncationError(f"order budget {budget} exhausted: {e.message}")
    reports.sort(key=lambda r: r.level)

    conj_theta = theta.conjugate()
    classes = [PrincipalPart(theta, u.dim, u.coeffs) for u in classes]
    partners = [PrincipalPart(conj_theta, v.dim, v.coeffs) for v in partners]
    M = _pair_lists(C.maps[q], classes, partners, C.gram(q + 1))

    cross = len(classes) == direct.rows and len(partners) == direct.cols
    if cross and classes:
        if linalg.det(M) == ZERO:
            raise InconsistencyError(f"lifted pairing matrix in degree {q} is singular")
        A = _coordinates(C, q, direct.row_basis, classes)
        B = _coordinates(adjoint_complex(C), adjoint_degree(C, q), direct.col_basis, partners)
        expected = linalg.matmul(linalg.matmul(A.T, direct.matrix), linalg.conj_transpose(B.T))
        cross = linalg.equal(expected, M) and linalg.rank(A) == len(classes) and linalg.rank(B) == len(partners)
    if not cross:
        raise InconsistencyError(
            f"recursive certification of degree {q} disagrees with the direct route",
            {"recursive": len(classes), "direct": [direct.rows, direct.cols]},
        )
    return Certificate(
        q, len(classes), len(partners), reports, classes, partners, M, direct.rows, direct.cols, cross
    )


def _coordinates(C: ComplexFamily, q: int, basis, parts: List[PrincipalPart]) -> Matrix:
    columns = []
    for u in parts:
        if u.pole_order > basis.depth:
            u = representative_normalize(C, q, u).rep
        columns.append(basis.coordinates(u))
    return linalg.hstack(columns, rows=basis.dim)
