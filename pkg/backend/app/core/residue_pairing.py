"""
Residue pairing between singular parts of a complex and of its adjoint.

    <u, v> = i * Res_{sigma = c} < P_q(sigma) u(sigma), v(conj sigma) >

The contour integral is evaluated as an exact residue: only products of
(P u)_k with v_{-m} where k - m = -1 contribute.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from app.core import linalg
from app.core.errors import CenterMismatchError, DimensionMismatchError, InconsistencyError
from app.core.germ_cohom import CohomBasis, PrincipalPart, stabilized_cohomology
from app.core.holo_complex import ComplexFamily, adjoint_complex, adjoint_degree
from app.core.linalg import Matrix
from app.core.matrix_series import MapFamily
from app.core.scalar_series import I_UNIT, ONE, ZERO, ExactScalar

logger = logging.getLogger(__name__)


def germ_pairing(
    P: MapFamily, u: PrincipalPart, v: PrincipalPart, gram: Optional[Matrix] = None
) -> ExactScalar:
    """
    Args:
        P: P_q near the center c of u.
        u: singular part at c in F_q.
        v: singular part at conj(c) in F_{q+1}.
        gram: Gram matrix of F_{q+1}; the identity when omitted.

    Returns:
        i * sum_m v_{-m}^H G (P u)_{m-1}, with (P u)_k = sum_l P_{k+l} u_{-l}.
    """
    if u.center != P.center or v.center != P.center.conjugate():
        raise CenterMismatchError("pairing needs u at the center and v at its conjugate")
    if u.dim != P.cols or v.dim != P.rows:
        raise DimensionMismatchError(f"pairing of sizes {u.dim} and {v.dim} through a {P.shape} family")
    residue = ZERO
    for m in range(1, v.pole_order + 1):
        vm = v.coeffs[m - 1]
        if linalg.is_zero(vm):
            continue
        k = m - 1
        pu = linalg.zeros(P.rows, 1)
        for l in range(1, u.pole_order + 1):
            pu = linalg.add(pu, linalg.matmul(P.coeff(k + l), u.coeffs[l - 1]))
        residue = residue + linalg.inner(pu, vm, gram)
    return I_UNIT * residue


@dataclass
class PairingMatrix:
    degree: int
    matrix: Matrix
    row_basis: CohomBasis
    col_basis: CohomBasis

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def to_dict(self) -> Dict[str, Any]:
        return {"degree": self.degree, "rows": self.rows, "cols": self.cols, "entries": linalg.to_lists(self.matrix)}


def _pair_bases(P: MapFamily, us: List[PrincipalPart], vs: List[PrincipalPart], gram) -> Matrix:
    M = linalg.zeros(len(us), len(vs))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            M[i, j] = germ_pairing(P, u, v, gram)
    return M


def _perturb(basis: CohomBasis, rng: np.random.Generator) -> List[PrincipalPart]:
    """Each representative plus a random combination of boundaries."""
    out = []
    for u in basis.reps:
        vec = u.to_vector(basis.depth)
        for k in range(basis.boundaries.shape[1]):
            weight = int(rng.integers(-3, 4))
            if weight:
                vec = linalg.add(vec, linalg.scale(basis.boundaries[:, k : k + 1], weight))
        out.append(PrincipalPart.from_vector(vec, u.dim, u.center))
    return out


def cohomology_pairing_matrix(C: ComplexFamily, q: int, checked: bool = True, seed: int = 0) -> PairingMatrix:
    """
    Pairing of H^q(P) at c against H^{q+1}(P^star) at conj(c).

    In checked mode every representative is moved by a random boundary on both
    sides and the matrix is required to stay the same.
    """
    if not 0 <= q < C.length:
        raise DimensionMismatchError(f"no map P_{q} in a complex of length {C.length}")
    row_basis = stabilized_cohomology(C, q)
    col_basis = stabilized_cohomology(adjoint_complex(C), adjoint_degree(C, q))
    P, gram = C.maps[q], C.gram(q + 1)
    M = _pair_bases(P, row_basis.reps, col_basis.reps, gram)
    if checked and (row_basis.dim or col_basis.dim):
        rng = np.random.default_rng(seed)
        moved = _pair_bases(P, _perturb(row_basis, rng), _perturb(col_basis, rng), gram)
        if not linalg.equal(M, moved):
            raise InconsistencyError(
                f"degree {q} pairing depends on the representative",
                {"matrix": linalg.to_lists(M), "perturbed": linalg.to_lists(moved)},
            )
    logger.debug(f"degree {q} pairing matrix {M.shape}")
    return PairingMatrix(q, M, row_basis, col_basis)


@dataclass
class Verdict:
    passed: bool
    determinant: Optional[ExactScalar] = None
    null_vector: Optional[Matrix] = None
    side: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"verdict": "pass" if self.passed else "fail"}
        if self.determinant is not None:
            out["determinant"] = str(self.determinant)
        if self.null_vector is not None:
            out["null_vector"] = [str(x) for x in self.null_vector[:, 0]]
            out["null_side"] = self.side
        return out


def certify_nondegenerate(M: PairingMatrix) -> Verdict:
    """
    Pass iff the matrix is square with nonzero determinant; otherwise return
    coefficients of a class pairing to zero against everything.
    """
    A = M.matrix
    if M.rows == M.cols:
        d = linalg.det(A) if M.rows else ONE
        if d:
            return Verdict(True, d)
    left = linalg.nullspace(A.T)
    if left.shape[1]:
        return Verdict(False, None if M.rows != M.cols else ZERO, left[:, :1], "row")
    right = linalg.nullspace(A)
    return Verdict(False, None, linalg.conj_transpose(right[:, :1]).T, "column")


def pairing_partners(M: PairingMatrix) -> List[PrincipalPart]:
    """
    For each row class u_k, the adjoint class w_k with <u_i, w_k> = delta_ik.

    <u_i, sum_j b_j v_j> = sum_j conj(b_j) M_ij, so conj(b) is a column of M^-1.
    """
    inverse = linalg.inverse(M.matrix)
    basis = M.col_basis
    partners = []
    for k in range(M.rows):
        total = PrincipalPart.zero(basis.dim_space, basis.depth, basis.center)
        for j, v in enumerate(basis.reps):
            coeff = inverse[j, k].conjugate()
            if coeff:
                total = total + v.scale(coeff)
        partners.append(total)
    return partners
