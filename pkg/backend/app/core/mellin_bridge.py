"""
Log-polynomial sections near a cone point and their Mellin singular parts.

A section u = sum_k c_k x^{i sigma0} log^k x has Mellin transform with
singular part sum_k c_k (-1)^k k! i^{k+1} (sigma - sigma0)^{-(k+1)} at sigma0,
independent of the cutoff. Strip pairings of indicial data are assembled from
these singular parts by exact residues.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from app.core import linalg
from app.core.errors import InconsistencyError, NotClosedError, OutsideStripError
from app.core.germ_cohom import PrincipalPart, apply_family
from app.core.holo_complex import IndicialInput, adjoint_indicial_family, build_indicial, indicial_family
from app.core.linalg import Matrix
from app.core.matrix_series import MapFamily, adjoint_family, expand_family_at, map_mul
from app.core.residue_pairing import germ_pairing
from app.core.scalar_series import I_UNIT, ZERO, ExactScalar, as_scalar, expand_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LogSection:
    """sum_k coeffs[k] x^{i exponent} log^k x with vector coefficients."""

    exponent: ExactScalar
    dim: int
    coeffs: tuple

    @classmethod
    def from_lists(cls, exponent: Any, coeffs: Sequence[Sequence[Any]], dim: Optional[int] = None) -> "LogSection":
        vectors = tuple(linalg.to_vector(c) for c in coeffs)
        if dim is None:
            dim = vectors[0].shape[0] if vectors else 0
        return cls(as_scalar(exponent), dim, vectors)

    @property
    def log_degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if not linalg.is_zero(self.coeffs[k]):
                return k
        return -1

    @property
    def is_zero(self) -> bool:
        return self.log_degree < 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma0": str(self.exponent),
            "coeffs": [[str(x) for x in c[:, 0]] for c in self.coeffs[: self.log_degree + 1]],
        }


def mellin_factor(k: int) -> ExactScalar:
    """(-1)^k k! i^{k+1}."""
    return (I_UNIT ** (k + 1)) * ((-1) ** k * math.factorial(k))


def mellin_singular(u: LogSection) -> PrincipalPart:
    coeffs = tuple(linalg.scale(c, mellin_factor(k)) for k, c in enumerate(u.coeffs[: u.log_degree + 1]))
    return PrincipalPart(u.exponent, u.dim, coeffs)


def mellin_inverse(p: PrincipalPart) -> LogSection:
    coeffs = tuple(
        linalg.scale(c, mellin_factor(k).inverse()) for k, c in enumerate(p.coeffs[: p.pole_order])
    )
    return LogSection(p.center, p.dim, coeffs)


def theta_iso(u: LogSection, q: int, q_prime: int) -> PrincipalPart:
    """Mellin singular part of a section at sigma0 + i(q' - q), re-centered to sigma0."""
    p = mellin_singular(u)
    shift = I_UNIT * (q_prime - q)
    return PrincipalPart(p.center - shift, p.dim, p.coeffs)


def model_operator(bP: Matrix, Lam: Matrix, u: LogSection) -> LogSection:
    """
    x^-1 (bP + Lambda (-i x d/dx)) u, a section at exponent sigma0 + i.

    c'_k = bP c_k + Lambda (sigma0 c_k - i (k+1) c_{k+1}).
    """
    top = u.log_degree
    out = []
    for k in range(top + 1):
        inner = linalg.scale(u.coeffs[k], u.exponent)
        if k + 1 <= top:
            inner = linalg.sub(inner, linalg.scale(u.coeffs[k + 1], I_UNIT * (k + 1)))
        out.append(linalg.add(linalg.matmul(bP, u.coeffs[k]), linalg.matmul(Lam, inner)))
    return LogSection(u.exponent + I_UNIT, bP.shape[0], tuple(out))


def theta_diagram(inp: IndicialInput, degree: int, u: LogSection) -> bool:
    """
    Theta(model operator applied to u) = s(A_degree(sigma + i(degree - anchor)) Theta u).

    u is a section in F_degree at exponent sigma0 + i(degree - anchor).
    """
    q = inp.anchor
    lhs = theta_iso(model_operator(inp.bP[degree], inp.Lambda[degree], u), q, degree + 1)
    start = theta_iso(u, q, degree)
    b, lam = inp.bP[degree], inp.Lambda[degree]
    moved = start.center + I_UNIT * (degree - q)
    family = MapFamily.build([linalg.add(b, linalg.scale(lam, moved)), lam], 0, None, start.center, b.shape)
    rhs = apply_family(family, start)
    depth = max(lhs.depth, rhs.depth, 1)
    if not linalg.equal(lhs.to_vector(depth), rhs.to_vector(depth)):
        raise InconsistencyError(f"Theta does not intertwine the model operator in degree {degree}")
    return True


def sigma_star(sigma0: Any, gamma: Any) -> ExactScalar:
    """conj(sigma0 - i(2 gamma - 1)), the reflection across Im sigma = gamma - 1/2."""
    sigma0 = as_scalar(sigma0)
    return (sigma0 - I_UNIT * (2 * Fraction(gamma) - 1)).conjugate()


@dataclass
class StripConfig:
    gamma: Fraction
    points: List[ExactScalar] = field(default_factory=list)

    def contains(self, point: ExactScalar) -> bool:
        return self.gamma - 1 < point.im < self.gamma

    def validate(self):
        for p in self.points:
            if not self.contains(p):
                raise OutsideStripError(f"{p} is outside the strip {self.gamma - 1} < Im sigma < {self.gamma}")


@dataclass
class StripReport:
    total: ExactScalar
    matrix: Matrix
    u_points: List[ExactScalar]
    v_points: List[ExactScalar]
    matched: List[List[int]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": str(self.total),
            "u_points": [str(p) for p in self.u_points],
            "v_points": [str(p) for p in self.v_points],
            "contributions": linalg.to_lists(self.matrix),
            "matched": self.matched,
        }


def _expand(F: MapFamily, point: ExactScalar, order: int) -> MapFamily:
    if F.center == point:
        return F
    grid = [[expand_at(s, point, order) for s in row] for row in F.entries]
    return MapFamily.from_entries(grid, F.rows, F.cols)


def _residue(point: ExactScalar, row: MapFamily, P: MapFamily, col: MapFamily, order: int) -> ExactScalar:
    """i * coefficient of (sigma - point)^-1 in row(sigma) P(sigma) col(sigma)."""
    product = map_mul(map_mul(_expand(row, point, order), expand_family_at(P, point)), _expand(col, point, order))
    return I_UNIT * product.coeff(-1)[0, 0]


def strip_pairing(
    inp: IndicialInput,
    cfg: StripConfig,
    u_data: Sequence[LogSection],
    v_data: Sequence[LogSection],
) -> StripReport:
    """
    Pair sections of A_q at strip points against adjoint sections at reflected
    points.

    Matched pairs (v at sigma_star of u's point) contribute the residue pairing
    of their aligned Mellin singular parts. Every other pair must contribute
    zero: the residues of its integrand at both poles are computed and checked.
    """
    q = inp.anchor
    cfg.validate()
    delta = inp.gamma - Fraction(1, 2)
    shift = I_UNIT * delta
    grams = inp.grams or [None] * (len(inp.bP) + 1)
    gram = grams[q + 1]

    for u in u_data:
        if u.exponent not in cfg.points:
            raise OutsideStripError(f"u-data at {u.exponent} is not a configured strip point")
        closure = apply_family(indicial_family(inp, q, u.exponent), mellin_singular(u))
        if not closure.is_zero:
            raise NotClosedError(f"u-data at {u.exponent} is not closed for A_{q}")
    for v in v_data:
        if not cfg.contains(v.exponent):
            raise OutsideStripError(f"v-data at {v.exponent} is outside the strip")
        closure = apply_family(adjoint_indicial_family(inp, q, v.exponent), mellin_singular(v))
        if not closure.is_zero:
            raise NotClosedError(f"v-data at {v.exponent} is not closed for the adjoint of A_{q}")

    M = linalg.zeros(len(u_data), len(v_data))
    matched = []
    for i, u in enumerate(u_data):
        center = u.exponent - shift
        P = build_indicial(inp, center).maps[q]
        u_hat = mellin_singular(u)
        u_hat = PrincipalPart(center, u_hat.dim, u_hat.coeffs)
        for j, v in enumerate(v_data):
            v_hat = mellin_singular(v)
            v_hat = PrincipalPart(v.exponent - shift, v_hat.dim, v_hat.coeffs)
            if v.exponent == sigma_star(u.exponent, inp.gamma):
                M[i, j] = germ_pairing(P, u_hat, v_hat, gram)
                matched.append([i, j])
                continue
            row = adjoint_family(v_hat.as_family(), None, gram)
            col = u_hat.as_family()
            order = u_hat.depth + v_hat.depth + 1
            for pole in (center, row.center):
                value = _residue(pole, row, P, col, order)
                if value != ZERO:
                    raise InconsistencyError(
                        f"unmatched strip points {u.exponent} and {v.exponent} pair to {value}",
                        {"u": str(u.exponent), "v": str(v.exponent), "pole": str(pole)},
                    )
    total = ZERO
    for value in M.flat:
        total = total + value
    logger.debug(f"strip pairing over {len(u_data)} x {len(v_data)} sections: {total}")
    return StripReport(total, M, [u.exponent for u in u_data], [v.exponent for v in v_data], matched)
