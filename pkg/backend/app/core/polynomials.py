"""
Bridge between exact families and sympy polynomials in sigma.

Used for determinants, degeneracy loci and Gaussian-rational root extraction.
"""

import itertools
import logging
from typing import List, Tuple

import sympy

from app.core.errors import InsufficientTruncationError
from app.core.linalg import Matrix
from app.core.matrix_series import MapFamily
from app.core.scalar_series import ExactScalar, as_scalar

logger = logging.getLogger(__name__)

SIGMA = sympy.Symbol("sigma")


def scalar_to_sympy(value: ExactScalar) -> sympy.Expr:
    return sympy.Rational(value.re.numerator, value.re.denominator) + sympy.I * sympy.Rational(
        value.im.numerator, value.im.denominator
    )


def matrix_to_sympy(M: Matrix) -> sympy.Matrix:
    return sympy.Matrix(M.shape[0], M.shape[1], lambda i, j: scalar_to_sympy(M[i, j]))


def family_to_sympy(A: MapFamily) -> sympy.Matrix:
    """Entries of an exact polynomial family as polynomials in sigma."""
    if not A.exact or not A.holomorphic_flag:
        raise InsufficientTruncationError("only exact polynomial families have a polynomial form")
    local = SIGMA - scalar_to_sympy(A.center)
    out = sympy.zeros(A.rows, A.cols)
    for k in range(A.valuation, A.degree + 1):
        out += matrix_to_sympy(A.coeff(k)) * local**k
    return out.applyfunc(sympy.expand)


def determinant(A: MapFamily) -> sympy.Poly:
    M = family_to_sympy(A)
    if M.shape[0] == 0:
        return sympy.Poly(1, SIGMA, domain="QQ_I")
    return sympy.Poly(sympy.expand(M.det(method="berkowitz")), SIGMA, domain="QQ_I")


def degeneracy_polynomial(A: MapFamily, generic: int) -> sympy.Poly:
    """gcd of the generic-rank minors; its roots are where the rank of A drops."""
    if generic == 0:
        return sympy.Poly(1, SIGMA, domain="QQ_I")
    M = family_to_sympy(A)
    g = sympy.Poly(0, SIGMA, domain="QQ_I")
    for rows in itertools.combinations(range(A.rows), generic):
        for cols in itertools.combinations(range(A.cols), generic):
            minor = sympy.Poly(sympy.expand(M.extract(list(rows), list(cols)).det(method="berkowitz")), SIGMA, domain="QQ_I")
            if minor.is_zero:
                continue
            g = minor if g.is_zero else sympy.gcd(g, minor)
            if g.degree() == 0:
                return g
    return g


def split_roots(poly: sympy.Poly) -> Tuple[List[ExactScalar], List[str]]:
    """
    Gaussian-rational roots from the linear factors of poly, plus the
    irreducible nonlinear factors left unresolved.
    """
    if poly.is_zero:
        raise ValueError("the zero polynomial has no isolated roots")
    roots: List[ExactScalar] = []
    unresolved: List[str] = []
    _, factors = sympy.factor_list(poly.as_expr(), SIGMA, gaussian=True)
    for factor, _multiplicity in factors:
        f = sympy.Poly(factor, SIGMA)
        if f.degree() == 1:
            a, b = f.all_coeffs()
            roots.append(as_scalar(sympy.expand(-b / a)))
        elif f.degree() > 1:
            unresolved.append(str(f.as_expr()))
    logger.debug(f"{len(roots)} linear factor(s), {len(unresolved)} unresolved")
    return roots, unresolved


def poly_to_str(poly: sympy.Poly) -> str:
    return str(poly.as_expr())
