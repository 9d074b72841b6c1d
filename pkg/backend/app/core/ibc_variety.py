"""
Ideal boundary conditions for a finite complex of constant maps a_q: E^q -> E^{q+1}.

A tuple of subspaces D^q (D^m the whole top space) is an ideal boundary
condition iff a_q D^q is contained in D^{q+1} for every q. Near a base tuple
the set of such tuples is cut out, in Grassmannian chart coordinates, by
polynomial equations of degree at most two; this module emits those systems
and cross-checks them against the direct rank test by sampling.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import sympy

from app.core import linalg
from app.core.errors import DimensionMismatchError, IdentityViolationError, InconsistencyError
from app.core.linalg import Matrix
from app.core.polynomials import matrix_to_sympy, scalar_to_sympy
from app.core.scalar_series import ONE, ExactScalar, as_scalar

logger = logging.getLogger(__name__)


@dataclass
class IBCProblem:
    dims: List[int]
    maps: List[Matrix]
    candidates: Optional[List[Matrix]] = None

    @classmethod
    def create(
        cls,
        maps: Sequence[Any],
        candidates: Optional[Sequence[Any]] = None,
        dims: Optional[Sequence[int]] = None,
    ) -> "IBCProblem":
        maps = [m if isinstance(m, np.ndarray) else linalg.to_matrix(m) for m in maps]
        if dims is None:
            if not maps:
                raise DimensionMismatchError("a problem without maps needs explicit dims")
            dims = [maps[0].shape[1]] + [m.shape[0] for m in maps]
        dims = list(dims)
        if len(dims) != len(maps) + 1:
            raise DimensionMismatchError(f"{len(maps)} maps need {len(maps) + 1} dims, got {len(dims)}")
        for q, a in enumerate(maps):
            if a.shape != (dims[q + 1], dims[q]):
                raise DimensionMismatchError(f"a_{q} is {a.shape}, expected {(dims[q + 1], dims[q])}")
        for q in range(len(maps) - 1):
            if not linalg.is_zero(linalg.matmul(maps[q + 1], maps[q])):
                raise IdentityViolationError(f"a_{q + 1} a_{q} is not zero", {"q": q})
        problem = cls(dims, maps)
        if candidates is not None:
            problem = problem.with_candidates(candidates)
        return problem

    @property
    def length(self) -> int:
        return len(self.maps)

    def with_candidates(self, candidates: Sequence[Any]) -> "IBCProblem":
        """Attach D^0..D^m; D^m may be omitted and is then the whole space."""
        mats = [c if isinstance(c, np.ndarray) else linalg.to_matrix(c, self.dims[q]) for q, c in enumerate(candidates)]
        if len(mats) == self.length:
            mats.append(linalg.identity(self.dims[-1]))
        if len(mats) != self.length + 1:
            raise DimensionMismatchError(f"expected {self.length + 1} candidate subspaces, got {len(mats)}")
        for q, D in enumerate(mats):
            if D.shape[0] != self.dims[q]:
                raise DimensionMismatchError(f"D^{q} lives in a space of dim {D.shape[0]}, expected {self.dims[q]}")
            if linalg.rank(D) != D.shape[1]:
                raise DimensionMismatchError(f"basis of D^{q} does not have full column rank")
        return IBCProblem(self.dims, self.maps, mats)

    def candidate(self, q: int) -> Matrix:
        if self.candidates is None:
            raise DimensionMismatchError("problem has no candidate subspaces")
        return self.candidates[q]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"dims": self.dims, "maps": [linalg.to_lists(a) for a in self.maps]}
        if self.candidates is not None:
            out["candidates"] = [linalg.to_lists(D) for D in self.candidates]
        return out


@dataclass
class IBCVerdict:
    passed: bool
    failures: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": "pass" if self.passed else "fail", "failures": self.failures}


def check_ibc(p: IBCProblem) -> IBCVerdict:
    """a_q D^q in span D^{q+1} for every q, with the first escaping image vector as witness."""
    failures = []
    for q, a in enumerate(p.maps):
        image = linalg.matmul(a, p.candidate(q))
        target = p.candidate(q + 1)
        for j in range(image.shape[1]):
            column = image[:, j : j + 1]
            if not linalg.in_span(target, column):
                failures.append({"q": q, "column": j, "witness": [str(x) for x in column[:, 0]]})
                break
    logger.debug(f"ideal boundary check: {len(failures)} failing degree(s)")
    return IBCVerdict(not failures, failures)


def absolute_condition(p: IBCProblem) -> IBCProblem:
    return p.with_candidates([linalg.identity(n) for n in p.dims])


def relative_condition(p: IBCProblem) -> IBCProblem:
    return p.with_candidates([linalg.zeros(n, 0) for n in p.dims[:-1]])


def quotient_cohomology(p: IBCProblem) -> List[int]:
    """Cohomology dims of (D^q, a_q restricted to D^q)."""
    verdict = check_ibc(p)
    if not verdict.passed:
        raise IdentityViolationError("candidate subspaces are not an ideal boundary condition", verdict.to_dict())
    ranks = [linalg.rank(linalg.matmul(a, p.candidate(q))) for q, a in enumerate(p.maps)]
    dims = []
    for q in range(p.length + 1):
        out_rank = ranks[q] if q < p.length else 0
        in_rank = ranks[q - 1] if q > 0 else 0
        dims.append(p.candidate(q).shape[1] - out_rank - in_rank)
    return dims


@dataclass
class FoldedProblem:
    """V = E^0 + ... + E^m with the nilpotent block map a."""

    matrix: Matrix
    offsets: List[int]

    def fold_subspaces(self, candidates: Sequence[Matrix]) -> Matrix:
        n = self.matrix.shape[0]
        blocks = []
        for q, D in enumerate(candidates):
            block = linalg.zeros(n, D.shape[1])
            block[self.offsets[q] : self.offsets[q] + D.shape[0], :] = D
            blocks.append(block)
        return linalg.hstack(blocks, n)


def fold_problem(p: IBCProblem) -> FoldedProblem:
    offsets = [0]
    for n in p.dims:
        offsets.append(offsets[-1] + n)
    A = linalg.zeros(offsets[-1], offsets[-1])
    for q, a in enumerate(p.maps):
        A[offsets[q + 1] : offsets[q + 2], offsets[q] : offsets[q + 1]] = a
    return FoldedProblem(A, offsets)


def is_invariant(A: Matrix, X: Matrix) -> bool:
    image = linalg.matmul(A, X)
    return all(linalg.in_span(X, image[:, j : j + 1]) for j in range(image.shape[1]))


@dataclass
class Chart:
    """
    Subspaces spanned by e_j + sum_k x^k_j e_k (j < base_dim <= k) in an
    adapted basis e whose first base_dim vectors span the base subspace.
    """

    degree: int
    basis: Matrix
    base_dim: int
    symbols: sympy.Matrix

    @property
    def variables(self) -> List[sympy.Symbol]:
        return list(self.symbols)

    def spanning(self) -> sympy.Matrix:
        """Chart vectors in adapted coordinates, one per column."""
        return sympy.eye(self.base_dim).col_join(self.symbols)

    def subspace(self, point: Dict[sympy.Symbol, ExactScalar]) -> Matrix:
        n = self.basis.shape[0]
        coords = linalg.zeros(n, self.base_dim)
        for j in range(self.base_dim):
            coords[j, j] = ONE
        for k in range(n - self.base_dim):
            for j in range(self.base_dim):
                coords[self.base_dim + k, j] = point[self.symbols[k, j]]
        return linalg.matmul(self.basis, coords)

    def coordinates(self, X: Matrix) -> Optional[Dict[sympy.Symbol, ExactScalar]]:
        """Chart coordinates of span X, or None when it lies outside the chart."""
        if X.shape[1] != self.base_dim or linalg.rank(X) != self.base_dim:
            return None
        W = linalg.matmul(linalg.inverse(self.basis), X)
        top = W[: self.base_dim, :]
        if linalg.rank(top) != self.base_dim:
            return None
        C = linalg.matmul(W[self.base_dim :, :], linalg.inverse(top))
        return {self.symbols[k, j]: C[k, j] for k in range(C.shape[0]) for j in range(C.shape[1])}


def _chart(degree: int, base: Matrix, prefix: str = "x") -> Chart:
    n, d = base.shape
    if linalg.rank(base) != d:
        raise DimensionMismatchError(f"base subspace of degree {degree} has dependent columns; no adapted basis")
    E = linalg.extend_to_basis(base)
    symbols = sympy.Matrix(n - d, d, lambda k, j: sympy.Symbol(f"{prefix}{degree}_{d + k}_{j}"))
    return Chart(degree, E, d, symbols)


def _inclusion_equations(a: Matrix, src: Chart, tgt: Chart) -> List[sympy.Expr]:
    """
    <f^mu - sum_nu y^mu_nu f^nu, a(e_j + sum_k x^k_j e_k)> = 0 for mu beyond the
    target base and j inside the source base.
    """
    adapted = linalg.matmul(linalg.matmul(linalg.inverse(tgt.basis), a), src.basis)
    image = matrix_to_sympy(adapted) * src.spanning()
    d = tgt.base_dim
    equations = []
    for mu in range(d, image.shape[0]):
        for j in range(image.shape[1]):
            expr = image[mu, j] - sum((tgt.symbols[mu - d, nu] * image[nu, j] for nu in range(d)), sympy.Integer(0))
            expr = sympy.expand(expr)
            if expr != 0:
                equations.append(expr)
    return equations


@dataclass
class ChartSystem:
    charts: List[Chart]
    maps: List[Matrix]
    equations: List[sympy.Expr]
    invariant: bool = False

    @property
    def variables(self) -> List[sympy.Symbol]:
        return [s for chart in self.charts for s in chart.variables]

    @property
    def degree(self) -> int:
        if not self.equations or not self.variables:
            return 0
        return max(sympy.Poly(e, *self.variables).total_degree() for e in self.equations)

    def subspaces(self, point: Dict[sympy.Symbol, ExactScalar]) -> List[Matrix]:
        return [chart.subspace(point) for chart in self.charts]

    def evaluate(self, point: Dict[sympy.Symbol, ExactScalar]) -> List[ExactScalar]:
        values = {s: scalar_to_sympy(v) for s, v in point.items()}
        return [as_scalar(sympy.expand(e.subs(values))) for e in self.equations]

    def vanishes(self, point: Dict[sympy.Symbol, ExactScalar]) -> bool:
        return not any(self.evaluate(point))

    def membership(self, point: Dict[sympy.Symbol, ExactScalar]) -> bool:
        """The direct rank test on the subspaces named by ``point``."""
        spaces = self.subspaces(point)
        if self.invariant:
            return is_invariant(self.maps[0], spaces[0])
        return check_ibc(IBCProblem.create(self.maps, spaces)).passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variables": [str(s) for s in self.variables],
            "equations": [str(e) for e in self.equations],
            "degree": self.degree,
            "invariant": self.invariant,
        }


def chart_equations(p: IBCProblem, base: Sequence[Any]) -> ChartSystem:
    """
    Polynomial system in chart coordinates around the base tuple, whose zero set
    is the set of tuples with a_q X_q inside X_{q+1}. The top base may be omitted
    and is then the whole space (no coordinates).
    """
    bases = [b if isinstance(b, np.ndarray) else linalg.to_matrix(b, p.dims[q]) for q, b in enumerate(base)]
    if len(bases) == p.length:
        bases.append(linalg.identity(p.dims[-1]))
    if len(bases) != p.length + 1:
        raise DimensionMismatchError(f"expected {p.length + 1} base subspaces, got {len(bases)}")
    for q, b in enumerate(bases):
        if b.shape[0] != p.dims[q]:
            raise DimensionMismatchError(f"base subspace of degree {q} lives in dim {b.shape[0]}, expected {p.dims[q]}")
    charts = [_chart(q, b) for q, b in enumerate(bases)]
    equations = []
    for q, a in enumerate(p.maps):
        equations.extend(_inclusion_equations(a, charts[q], charts[q + 1]))
    logger.debug(f"chart system: {sum(len(c.variables) for c in charts)} variables, {len(equations)} equations")
    return ChartSystem(charts, list(p.maps), equations)


def invariant_chart_equations(A: Any, base: Any) -> ChartSystem:
    """Chart system for A X inside X around a base subspace of a single space."""
    A = A if isinstance(A, np.ndarray) else linalg.to_matrix(A)
    base = base if isinstance(base, np.ndarray) else linalg.to_matrix(base, A.shape[0])
    chart = _chart(0, base)
    return ChartSystem([chart], [A], _inclusion_equations(A, chart, chart), invariant=True)


def _random_value(rng: np.random.Generator) -> ExactScalar:
    return ExactScalar(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))), Fraction(int(rng.integers(-1, 2))))


def _random_vectors(n: int, count: int, rng: np.random.Generator) -> Matrix:
    out = linalg.zeros(n, count)
    for (i, j), _ in np.ndenumerate(out):
        out[i, j] = _random_value(rng)
    return out


def _fill(span: Matrix, target_dim: int, rng: np.random.Generator) -> Optional[Matrix]:
    """A target_dim-dimensional subspace containing span(span), or None."""
    basis = linalg.column_space(span)
    if basis.shape[1] > target_dim:
        return None
    n = span.shape[0]
    while basis.shape[1] < target_dim:
        basis = linalg.column_space(linalg.hstack([basis, _random_vectors(n, 1, rng)], n))
    return basis


def _closure(A: Matrix, X: Matrix) -> Matrix:
    basis = linalg.column_space(X)
    while True:
        grown = linalg.column_space(linalg.hstack([basis, linalg.matmul(A, basis)], A.shape[0]))
        if grown.shape[1] == basis.shape[1]:
            return basis
        basis = grown


def _passing_subspaces(system: ChartSystem, rng: np.random.Generator) -> Optional[List[Matrix]]:
    if system.invariant:
        chart = system.charts[0]
        n = chart.basis.shape[0]
        X = linalg.zeros(n, 0)
        while X.shape[1] < chart.base_dim:
            X = _closure(system.maps[0], linalg.hstack([X, _random_vectors(n, 1, rng)], n))
        return [X] if X.shape[1] == chart.base_dim else None
    first = system.charts[0]
    spaces = [first.subspace({s: _random_value(rng) for s in first.variables})]
    for q, a in enumerate(system.maps):
        nxt = _fill(linalg.matmul(a, spaces[-1]), system.charts[q + 1].base_dim, rng)
        if nxt is None:
            return None
        spaces.append(nxt)
    return spaces


def sample_chart_points(
    system: ChartSystem, count: int, seed: int = 0, passing: bool = False, attempts: int = 20
) -> List[Dict[sympy.Symbol, ExactScalar]]:
    """
    Random chart points; with ``passing`` only points whose subspaces satisfy
    the inclusions, built from random subspaces that do and read back in chart
    coordinates. Passing draws that leave the chart are retried up to
    ``attempts`` times per point.
    """
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        if not passing:
            points.append({s: _random_value(rng) for s in system.variables})
            continue
        for _attempt in range(attempts):
            spaces = _passing_subspaces(system, rng)
            if spaces is None:
                continue
            coords = [chart.coordinates(X) for chart, X in zip(system.charts, spaces)]
            if all(c is not None for c in coords):
                point: Dict[sympy.Symbol, ExactScalar] = {}
                for c in coords:
                    point.update(c)
                points.append(point)
                break
    return points


def compare_on_samples(system: ChartSystem, points: Sequence[Dict[sympy.Symbol, ExactScalar]]) -> Dict[str, int]:
    """Zero set of the system against the rank test; any disagreement is an inconsistency."""
    passed = 0
    for point in points:
        vanishes = system.vanishes(point)
        member = system.membership(point)
        if vanishes != member:
            raise InconsistencyError(
                "chart equations and the rank test disagree",
                {"point": {str(s): str(v) for s, v in point.items()}, "vanishes": vanishes, "member": member},
            )
        passed += member
    return {"points": len(points), "members": passed}


def export_system(system: ChartSystem) -> str:
    """Plain-text monomial-coefficient listing of the system."""
    variables = system.variables
    lines = ["germcoh-polynomial-system 1", "variables " + " ".join(str(v) for v in variables)]
    lines.append(f"equations {len(system.equations)}")
    for k, expr in enumerate(system.equations):
        poly = sympy.Poly(expr, *variables, domain="QQ_I") if variables else None
        terms = poly.terms() if poly is not None else [((), expr)]
        lines.append(f"equation {k} terms {len(terms)}")
        for monom, coeff in terms:
            lines.append(" ".join([str(as_scalar(coeff))] + [str(e) for e in monom]))
    lines.append("end")
    return "\n".join(lines) + "\n"
