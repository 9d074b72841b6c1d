import logging
from typing import Any, Dict

from app.core.errors import GermCohomError
from app.core.holo_complex import expand_complex_at
from app.core.reduction import recursive_certify, schur_reduce
from app.core.scalar_series import as_scalar
from app.services.problem_io import ProblemFile, RunOptions, complex_from_problem
from app.utils.helpers import with_provenance

logger = logging.getLogger(__name__)


class ReduceAgent:
    """Recursive nondegeneracy certificates through Schur reduction and sigma-division."""

    def reduce(self, problem: ProblemFile, options: RunOptions) -> Dict[str, Any]:
        try:
            C, _ = complex_from_problem(problem)
            points = [as_scalar(c) for c in options.candidates] if options.candidates else [C.center]
            degrees = [options.degree] if options.degree is not None else list(range(C.length))
            results = []
            for point in points:
                local = C if point == C.center else expand_complex_at(C, point)
                red = schur_reduce(local, options.order, checked=options.checked)
                entry: Dict[str, Any] = {
                    "point": str(point),
                    "harmonic_dims": list(red.ptilde.dims),
                    "hodge": red.hodge.to_dict(),
                    "certificates": [],
                }
                for q in degrees:
                    logger.info(f"reduce: certifying degree {q} at {point}")
                    entry["certificates"].append(recursive_certify(local, q, options.order).to_dict())
                results.append(entry)
        except GermCohomError as e:
            logger.error(f"Error in reduce: {e}")
            return {"command": "reduce", "status": e.status, **e.to_dict()}
        passed = all(c["cross_check"] and c["dim"] == c["adjoint_dim"] for r in results for c in r["certificates"])
        report = {"command": "reduce", "status": "pass" if passed else "fail", "points": results}
        logger.info(f"reduce: {report['status']}")
        return with_provenance(report, "points")
