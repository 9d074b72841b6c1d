import logging
from typing import Any, Dict

from app.core.errors import GermCohomError
from app.core.germ_cohom import cohomology_at, spectrum_scan
from app.core.holo_complex import ComplexFamily, expand_complex_at
from app.core.residue_pairing import certify_nondegenerate, cohomology_pairing_matrix
from app.services.problem_io import ProblemFile, RunOptions, complex_from_problem
from app.utils.helpers import with_provenance

logger = logging.getLogger(__name__)


class AnalyzeAgent:
    """Spectrum scan, germ cohomology and pairing certification per degree."""

    def analyze(self, problem: ProblemFile, options: RunOptions) -> Dict[str, Any]:
        try:
            C, truth = complex_from_problem(problem)
            logger.info(f"analyze: complex of dims {list(C.dims)} at {C.center}")
            degrees = [options.degree] if options.degree is not None else list(range(C.length + 1))
            results = [self._degree(C, q, options) for q in degrees]
        except GermCohomError as e:
            logger.error(f"Error in analyze: {e}")
            return {"command": "analyze", "status": e.status, **e.to_dict()}

        points = [p for r in results for p in r["points"]]
        if any(p.get("verdict") == "fail" for p in points):
            status = "fail"
        elif any("error" in p for p in points):
            status = "error"
        else:
            status = "pass"
        report: Dict[str, Any] = {"command": "analyze", "status": status, "dims": list(C.dims), "degrees": results}
        if truth is not None:
            report["ground_truth"] = truth
        logger.info(f"analyze: {status}")
        return with_provenance(report, "degrees")

    def _degree(self, C: ComplexFamily, q: int, options: RunOptions) -> Dict[str, Any]:
        candidates = options.candidates
        if candidates is None and not C.is_polynomial:
            candidates = [str(C.center)]
        scan = spectrum_scan(C, q, candidates, options.workers)
        out = scan.to_dict()
        out["points"] = [self._point(C, q, entry, options) for entry in scan.candidates]
        del out["candidates"]
        return out

    def _point(self, C: ComplexFamily, q: int, entry: Dict[str, Any], options: RunOptions) -> Dict[str, Any]:
        point = entry["point"]
        out: Dict[str, Any] = {
            "point": str(point),
            "dim": entry["dim"],
            "depth": entry["depth"],
            "sources": entry.get("sources", []),
        }
        if entry["dim"] is None:
            out["error"] = entry.get("error")
            return out
        local = C if point == C.center else expand_complex_at(C, point)
        if options.depth is not None:
            basis = cohomology_at(local, q, options.depth)
            out["depth_override"] = {"depth": options.depth, "dim": basis.dim}
        if q < C.length:
            M = cohomology_pairing_matrix(local, q, checked=options.checked, seed=options.seed)
            out["basis"] = M.row_basis.to_dict()
            out["adjoint_basis"] = M.col_basis.to_dict()
            out["pairing"] = M.to_dict()
            out.update(certify_nondegenerate(M).to_dict())
        return out
