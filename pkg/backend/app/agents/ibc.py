import logging
from typing import Any, Dict

from app.core.errors import GermCohomError
from app.core.ibc_variety import (
    ChartSystem,
    absolute_condition,
    chart_equations,
    check_ibc,
    compare_on_samples,
    export_system,
    fold_problem,
    invariant_chart_equations,
    quotient_cohomology,
    relative_condition,
    sample_chart_points,
)
from app.services.problem_io import ProblemFile, RunOptions, build_base, build_ibc

logger = logging.getLogger(__name__)


class IBCAgent:
    """Ideal boundary condition checks, quotient cohomology and chart systems."""

    def ibc(self, problem: ProblemFile, options: RunOptions) -> Dict[str, Any]:
        spec = problem.ibc
        try:
            p = build_ibc(spec)
            report: Dict[str, Any] = {
                "command": "ibc",
                "dims": p.dims,
                "absolute": quotient_cohomology(absolute_condition(p)),
                "relative": quotient_cohomology(relative_condition(p)),
            }
            status = "pass"
            if p.candidates is not None:
                verdict = check_ibc(p)
                report["check"] = verdict.to_dict()
                if verdict.passed:
                    report["quotient_cohomology"] = quotient_cohomology(p)
                else:
                    status = "fail"
            if spec.base is not None:
                base = build_base(spec, p)
                system = chart_equations(p, base)
                report["chart"] = self._chart_report(system, spec.samples, options.seed)
                if spec.fold:
                    folded = fold_problem(p)
                    bases = [chart.basis[:, : chart.base_dim] for chart in system.charts]
                    invariant = invariant_chart_equations(folded.matrix, folded.fold_subspaces(bases))
                    report["folded_chart"] = self._chart_report(invariant, spec.samples, options.seed)
        except GermCohomError as e:
            logger.error(f"Error in ibc: {e}")
            return {"command": "ibc", "status": e.status, **e.to_dict()}
        report["status"] = status
        logger.info(f"ibc: {status}")
        return report

    def _chart_report(self, system: ChartSystem, samples: int, seed: int) -> Dict[str, Any]:
        random_points = sample_chart_points(system, samples, seed)
        passing_points = sample_chart_points(system, samples, seed + 1, passing=True)
        return {
            **system.to_dict(),
            "random": compare_on_samples(system, random_points),
            "passing": compare_on_samples(system, passing_points),
            "export": export_system(system),
        }
