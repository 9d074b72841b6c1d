import logging
from typing import Any, Dict

from app.core.errors import GermCohomError, IdentityViolationError
from app.core.holo_complex import check_indicial_input, generate_gauge_complex, validate_complex
from app.core.ibc_variety import check_ibc
from app.services.problem_io import (
    ProblemFile,
    RunOptions,
    build_complex,
    build_ibc,
    build_indicial_input,
    build_profile,
    build_strip,
)

logger = logging.getLogger(__name__)


class ValidateAgent:
    """Structural checks of a problem file without any cohomology computation."""

    def validate(self, problem: ProblemFile, options: RunOptions) -> Dict[str, Any]:
        kind = problem.kind
        logger.info(f"validate: {kind} payload")
        try:
            report = getattr(self, f"_validate_{kind}")(problem)
        except IdentityViolationError as e:
            report = {"status": "fail", "failures": [e.details or {"message": e.message}]}
        except GermCohomError as e:
            logger.error(f"Error validating {kind} payload: {e}")
            return {"command": "validate", "kind": kind, "status": "error", **e.to_dict()}
        logger.info(f"validate: {report['status']}")
        return {"command": "validate", "kind": kind, **report}

    def _validate_complex(self, problem: ProblemFile) -> Dict[str, Any]:
        result = validate_complex(build_complex(problem.complex))
        return {"status": "pass" if result["valid"] else "fail", "failures": result["failures"]}

    def _validate_indicial(self, problem: ProblemFile) -> Dict[str, Any]:
        failures = check_indicial_input(build_indicial_input(problem.indicial))
        return {"status": "fail" if failures else "pass", "failures": failures}

    def _validate_strip(self, problem: ProblemFile) -> Dict[str, Any]:
        inp, cfg, _, _ = build_strip(problem.strip)
        failures = check_indicial_input(inp)
        cfg.validate()
        return {"status": "fail" if failures else "pass", "failures": failures}

    def _validate_ibc(self, problem: ProblemFile) -> Dict[str, Any]:
        p = build_ibc(problem.ibc)
        if p.candidates is None:
            return {"status": "pass", "failures": []}
        verdict = check_ibc(p)
        return {"status": "pass" if verdict.passed else "fail", "failures": verdict.failures}

    def _validate_generator(self, problem: ProblemFile) -> Dict[str, Any]:
        spec = problem.generator
        if spec.profile is None:
            return {"status": "pass", "failures": [], "note": "corpus generator; run the corpus command"}
        C, truth = generate_gauge_complex(spec.seed, build_profile(spec.profile))
        result = validate_complex(C)
        return {"status": "pass" if result["valid"] else "fail", "failures": result["failures"], "ground_truth": truth}
