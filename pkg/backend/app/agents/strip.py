import logging
from typing import Any, Dict

from app.core.errors import GermCohomError
from app.core.mellin_bridge import sigma_star, strip_pairing, theta_diagram
from app.services.problem_io import ProblemFile, RunOptions, build_strip
from app.utils.helpers import with_provenance

logger = logging.getLogger(__name__)


class StripAgent:
    def strip(self, problem: ProblemFile, options: RunOptions) -> Dict[str, Any]:
        try:
            inp, cfg, u_data, v_data = build_strip(problem.strip)
            report = strip_pairing(inp, cfg, u_data, v_data)
            diagrams = 0
            if options.checked:
                for u in u_data:
                    theta_diagram(inp, inp.anchor, u)
                    diagrams += 1
        except GermCohomError as e:
            logger.error(f"Error in strip pairing: {e}")
            return {"command": "strip", "status": e.status, **e.to_dict()}
        result = {
            "command": "strip",
            "status": "pass",
            "gamma": str(cfg.gamma),
            "reflections": {str(p): str(sigma_star(p, cfg.gamma)) for p in cfg.points},
            "pairing": report.to_dict(),
            "theta_diagrams": diagrams,
        }
        logger.info(f"strip: total {report.total} over {len(cfg.points)} point(s)")
        return with_provenance(result, "pairing")
