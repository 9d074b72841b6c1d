import logging
from typing import Any, Dict

from app.core.corpus import generate_corpus, run_corpus
from app.core.errors import GermCohomError
from app.utils.helpers import provenance_hash

logger = logging.getLogger(__name__)


class CorpusAgent:
    def run(self, seed: int, count: int, checked: bool = True, workers: int = 1) -> Dict[str, Any]:
        logger.info(f"corpus: {count} complexes from seed {seed}")
        try:
            result = run_corpus(generate_corpus(seed, count), checked=checked, workers=workers)
        except GermCohomError as e:
            logger.error(f"Error in corpus run: {e}")
            return {"command": "corpus", "status": e.status, **e.to_dict()}
        summary = result["summary"]
        if summary["fail"]:
            status = "fail"
        elif summary["error"]:
            status = "error"
        else:
            status = "pass"
        return {
            "command": "corpus",
            "status": status,
            "seed": seed,
            **result,
            "provenance": {"entries": provenance_hash(result["entries"])},
        }
