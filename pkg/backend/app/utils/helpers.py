import hashlib
import json
import logging
from typing import Any, Dict

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    """
    Serialize a report deterministically

    Args:
        data: JSON-compatible data; exact scalars must already be strings

    Returns:
        JSON text with sorted keys and no insignificant whitespace
    """
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def provenance_hash(data: Any) -> str:
    """sha256 of the canonical JSON of ``data``."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def with_provenance(report: Dict[str, Any], *keys: str) -> Dict[str, Any]:
    """
    Attach sha256 hashes of selected report sections

    Args:
        report: report dictionary
        keys: sections to hash; missing sections are skipped

    Returns:
        The same report with a "provenance" mapping of section -> hash
    """
    hashes = {key: provenance_hash(report[key]) for key in keys if key in report}
    if hashes:
        report["provenance"] = hashes
    return report


def pretty_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)
