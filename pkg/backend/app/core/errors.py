"""Exception hierarchy shared by the core modules, agents and HTTP layer."""

from typing import Any, Dict, Optional


class GermCohomError(Exception):
    """Base class for every error raised by the engine."""

    status = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = {"error": type(self).__name__, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


class CenterMismatchError(GermCohomError):
    pass


class DimensionMismatchError(GermCohomError):
    pass


class InsufficientTruncationError(GermCohomError):
    """A coefficient beyond the known truncation order was needed."""


class NotLocallyInvertibleError(GermCohomError):
    pass


class SingularFamilyError(GermCohomError):
    """The determinant vanishes to every available order."""


class NotClosedError(GermCohomError):
    pass


class IdentityViolationError(GermCohomError):
    """Input data violates an algebraic identity it is required to satisfy."""


class ProblemFileError(GermCohomError):
    pass


class InconsistencyError(GermCohomError):
    """An identity that holds by theory failed on computed data."""

    status = "fail"


class OutsideStripError(GermCohomError):
    """A point does not lie in the open strip gamma - 1 < Im sigma < gamma."""
