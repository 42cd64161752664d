"""Exception hierarchy shared by the library and the command line.

Two families matter to callers: `DomainError` for inputs that violate an
operation's preconditions and `NumericalFailure` for computations that ran
but could not meet their tolerance or budget. The CLI maps them to exit
codes 1 and 2; `ArtifactIOError` maps to 3.
"""
from typing import Any, Dict, Optional


class KHessianError(Exception):
    """Base class for every error raised by the `core` package."""

    kind = "error"

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"error": self.kind, "type": type(self).__name__, "message": self.message}
        if self.diagnostics:
            payload["diagnostics"] = self.diagnostics
        return payload


class DomainError(KHessianError, ValueError):
    """An argument lies outside the domain of the requested operation."""

    kind = "domain"


class AdmissibilityError(DomainError):
    """Eigenvalues are outside the admissible cone; `order` is the first j with sigma_j <= 0."""

    def __init__(self, message: str, order: int, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)
        self.order = order
        self.diagnostics.setdefault("first_failing_order", order)


class InconsistentProfileError(DomainError):
    pass


class InsufficientDataError(DomainError):
    pass


class GridMismatchError(DomainError):
    pass


class NoExplosiveSupersolutionError(DomainError):
    pass


class ConfigError(DomainError):
    """A run configuration failed validation; `field` names the offending entry."""

    def __init__(self, message: str, field: str = "", diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)
        self.field = field
        if field:
            self.diagnostics.setdefault("field", field)


class NumericalFailure(KHessianError, RuntimeError):
    """A computation could not complete within tolerance; `partial` holds the best result."""

    kind = "numerical"

    def __init__(self, message: str, partial: Any = None, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)
        self.partial = partial

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        partial = self.partial
        if hasattr(partial, "to_dict"):
            partial = partial.to_dict()
        if isinstance(partial, (int, float, str, dict, list)):
            payload["partial"] = partial
        return payload


class BudgetExceededError(NumericalFailure):
    pass


class DegenerateSlopeError(NumericalFailure):
    pass


class BracketingFailure(NumericalFailure):
    pass


class NonMonotoneError(NumericalFailure):
    pass


class UnreachableBoundaryError(NumericalFailure):
    pass


class MonotonicityViolation(NumericalFailure):
    pass


class NonConvergenceError(NumericalFailure):
    pass


class ArtifactIOError(KHessianError, OSError):
    """Reading or writing a result file failed."""

    kind = "io"
