"""
Exception hierarchy for the Veronese limit-set library.

Every error raised on purpose by the library derives from VeroneseError so the
command line can turn it into a structured error record.
"""

from typing import Any, Dict, Optional


class VeroneseError(Exception):
    """
    Base class for all domain errors.
    Args:
        message (str): Human readable description.
        details (dict, optional): Machine readable context (sizes, tolerances, labels).
    """
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def jsonify(self) -> dict:
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


class GeometryError(VeroneseError):
    """Numerical data that does not describe the requested geometric object."""


class ZeroVector(VeroneseError):
    pass


class DimensionMismatch(VeroneseError):
    pass


class NumericalFailure(VeroneseError):
    pass


class SingularInput(VeroneseError):
    pass


class NoGap(VeroneseError):
    pass


class IdentityElement(VeroneseError):
    pass


class BudgetExceeded(VeroneseError):
    pass


class NoLoxodromicFound(VeroneseError):
    pass


class NonRationalInput(VeroneseError):
    pass


class DuplicatePoints(VeroneseError):
    pass


class EmptySequence(VeroneseError):
    pass


class NotConverged(VeroneseError):
    """Raised in strict mode; `estimate` holds the best available limit."""
    def __init__(self, message: str, estimate: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.estimate = estimate


class Inconclusive(VeroneseError):
    pass


class NotDivergent(VeroneseError):
    pass


class PreconditionViolated(VeroneseError):
    pass


class UnknownGenerator(VeroneseError):
    pass


class ParseError(VeroneseError):
    """Input text could not be parsed; line and column are 1-based."""
    def __init__(self, message: str, line: int = 1, column: int = 1, text: str = ""):
        super().__init__(f"{message} (line {line}, column {column})",
                         {"line": line, "column": column, "text": text})
        self.line = line
        self.column = column


class ConfigError(VeroneseError):
    pass
