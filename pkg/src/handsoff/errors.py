"""Exception types shared across the package."""


class HandsOffError(Exception):
    """Base class for all package errors."""


class DimensionError(HandsOffError, ValueError):
    """Array shapes do not match the required layout."""


class DomainError(HandsOffError, ValueError):
    """Numeric input outside the admissible domain (non-finite, out of box)."""


class ParameterError(HandsOffError, ValueError):
    """Configuration or penalty parameter outside its admissible range."""


class AssumptionViolationError(HandsOffError, ValueError):
    """Penalty fails the structural conditions required by the DC split."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InfeasibleProblemError(HandsOffError, RuntimeError):
    """No admissible control reaches the origin; carries the phase-1 certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NumericalError(HandsOffError, RuntimeError):
    """A numeric routine failed beyond recovery (singular basis, stall)."""


class SizeError(HandsOffError, ValueError):
    """Instance too large for exhaustive enumeration."""
