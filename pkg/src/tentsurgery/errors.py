"""Exception types shared across the package."""


class TentSurgeryError(Exception):
    """Base class for all package errors."""


class DomainError(TentSurgeryError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionExhausted(TentSurgeryError, ArithmeticError):
    """Sign refinement exceeded the configured bit budget."""


class InvalidParameter(TentSurgeryError, ValueError):
    """A slope specification does not isolate a root in (1, 2]."""


class LengthMismatch(TentSurgeryError, ValueError):
    pass


class NotRenormalizable(TentSurgeryError, ValueError):
    pass


class CapExceeded(TentSurgeryError, ValueError):
    """Requested tree depth is above the enumeration cap."""


class TailBoundUnavailable(TentSurgeryError, RuntimeError):
    """No certified growth constant is available for the tail bound."""


class NotMarkov(TentSurgeryError, RuntimeError):
    pass


class NonConvergence(TentSurgeryError, RuntimeError):
    pass


class InsufficientDepth(TentSurgeryError, ValueError):
    pass


class SchemaError(TentSurgeryError, ValueError):
    """A persisted descriptor does not match the expected schema."""
