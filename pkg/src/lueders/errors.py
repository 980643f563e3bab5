"""Exception and warning types shared across the package."""


class LuedersError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(LuedersError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class NotPSD(LuedersError):
    """A matrix that must be positive semidefinite has a negative eigenvalue."""


class DimensionMismatch(LuedersError):
    """Operands have incompatible shapes for the requested operation."""


class NotNormalized(LuedersError):
    """A pure state does not have unit norm."""


class InvalidProjectors(LuedersError):
    """Projectors are not mutually orthogonal or do not sum to identity."""


class InvalidG0(LuedersError):
    """Coherence factor g0 lies outside the closed unit disk."""


class NonOrthonormalBasis(LuedersError):
    """A pointer basis is not orthonormal and complete."""


class StepUnderflow(LuedersError):
    """Fixed-step integration would need more than the allowed number of steps."""


class ParseError(LuedersError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RangeError(LuedersError):
    """A parsed value violates its documented range."""


class NotTracePreservingWarning(UserWarning):
    """Kraus set is not trace preserving; the channel is kept as given."""


class AdiabaticRegimeWarning(UserWarning):
    """Adiabatic formula used outside its weak-drive regime (drive > decay/2)."""


class NotConvergedWarning(UserWarning):
    """An optimizer stopped at its iteration limit; result returned anyway."""
