"""Exception types raised across the package."""


class GravCoherenceError(Exception):
    """Base class for all package errors."""


class DimensionError(GravCoherenceError, ValueError):
    """Operands have incompatible or unsupported dimensions."""


class NotHermitianError(GravCoherenceError, ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class InvalidStateError(GravCoherenceError, ValueError):
    """A matrix or ket fails the density-operator / normalisation checks."""


class NumericalValidationError(GravCoherenceError, RuntimeError):
    """A cross-check between two independent computations disagreed."""
