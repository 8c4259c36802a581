"""Exception types raised by the simulator."""


class KerrKernelError(Exception):
    """Base class for all package errors."""


class CutoffExceededError(KerrKernelError, ValueError):
    """A polynomial order or photon number exceeds the configured cutoff."""


class TruncationError(KerrKernelError, ValueError):
    """The Fock cutoff is too small to hold the requested state."""


class DomainError(KerrKernelError, ValueError):
    pass


class ShapeMismatchError(KerrKernelError, ValueError):
    pass


class NumericalInconsistencyError(KerrKernelError, ArithmeticError):
    """A quantity that must be real (or bounded) came out otherwise."""


class DivergenceError(NumericalInconsistencyError):
    """An iterative update left the region the truncation can represent."""
