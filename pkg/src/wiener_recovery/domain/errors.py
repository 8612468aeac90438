"""Domain exceptions for sparse Fourier recovery."""


class RecoveryError(Exception):
    """Base class for errors raised by the numerical core."""

    pass


class DimensionMismatchError(RecoveryError, ValueError):
    """Raised when frequencies, points or coefficient vectors disagree on d."""

    pass


class CardinalityCapError(RecoveryError):
    """Raised when an index set, radius or matrix would exceed a configured cap."""

    def __init__(self, what: str, requested: float, cap: float):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(
            f"{what} of {requested:.6g} exceeds the configured cap of {cap:.6g}"
        )


class UnsupportedClassError(RecoveryError):
    """Raised when a class/parameter combination has no usable bound."""

    pass


class InvalidProblemError(RecoveryError, ValueError):
    """Raised for malformed solver inputs (shapes, NaN or Inf entries)."""

    pass


class InfeasiblePointError(RecoveryError):
    """Raised when a certificate is requested for a point outside the feasible set."""

    pass


class NumericalFailureError(RecoveryError):
    """Raised when an internal consistency check of a computation fails."""

    pass
