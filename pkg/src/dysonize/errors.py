"""Exception types raised across the package."""


class DysonizeError(Exception):
    """Base class for all package errors."""


class DegenerateSpinError(DysonizeError, ValueError):
    """Raised for two_s = 0, where the multiplet or the normalization factors degenerate."""

    def __init__(self, two_s=0):
        super().__init__(f"degenerate spin: two_s must be >= 1 (got {two_s})")
        self.two_s = two_s


class BasisMismatchError(DysonizeError, ValueError):
    """Raised when operators on different ordered bases are combined."""


class DimensionError(DysonizeError, ValueError):
    """Raised on shape mismatches or Hilbert spaces beyond the desk-scale guardrail."""


class ClusterError(DysonizeError, ValueError):
    """Raised for malformed clusters, or non-bipartite clusters given to two-sublattice models."""


class ModelError(DysonizeError, ValueError):
    """Raised for invalid model/representation pairs or unknown algebra elements."""


class PreconditionError(DysonizeError, ValueError):
    """Raised when a numerical precondition (e.g. metric self-adjointness) is violated."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
