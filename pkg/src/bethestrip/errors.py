"""Exception types shared across the package."""


class BetheStripError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrixError(BetheStripError):
    """A matrix that must be inverted is singular or numerically unusable."""


class OutOfBandError(BetheStripError):
    """A real energy lies outside the band where a closed form is defined."""


class UnsupportedEnsembleError(BetheStripError):
    """The requested operation is undefined for this disorder ensemble."""


class NoConvergenceError(BetheStripError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularJacobianError(BetheStripError):
    """Newton's method produced a Jacobian too ill-conditioned to solve."""


class ContinuationBreakdownError(BetheStripError):
    """Boundary continuation lost the physical solution branch."""

    def __init__(self, message, eta=None):
        super().__init__(message)
        self.eta = eta


class EigenvalueLawError(BetheStripError):
    """A computed eigenvalue violates the exact modulus law."""


class TruncationOverflowError(BetheStripError):
    """A polynomial exceeds the requested truncation degree or basis cap."""


class SizeOverflowError(BetheStripError):
    """A direct solve was requested beyond the supported problem size."""


class ConfigError(BetheStripError):
    """Invalid command-line or config-file input."""
