"""Exception hierarchy shared by all spec2d modules."""


class Spec2DError(Exception):
    """Base class for every error raised by spec2d."""


class PoleError(Spec2DError, ValueError):
    """Argument sits on a pole of the function being evaluated."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class BranchCutError(Spec2DError, ValueError):
    """Argument lies on a branch cut where the principal value is undefined."""


class DomainError(Spec2DError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class ConvergenceError(Spec2DError, ArithmeticError):
    """An iterative or series method failed to reach its tolerance."""


class SpectralPointError(Spec2DError, ValueError):
    """Spectral parameter coincides with (or is numerically on) the spectrum."""


class BracketError(Spec2DError, RuntimeError):
    """A root bracket does not show the expected sign change."""


class TruncationError(Spec2DError):
    """A truncated series did not reach the requested tolerance."""


class ResourceError(Spec2DError, RuntimeError):
    """A requested discretization exceeds the configured size cap."""


class IntegrabilityError(Spec2DError, ValueError):
    """An integrand does not decay fast enough for the requested integral."""
