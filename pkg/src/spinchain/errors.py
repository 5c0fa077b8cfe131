"""Exception hierarchy shared by all spinchain modules."""


class SpinChainError(Exception):
    """Base class for every error raised by this package."""


# --- configuration / model validation ---------------------------------------

class ValidationError(SpinChainError):
    """A configuration value violates a model invariant."""


class DimensionError(ValidationError):
    """Chain too short (N < 2) or mismatched vector lengths."""


class NormError(ValidationError):
    """Initial-state amplitudes are not unit-norm."""


class ParamError(ValidationError):
    """Nonpositive width/cutoff or otherwise out-of-range parameter."""


class ConfigError(SpinChainError):
    """Malformed run configuration (unknown key, wrong type, bad path)."""


class UnknownAxisError(ConfigError):
    """Sweep axis does not name a numeric scalar in the run configuration."""


# --- special functions -------------------------------------------------------

class DomainError(SpinChainError):
    """Argument outside the mathematical domain of the function."""


class ConvergenceError(SpinChainError):
    """Iteration cap hit before reaching the requested accuracy.

    Carries the partial value and its error estimate so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message, value=None, est_error=None):
        super().__init__(message)
        self.value = value
        self.est_error = est_error


# --- kernels ------------------------------------------------------------------

class BranchError(SpinChainError):
    """Evaluation point lies on (or hugs) the branch cut of an analytic kernel."""


class QuadratureError(SpinChainError):
    """Adaptive quadrature failed to reach its tolerance."""


# --- Laplace-space algebra ----------------------------------------------------

class SingularPoint(SpinChainError):
    """Denominator vanished at the requested s; the contour must avoid it."""


class ConsistencyError(SpinChainError):
    """Closing-identity residual too large: catastrophic cancellation at s."""


# --- inversion ------------------------------------------------------------------

class ContourError(SpinChainError):
    """Inversion failed even after an automatic contour shift retry."""


class ToleranceNotMet(UserWarning):
    """Soft signal: a trajectory was produced but misses its error target."""


# --- time-domain solvers ---------------------------------------------------------

class StepError(SpinChainError):
    """Volterra step size violates the stability guard or the output grid."""


class KindError(SpinChainError):
    """Operation requires a reservoir kind it did not receive."""
