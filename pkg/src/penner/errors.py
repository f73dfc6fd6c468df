"""Exception hierarchy shared by all modules."""


class PennerError(Exception):
    """Base class for every error raised by the package."""


class DomainError(PennerError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BackendError(PennerError, TypeError):
    """Exact and floating scalars were mixed."""


class PrecisionError(PennerError):
    """Requested accuracy cannot be reached at the working precision."""


class PoleError(PennerError, ZeroDivisionError):
    """Series division would produce negative powers."""


class RegularizationError(PennerError):
    """A genus integral has a nonintegrable singularity at t = 0."""


class ValidationError(PennerError, ValueError):
    """Malformed or unsupported potential / configuration."""


class IntegrabilityError(PennerError):
    """The weight is not integrable on the contour."""


class DegeneracyError(PennerError):
    """Vanishing Hankel determinant or singular linearization."""


class ProximityError(PennerError):
    """Evaluation point lies on (or too close to) the contour."""


class UnsupportedFormError(PennerError, ValueError):
    """Input not of the required rational/linear-factor form."""


class RegimeError(PennerError):
    """Parameters fall outside the regime an engine handles."""


class CriticalityError(RegimeError):
    """The regularity determinant vanishes (one-cut ansatz breaks down)."""


class ConvergenceError(RegimeError):
    """An iterative solver failed to converge."""


class MergingCutsError(RegimeError):
    """Two-cut Jacobian is singular because the cuts merge."""


class ConsistencyError(PennerError):
    """Computed quantities violate a positivity or structural invariant."""
