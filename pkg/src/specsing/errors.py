"""Exception taxonomy.

The CLI maps these onto exit statuses: invalid input (2), numerical failure
(3), below-threshold (4).  Library code raises, never exits.
"""


class SpecsingError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SpecsingError, ValueError):
    """An argument is outside its documented domain."""


class SingularParameterError(InvalidParameterError):
    """A parameter combination makes a formula singular (e.g. n = 0)."""


class PoleError(InvalidParameterError):
    """Evaluation exactly at a pole of a closed-form expression."""


class InvalidRegimeError(SpecsingError):
    """A formula was used outside the regime in which it is valid.

    Carries the measured violation in ``residual`` when applicable.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateParameterError(SpecsingError):
    """A linear solve or closed form degenerated (vanishing denominator)."""


class SingularityProximityError(SpecsingError):
    """Scattering coefficients requested too close to a spectral singularity.

    ``g_plus_abs`` records the magnitude of the vanishing denominator.
    """

    def __init__(self, message, g_plus_abs):
        super().__init__(message)
        self.g_plus_abs = g_plus_abs


class ConvergenceError(SpecsingError):
    """An iterative solver failed to reach its tolerance.

    ``history`` holds the iterates as (params, residual) tuples, last first.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class BlowUpError(SpecsingError):
    """The field integration left the representable range.

    ``x`` is the scaled position at which the blow-up was detected.
    """

    def __init__(self, message, x):
        super().__init__(message)
        self.x = x


class QuadratureError(SpecsingError):
    """Adaptive quadrature did not converge; ``estimate`` is the best value."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class BelowThresholdError(SpecsingError):
    """Requested gain does not exceed the linear threshold."""
