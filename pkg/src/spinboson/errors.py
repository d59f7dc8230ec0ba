"""Exception types shared across the package.

Domain violations (bad frequencies, negative rates, invalid indices) raise the
builtin ``ValueError``/``IndexError``; the classes below cover numerical
failure modes that callers may want to catch separately.
"""


class SpinBosonError(Exception):
    """Base class for numerical failures raised by this package."""


class QuadratureConvergenceError(SpinBosonError):
    """Adaptive quadrature did not reach the requested accuracy.

    Attributes
    ----------
    estimate : float
        Best estimate of the failed integral reached before giving up.
    achieved : float
        Error estimate reported by the integrator.
    """

    def __init__(self, message, estimate, achieved):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved


class TruncationError(SpinBosonError):
    """A Fock-space cutoff retains too little of the untruncated state."""


class OracleAccuracyError(SpinBosonError):
    """The master-equation integrator failed an internal accuracy check."""


class ConfigError(SpinBosonError):
    """An experiment configuration failed validation.

    ``field`` holds a dotted path to the offending entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def __str__(self):
        base = super().__str__()
        if self.field:
            return f"{self.field}: {base}"
        return base
