"""Exception types raised by the simulator."""


class WignerDriftError(Exception):
    """Base class for all simulator errors."""


class InvalidInputError(WignerDriftError, ValueError):
    """Non-finite or out-of-range input."""


class HorizonError(InvalidInputError):
    """Static frame requested at or inside the horizon (r <= r_s)."""


class DegenerateMetricError(WignerDriftError, ValueError):
    """Metric is singular at the requested point."""


class MassShellError(InvalidInputError):
    """Four-momentum does not satisfy p0 = sqrt(|p|^2 + m^2)."""


class StepSizeError(WignerDriftError):
    """Rotation angle per step exceeds the integrator guard.

    ``tau`` holds the proper time at which the violation was detected.
    """

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class InvalidStateError(InvalidInputError):
    """Matrix is not a valid 2x2 density matrix."""
