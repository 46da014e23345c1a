"""Exception types shared across the toolkit."""


class SensorPlanError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(SensorPlanError, ValueError):
    """An argument violates a documented precondition."""


class NumericalDegeneracyError(SensorPlanError):
    """A covariance factorization failed even after jitter escalation.

    Attributes
    ----------
    jitter_attempted : float or None
        Largest relative diagonal inflation tried before giving up.
    """

    def __init__(self, message, jitter_attempted=None):
        super().__init__(message)
        self.jitter_attempted = jitter_attempted


class FieldDomainError(SensorPlanError):
    """A field was queried outside its region of interest or data support."""


class PlacementError(SensorPlanError):
    """Rejection sampling could not place the requested scenario points."""


class PlanningError(SensorPlanError):
    """No candidate sensing location could be scored.

    Attributes
    ----------
    failed_candidates : list of int
        Indices of the candidates whose scoring raised degeneracy errors.
    """

    def __init__(self, message, failed_candidates=None):
        super().__init__(message)
        self.failed_candidates = list(failed_candidates or [])


class ConfigError(SensorPlanError):
    """A run configuration is malformed or inconsistent (CLI exit code 2)."""


class DataError(SensorPlanError):
    """An input data file is missing or malformed (CLI exit code 3)."""
