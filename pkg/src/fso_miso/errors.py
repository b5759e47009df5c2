"""Exception types raised by the simulator."""


class FsoMisoError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(FsoMisoError, ValueError):
    """Invalid detector-array or beam geometry (non-positive side, empty grid, ...)."""


class ParameterError(FsoMisoError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class DegenerateChannelError(FsoMisoError, ValueError):
    """All channel gains vanish, so power allocation is undefined."""


class NonStationaryTrackerError(FsoMisoError, ValueError):
    """The tracker autoregression has |a| >= 1 and no steady state exists."""


class InconsistentInputError(FsoMisoError, ValueError):
    """Inputs violate a structural requirement (e.g. a non-Hermitian energy tensor)."""


class ConfigError(FsoMisoError, ValueError):
    """A configuration file or scenario description is invalid."""


class ObjectiveEvaluationError(FsoMisoError, RuntimeError):
    """The optimizer's objective failed to evaluate at a candidate point."""
