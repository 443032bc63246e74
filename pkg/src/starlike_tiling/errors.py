"""Exception hierarchy for the tiling package."""


class TilingError(Exception):
    """Base class for every error raised by this package."""


class HypothesisViolated(TilingError, ValueError):
    pass


class Infeasible(TilingError, ValueError):
    pass


class ZeroVector(TilingError, ValueError):
    pass


class DimensionExhausted(TilingError, ValueError):
    pass


class EmptyNet(TilingError, ValueError):
    pass


class EmptySystem(TilingError, ValueError):
    pass


class InvalidTile(TilingError, ValueError):
    pass


class OutOfHorizon(TilingError, LookupError):
    """The query lies beyond the horizon the separated net was built for."""


class SamplingFailed(TilingError, RuntimeError):
    pass


class IterationCapExceeded(TilingError, RuntimeError):
    pass


class ConstructionFailed(TilingError, RuntimeError):
    pass


class ConfigError(TilingError, ValueError):
    pass
