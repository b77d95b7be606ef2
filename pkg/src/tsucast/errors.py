"""Exception types shared across the package."""


class TsucastError(Exception):
    """Base class for all package-specific errors."""


class DataCorruptionError(TsucastError):
    """Raw data contains non-finite or otherwise unusable samples."""


class InsufficientDataError(TsucastError):
    """A raw record does not cover the requested time span."""


class DatabaseInconsistencyError(TsucastError):
    """Scenario records disagree on shapes, sampling, or identifiers."""


class DegenerateInputError(TsucastError):
    """An input carries no usable signal (e.g. an all-zero data matrix)."""


class ConfigError(TsucastError):
    """A configuration value is out of range or self-contradictory."""


class ModelError(TsucastError):
    """A likelihood model parameter is invalid (e.g. nonpositive variance)."""


class DegenerateLikelihoodWarning(RuntimeWarning):
    """Every scenario likelihood underflowed at one update step."""
