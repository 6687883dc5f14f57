"""Exception hierarchy shared by every module.

All domain failures derive from :class:`OfflangError`; the CLI maps those to
exit status 1.
"""


class OfflangError(Exception):
    """Base class for expected, user-facing failures."""


class DataError(OfflangError, ValueError):
    """Malformed or unsuitable input data."""


class ConfigError(OfflangError, ValueError):
    """Invalid pipeline, grid or hyperparameter configuration."""


class ModelFormatError(OfflangError, ValueError):
    """A model file could not be read or does not match its inputs."""


class ProbabilityUnavailableError(OfflangError, ValueError):
    """Probability estimates were requested from a hinge-loss model."""


class GridSearchError(OfflangError):
    """A grid point failed; the message names the point and fold."""
