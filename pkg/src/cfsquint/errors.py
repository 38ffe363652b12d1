"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value; the message names the offending field."""


class GeometryError(ValueError):
    """Physically impossible deployment geometry (e.g. a UE on top of an AP)."""


class DegenerateChannelError(ValueError):
    """A statistic is undefined because the channel carries no power."""
