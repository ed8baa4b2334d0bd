class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Inconsistent configuration: shape mismatches, bad sensor files, limits."""
