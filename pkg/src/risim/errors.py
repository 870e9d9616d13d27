"""Exception types shared across the package."""


class DomainError(ValueError):
    """A physically or structurally invalid input (bad index, shape, range)."""


class ConfigError(ValueError):
    """A scenario configuration that cannot be parsed or validated."""
