"""Exception types shared across the package."""


class RaschClustError(Exception):
    """Base class for all package errors."""


class DataError(RaschClustError, ValueError):
    """Invalid response data (shape, values, labels)."""


class DegenerateItemError(DataError):
    """An item column is constant (all 0 or all 1) and cannot be fitted."""

    def __init__(self, labels):
        self.labels = list(labels)
        super().__init__(f"constant item column(s): {', '.join(self.labels)}")


class ConfigError(RaschClustError, ValueError):
    """Invalid configuration value."""
