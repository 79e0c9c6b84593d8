"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class UnsupportedOperation(NotImplementedError):
    """The requested operation is not available for this model or source."""


class ConfigError(ValueError):
    """Inconsistent simulation or command-line configuration."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed to converge or to self-validate.

    ``estimates`` carries whatever competing values were produced, so the
    caller can inspect how far apart they were.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values
