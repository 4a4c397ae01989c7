"""Exception hierarchy shared by the library and the CLI."""


class BellspaceError(Exception):
    """Base class for every error raised by this package."""


class InvalidDistributionError(BellspaceError, ValueError):
    pass


class EmptyAccumulatorError(BellspaceError):
    pass


class UnmeasuredContextError(BellspaceError):
    """A setting pair was never selected, so its conditional correlation is undefined."""

    def __init__(self, cell, message=None):
        self.cell = cell
        i, j = cell
        super().__init__(message or f"setting pair ({i},{j}) has no trials")


class ZeroProbabilityError(BellspaceError, ZeroDivisionError):
    def __init__(self, cell):
        self.cell = cell
        i, j = cell
        super().__init__(f"setting pair ({i},{j}) has probability 0; cannot divide by it")


class NotApplicableError(BellspaceError):
    """The requested bound was only derived for uniform setting selection."""


class CountOverflowError(BellspaceError, OverflowError):
    pass


class ConfigError(BellspaceError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class UnknownModelError(ConfigError):
    pass


class NormalizationError(ConfigError):
    pass


class DomainError(ConfigError):
    pass
