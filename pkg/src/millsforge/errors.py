"""Exception hierarchy shared across the package."""


class MillsForgeError(Exception):
    """Base class for all package errors."""


class DomainError(MillsForgeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(MillsForgeError):
    """A configured resource bound (exponent range, size, budget) would be exceeded."""


class PrecisionError(MillsForgeError):
    """The working precision is too low to decide the requested quantity."""


class HorizonError(PrecisionError):
    """Requested digits lie beyond what the known data can determine."""

    def __init__(self, message, horizon):
        super().__init__(message)
        self.horizon = horizon


class IntegrityError(MillsForgeError):
    """Stored or supplied data failed a consistency re-check."""


class ConstructionError(MillsForgeError):
    """A nested-interval construction could not be continued."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval
