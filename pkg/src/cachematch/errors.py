"""Exception types shared across the package."""


class DomainError(ValueError):
    """A quantity was requested outside the regime where it is defined."""


class HardInvariantViolation(ValueError):
    """A structural system constraint is broken; the configuration is unusable.

    Carries the full validation report on ``.report`` when raised by
    ``cachematch.config.validate``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MissingCopyCount(ValueError):
    """A stored file has copy count zero, so per-copy load is undefined."""


class InsufficientMemory(ValueError):
    """Cluster memory cannot accommodate the requested placement."""


class IncompatibleScheme(ValueError):
    """The chosen scheme does not apply to the given configuration."""
