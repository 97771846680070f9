"""Error taxonomy shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class IntegrityError(RuntimeError):
    """An internal consistency check failed (invalid state, bad file, ...)."""


class AccuracyError(RuntimeError):
    """A numerical routine could not meet its accuracy contract."""
