"""Exception types shared across the package."""


class HpcaError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HpcaError, ValueError):
    """Invalid input: malformed files, bad dimensions, degenerate data."""


class NumericalError(HpcaError, RuntimeError):
    """A numerical contract was violated during model construction."""
