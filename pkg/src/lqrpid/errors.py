"""Exception hierarchy shared across the package."""


class LqrPidError(Exception):
    """Base class for all errors raised by lqrpid."""


class ConfigError(LqrPidError, ValueError):
    """Invalid configuration or parameter values."""


class NumericFailure(LqrPidError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""


class RiccatiError(LqrPidError):
    """The Riccati solver could not return a certified solution."""


class NotStabilizableError(RiccatiError):
    """No stabilizing solution exists (or none was found) for the given data."""


class ConvergenceError(RiccatiError):
    """A solution was found but failed the residual certificate."""
