"""Exception hierarchy shared across the package."""


class HamIndexError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(HamIndexError, ValueError):
    pass


class InvalidArgumentError(HamIndexError, ValueError):
    pass


class EvaluationError(HamIndexError):
    """A user evaluator returned non-finite values."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class QuadratureError(HamIndexError):
    pass


class NumericError(HamIndexError):
    pass


class NonConvergenceError(HamIndexError):
    """Raised when an escalation loop gives up; ``diagnostic`` holds the evidence."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class IncompatibleLoopsError(HamIndexError, ValueError):
    pass


class DegenerateLoopError(HamIndexError, ValueError):
    pass


class CriticalPointNotFound(HamIndexError):
    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts or []
