"""Exception types raised across the package."""


class LRRError(Exception):
    """Base class for package errors."""


class EmptySignalError(LRRError, ValueError):
    pass


class ConfigError(LRRError, ValueError):
    pass


class RankError(LRRError, ValueError):
    """A matrix that must have full column rank does not."""


class ConvergenceError(LRRError, RuntimeError):
    """Coordinate descent hit ``max_iter`` before meeting its tolerance.

    The best iterate and its KKT violation are kept on the exception so
    callers can inspect or reuse them.
    """

    def __init__(self, message, x_tilde=None, kkt_violation=None, iterations=None,
                 partial=None):
        super().__init__(message)
        self.x_tilde = x_tilde
        self.kkt_violation = kkt_violation
        self.iterations = iterations
        # solutions computed before the failure, when raised from a path solve
        self.partial = partial if partial is not None else []
