"""Exception types raised by the solvers and studies."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A run parameter violates a documented constraint."""


class InvariantViolationError(RuntimeError):
    """A solver iterate left the set it is guaranteed to stay in."""


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration hit ``max_iter`` before reaching ``tol``."""

    def __init__(self, message, residual_history):
        super().__init__(message)
        self.residual_history = list(residual_history)
