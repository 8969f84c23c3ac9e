"""Exception hierarchy shared across the package."""


class IxcapError(Exception):
    """Base class for all errors raised by this package."""


class InputError(IxcapError):
    """Malformed or inconsistent user input (files, matrices, indices)."""


class CapExceededError(IxcapError):
    """A configurable size cap (alphabet, vertex count, subset size) was exceeded."""


class BudgetExceededError(IxcapError):
    """A search ran out of its node budget before proving optimality.

    Carries the best bound found so far in ``best`` when available.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConvergenceError(IxcapError):
    """An iterative solver failed to converge within its iteration budget.

    Carries the last iterate value and residuals for diagnosis.
    """

    def __init__(self, message, last_value=None, residual=None):
        super().__init__(message)
        self.last_value = last_value
        self.residual = residual
