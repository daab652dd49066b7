class ImmersionKitError(Exception):
    """Base class for all errors raised by immersionkit."""


class BudgetExceeded(ImmersionKitError):
    """An exact search would exceed its configured budget.

    Exact routines raise this instead of returning a possibly wrong answer.
    """


class FormatError(ImmersionKitError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
