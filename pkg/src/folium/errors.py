"""Exception hierarchy shared by every module.

The CLI maps :class:`DomainError` to exit status 2 and
:class:`NumericalError` to exit status 3.
"""


class FoliumError(Exception):
    pass


class DomainError(FoliumError, ValueError):
    """An input violates the precondition of an operation."""


class TruncationOverflow(DomainError):
    """A result would need coefficients beyond the requested table."""


class NumericalError(FoliumError, ArithmeticError):
    """A numerical procedure (root finding, continuation) did not converge."""
