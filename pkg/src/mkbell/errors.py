"""Exception types shared across the package.

The CLI maps these onto exit codes: input errors exit 2, capacity errors
exit 3 and inconsistent values exit 4.
"""


class MKBellError(Exception):
    """Base class for all package errors."""


class InvalidArgument(MKBellError, ValueError):
    pass


class DegenerateState(InvalidArgument):
    """Raised for an all-zero amplitude vector."""


class CapacityExceeded(MKBellError, ValueError):
    """Raised when a request exceeds the desk-scale size caps."""


class InconsistentValue(MKBellError, ArithmeticError):
    """A Bell value above every class bound; signals an upstream numerical bug."""
