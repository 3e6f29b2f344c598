"""Exception types shared across the package."""


class BoolCompError(Exception):
    """Base class for all package errors."""


class ArityMismatch(BoolCompError, ValueError):
    pass


class BudgetExceeded(BoolCompError):
    """An enumeration, edge count or LP size went over its configured limit."""


class ParseError(BoolCompError, ValueError):
    pass


class IncompatibleSelector(BoolCompError, ValueError):
    pass


class ConstantFunctionError(BoolCompError, ValueError):
    """Raised by operations that need a non-constant function."""


class PreconditionError(BoolCompError, ValueError):
    """A documented precondition was violated; the message names the offender."""
