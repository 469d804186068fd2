"""Exception hierarchy shared by all llinf modules."""


class LLinfError(Exception):
    """Base class for all errors raised by this package."""


class SurfaceSyntaxError(LLinfError):
    """Ill-formed surface text.  Carries a 1-based line/column position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class DefinitionError(LLinfError):
    """Duplicate, missing, or undefined definition name."""


class GuardednessError(LLinfError):
    """A definition cycle passes through no constructor.

    ``cycle`` lists the definition names on the offending reference chain.
    """

    def __init__(self, message, cycle=()):
        self.cycle = list(cycle)
        super().__init__(message)


class CaptureError(LLinfError):
    """A reference occurs beneath a binder that would capture a free
    variable of the referenced body."""

    def __init__(self, message, binder=None, ref=None):
        self.binder = binder
        self.ref = ref
        super().__init__(message)


class BudgetExceededError(LLinfError):
    """A traversal visited more nodes than its configured budget.

    On depth projection this signals an input whose depth-bounded region
    is infinite, i.e. an ill-formed preterm.
    """


class InvalidPositionError(LLinfError):
    """A position does not resolve in the given graph, or does not point
    at a redex of the claimed kind."""


class MetricsUndefinedError(LLinfError):
    """The metric equations have no (finite) solution on this input."""


class EncodingError(LLinfError):
    """Arity mismatch or shape mismatch while encoding/decoding."""
