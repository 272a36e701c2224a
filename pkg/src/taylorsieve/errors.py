"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes (see ``taylorsieve.cli``).
"""


class TaylorSieveError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(TaylorSieveError, ValueError):
    """Malformed input: bad file, bad JSON, unparsable polynomial."""


class ParseError(ConfigError):
    """Polynomial or element string could not be parsed."""

    def __init__(self, message, src=None, pos=None):
        self.src = src
        self.pos = pos
        if src is not None and pos is not None:
            message = f"{message} at position {pos}: {src!r}"
        super().__init__(message)


class FieldMismatch(TaylorSieveError, ValueError):
    """Operands live in different fields, or an embedding does not fit."""


class BudgetExceeded(TaylorSieveError, RuntimeError):
    """A brute-force enumeration would exceed its configured budget."""


class PreconditionError(TaylorSieveError, ValueError):
    """A mathematical hypothesis failed (singular point, degenerate conic, ...)."""
