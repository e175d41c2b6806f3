"""Exception hierarchy for tailwright.

Every error raised by the library derives from TailwrightError so callers
can catch one type at the boundary. The CLI maps these to exit code 1
(usage problems go through argparse and exit 2).
"""


class TailwrightError(Exception):
    """Base class for all tailwright errors."""


class ParseError(TailwrightError):
    """Malformed input file. Carries the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(TailwrightError, ValueError):
    """A value is outside the mathematical domain of an operation."""


class InsufficientDataError(TailwrightError, ValueError):
    """Not enough data points to perform the operation."""


class EmptyInputError(InsufficientDataError):
    """An input file or series contained no data at all."""


class InsufficientTailError(InsufficientDataError):
    """No usable tail remains above the requested or scanned cutoff."""


class DegenerateDataError(TailwrightError, ValueError):
    """Data admits no finite estimate (for example all values identical)."""


class ConvergenceError(TailwrightError, ArithmeticError):
    """An iterative solver failed to converge. Carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class ConfigError(TailwrightError, ValueError):
    """Invalid configuration (bad parameter combination or setting)."""


class SchemaError(TailwrightError):
    """Report files with mismatched schema versions were mixed."""
