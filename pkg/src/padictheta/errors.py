"""Error taxonomy shared by every module.

ConfigError means the input description is unusable (exit code 2 in the CLI);
everything else reports a failure of the requested computation itself.
"""


class PadicError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PadicError):
    """Invalid or inconsistent configuration data."""


class DomainError(PadicError, ValueError):
    """Operand outside the mathematical domain of the operation."""


class PrecisionExhausted(PadicError, ArithmeticError):
    """All trusted digits cancelled, or an operation needs digits we do not have."""


class ConvergenceError(PadicError):
    """A truncated product or series failed to reach its tail target."""


class GroupError(PadicError):
    """Word or matrix data incompatible with the expected group structure."""


class VerificationError(PadicError):
    """Two independent computation routes disagree beyond tolerance."""
