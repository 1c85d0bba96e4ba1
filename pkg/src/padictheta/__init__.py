"""Exact q-adic verification toolkit for theta functions on Mumford curves."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GroupError,
    PadicError,
    PrecisionExhausted,
    VerificationError,
)
from .field import (
    FieldSpec,
    PadicNumber,
    dev_val,
    hensel_sqrt,
    primitive_root_of_unity,
    teichmuller,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "GroupError",
    "PadicError",
    "PrecisionExhausted",
    "VerificationError",
    "FieldSpec",
    "PadicNumber",
    "dev_val",
    "hensel_sqrt",
    "primitive_root_of_unity",
    "teichmuller",
]
