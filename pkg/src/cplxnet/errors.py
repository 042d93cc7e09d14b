"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/contract problems -> 2,
file format problems -> 3, numeric failures (NaN/Inf) -> 4.
"""


class CplxError(Exception):
    """Base class for all package errors."""


class DimensionError(CplxError):
    """Shapes of the operands are incompatible."""


class ContractError(CplxError):
    """An API precondition was violated by the caller."""


class ConfigError(CplxError):
    """Unknown name or invalid configuration value."""


class FormatError(CplxError):
    """A file failed to parse; message names the byte offset where known."""


class NumericError(CplxError):
    """NaN or Inf appeared where only finite values are allowed."""
