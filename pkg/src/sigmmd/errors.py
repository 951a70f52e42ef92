"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so raising the right family
matters more than the message text.
"""


class SigmmdError(Exception):
    """Base class for package errors."""


class ConfigError(SigmmdError):
    """Invalid configuration: bad parameters, impossible combinations."""


class InvalidPathError(ConfigError):
    """A path container failed validation."""


class CapacityError(ConfigError):
    """A requested tensor truncation exceeds the documented size bound."""


class DataError(SigmmdError):
    """Input data is unusable: unparseable rows, nonpositive prices, etc."""


class NumericalError(SigmmdError):
    """A computation produced non-finite values or diverged."""
