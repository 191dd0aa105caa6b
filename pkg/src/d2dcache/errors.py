"""Shared exception types."""


class DomainError(ValueError):
    """An argument is outside the supported parameter range."""


class ConfigurationError(ValueError):
    """A configuration value is structurally invalid (e.g. divisibility)."""


class UnsupportedConfigurationError(ConfigurationError):
    """The parameter combination is outside what the model supports."""


class PreconditionError(ValueError):
    """A documented operation precondition does not hold."""


class NumericalError(ArithmeticError):
    """An iterative numerical routine failed to converge."""
