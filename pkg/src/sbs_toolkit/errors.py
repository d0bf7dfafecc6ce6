"""Toolkit-wide error types.

ConfigError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class ConfigError(ValueError):
    """A configuration file is missing, ill-typed or out of range."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (singular system, iteration cap, ...)."""
