"""Exceptions raised by the samplers and the experiment CLI."""


class EpsPyError(Exception):
    """Base class for every error raised by epspy."""


class ParameterError(EpsPyError, ValueError):
    """A model parameter lies outside its valid window."""


class DomainError(ParameterError):
    """A function argument lies outside the function's domain."""


class InfiniteMomentError(ParameterError):
    """The requested moment of T_{alpha,theta} does not exist."""


class NumericalFailure(EpsPyError, RuntimeError):
    """A rejection loop or stick-breaking loop hit its iteration cap."""


class ConfigError(EpsPyError, ValueError):
    """The experiment configuration is invalid."""
