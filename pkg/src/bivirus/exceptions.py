"""Exception hierarchy; each family maps to a CLI exit code."""


class BiVirusError(Exception):
    exit_code = 2


class ValidationError(BiVirusError, ValueError):
    """Parameters or inputs violate a stated assumption."""

    exit_code = 1


class PreconditionError(ValidationError):
    pass


class DomainError(PreconditionError):
    """A state lies outside the invariant set beyond tolerance."""


class ConfigError(ValidationError):
    pass


class NumericalError(BiVirusError, ArithmeticError):
    """An iterative or linear-algebra routine failed to deliver."""

    exit_code = 2


class ConsistencyError(BiVirusError):
    """A computed result contradicts a proven property of the model."""

    exit_code = 3
