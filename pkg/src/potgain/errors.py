"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class PotgainError(Exception):
    exit_code = 1


class ParseError(PotgainError):
    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyGraphError(ParseError):
    pass


class DomainError(PotgainError, ValueError):
    exit_code = 3


class DimensionError(DomainError):
    pass


class DivergenceRiskError(DomainError):
    pass


class OverflowRiskError(DomainError):
    pass


class PoleError(DomainError):
    pass


class UndefinedCorrelationError(DomainError):
    pass


class NonConvergenceError(PotgainError):
    exit_code = 4


class UnreliableReferenceError(NonConvergenceError):
    pass


class ResourceCapError(PotgainError):
    exit_code = 5
