"""Semantic exceptions shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CriticalPointError(DomainError):
    """Evaluation exactly at the critical coupling, where the phase branch
    is deliberately left undefined."""


class EvaluationRangeError(OverflowError):
    """A polynomial or bound evaluation exceeded floating-point range."""


class EnumerationLimitError(ValueError):
    """Exhaustive enumeration was requested beyond the configured size limit."""
