# src/utils/errors.py
from __future__ import annotations


class FelkitError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FelkitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InputError(FelkitError, ValueError):
    """Malformed or inconsistent input data."""


class EvaluationError(FelkitError, ArithmeticError):
    """A well-posed evaluation could not be carried out numerically."""


def require(condition: bool, message: str, exc: type[FelkitError] = DomainError) -> None:
    if not condition:
        raise exc(message)
