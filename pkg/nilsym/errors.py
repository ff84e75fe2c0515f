"""Exception hierarchy. ``exit_code`` is what the CLI returns for each class."""
from __future__ import annotations

from typing import Any, Optional, Sequence


class NilsymError(Exception):
    exit_code = 1


class InputError(NilsymError, ValueError):
    """The input cannot be analyzed as given."""

    exit_code = 2


class RepresentationError(InputError):
    def __init__(self, message: str, report: Any = None) -> None:
        super().__init__(message)
        self.report = report


class NotCompactError(InputError):
    pass


class NumericalAmbiguityError(NilsymError, ArithmeticError):
    """A rank decision fell inside the ambiguity band around the threshold."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        singular_values: Optional[Sequence[float]] = None,
        threshold: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.singular_values = list(singular_values) if singular_values is not None else None
        self.threshold = threshold


class DecompositionError(NumericalAmbiguityError):
    pass


class InternalConsistencyError(NilsymError, RuntimeError):
    """A computed result contradicts the mathematics; always a bug."""

    exit_code = 4


class ConventionError(InternalConsistencyError):
    pass


class StructuralMismatchError(InternalConsistencyError):
    pass


class ConstructionError(InternalConsistencyError):
    pass


class CentralActionError(InternalConsistencyError):
    pass


class TheoremViolationError(InternalConsistencyError):
    def __init__(self, message: str, report: Any = None) -> None:
        super().__init__(message)
        self.report = report
