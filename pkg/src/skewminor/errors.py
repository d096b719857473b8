"""Exception types raised across the package."""

from __future__ import annotations


class SkewMinorError(Exception):
    """Base class for every error raised by skewminor."""


class SpecMismatchError(SkewMinorError, TypeError):
    """Two operands live in different fields."""


class FieldDomainError(SkewMinorError, ZeroDivisionError):
    """Arithmetic outside the field's domain (division by zero)."""


class DomainError(SkewMinorError, ValueError):
    """An argument is outside the operation's documented domain."""


class LabelError(SkewMinorError, IndexError):
    """A label is unknown, duplicated or clashes with an existing one."""


class InvariantError(SkewMinorError, ValueError):
    """A matrix violates a structural invariant (e.g. skew-symmetry)."""


class SizeLimitError(DomainError):
    """Input is larger than an exhaustive sweep is allowed to handle."""


class PreconditionError(SkewMinorError, ValueError):
    """An operation's precondition does not hold for the given inputs."""

    def __init__(self, message: str, *, pair=None, subset=None):
        super().__init__(message)
        self.pair = pair
        self.subset = subset


class DensityError(PreconditionError, DomainError):
    """A matrix that must be dense has a zero off-diagonal entry."""


class HypothesisError(PreconditionError):
    """Input pair lies outside the recoverable case, e.g. A is HL-decomposable.

    ``subset`` carries a nontrivial HL-clan when one was found.
    """


class VerificationError(SkewMinorError, ArithmeticError):
    """A computed certificate failed its own verification.

    ``entry`` is the first (row_label, col_label) where the check broke.
    """

    def __init__(self, message: str, *, entry=None):
        super().__init__(message)
        self.entry = entry


class FieldError(SkewMinorError, ValueError):
    """A value has no square root in the ambient field."""

    def __init__(self, message: str, *, subset=None):
        super().__init__(message)
        self.subset = subset


class InconsistencyError(SkewMinorError, ValueError):
    """A minor table admits no skew-symmetric matrix.

    ``subset`` is the principal subset whose minor could not be matched.
    """

    def __init__(self, message: str, *, subset=None):
        super().__init__(message)
        self.subset = subset
