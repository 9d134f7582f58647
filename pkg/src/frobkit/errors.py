"""Shared exception types."""


class FrobkitError(Exception):
    """Base class for all library-specific errors."""


class SpecMismatchError(FrobkitError):
    """Operands belong to different field specs."""


class PrecisionError(FrobkitError):
    """A value is indistinguishable from zero at the working precision."""


class IndeterminateError(FrobkitError):
    """A divisibility or degree question cannot be settled at the working precision."""


class IntegralityError(FrobkitError):
    """A value that must lie in the integer ring fails to be integral."""


class BudgetError(FrobkitError):
    """A root-budget or exponent-bound limit was exceeded."""


class NoRootError(FrobkitError):
    """No residue root exists for the requested power."""
