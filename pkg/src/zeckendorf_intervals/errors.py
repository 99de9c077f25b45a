"""Exception hierarchy.

Input problems derive from :class:`InvalidInput` (a ``ValueError``), resource
limits from :class:`BudgetExceeded`, and broken internal invariants from
:class:`InvariantViolation`. The CLI maps these to exit codes 2, 3 and 4.
"""


class InvalidInput(ValueError):
    pass


class EmptyCoefficients(InvalidInput):
    pass


class NonPositiveLeading(InvalidInput):
    pass


class NonPositiveTrailing(InvalidInput):
    pass


class NegativeCoefficient(InvalidInput):
    pass


class DegenerateRecurrence(InvalidInput):
    """Signature ``[1]``: the sequence is constant and nothing above 0 is representable."""


class NonMonotonePlrs(InvalidInput):
    pass


class ZeroOrNegativeInput(InvalidInput):
    pass


class BudgetTooSmall(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput):
    pass


class RunExceedsWindow(InvalidInput):
    pass


class HOutOfRange(InvalidInput):
    pass


class TooSmall(InvalidInput):
    pass


class Infeasible(InvalidInput):
    pass


class ZNotGreaterThanL(InvalidInput):
    pass


class TableTooShort(InvalidInput):
    pass


class BudgetExceeded(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    """Something that a theorem says cannot happen did happen."""


class NoLegalDecomposition(InvariantViolation):
    pass


class MultipleLegalDecompositions(InvariantViolation):
    pass


class NoConvergence(InvariantViolation):
    pass


class WindowTooSmall(UserWarning):
    """The buffer window is narrower than the zero run the gate asks for."""
