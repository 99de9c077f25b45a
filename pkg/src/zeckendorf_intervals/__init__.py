"""Generalized Zeckendorf decompositions and summand statistics on small intervals."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, InvalidInput, InvariantViolation  # noqa: F401
from .plrs_core import (  # noqa: F401
    Decomposition,
    Plrs,
    SequenceCache,
    decompose,
    decompose_general,
    decompose_greedy,
    enumerate_legal,
    find_top_index,
    gap_lengths,
    is_legal,
    recompose,
    summand_count,
    term,
    validate_plrs,
)
