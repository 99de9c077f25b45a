"""Positive linear recurrence sequences and their legal decompositions.

A signature ``(c_1, ..., c_L)`` fixes the recurrence
``G_{n+1} = c_1 G_n + ... + c_L G_{n+1-L}`` together with the special start
``G_1 = 1`` and ``G_{n+1} = c_1 G_n + ... + c_n G_1 + 1`` for ``n < L``.

Legality is tracked with a small automaton read from the top index down.  The
state ``p`` is the number of leading block coefficients already matched
(``a = c_1, ..., c_p``).  From state ``p`` a digit ``a < c_{p+1}`` closes the
block and returns to state 0, and ``a == c_{p+1}`` extends it to ``p + 1``,
which is only allowed while ``p + 1 < L`` (a full copy of the signature would
be replaced by the next term).  Zeros read in state 0 are the run of zeros
between blocks, and any state is accepting at the end of the string (a
trailing partial block is a proper prefix of the signature).

Decompositions are stored ascending by index; ``a_j`` multiplies ``G_j``.
"""

from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    BudgetTooSmall,
    DegenerateRecurrence,
    EmptyCoefficients,
    MultipleLegalDecompositions,
    NegativeCoefficient,
    NoLegalDecomposition,
    NonMonotonePlrs,
    NonPositiveLeading,
    NonPositiveTrailing,
    ZeroOrNegativeInput,
)


@dataclass(frozen=True)
class Plrs:
    """Recurrence signature ``c_1..c_L`` of a positive linear recurrence."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not coeffs:
            raise EmptyCoefficients("coefficient list is empty")
        if any(c < 0 for c in coeffs):
            raise NegativeCoefficient(f"negative coefficient in {list(coeffs)}")
        if coeffs[0] <= 0:
            raise NonPositiveLeading(f"c_1 must be positive, got {coeffs[0]}")
        if coeffs[-1] <= 0:
            raise NonPositiveTrailing(f"c_L must be positive, got {coeffs[-1]}")
        if coeffs == (1,):
            raise DegenerateRecurrence("G_{n+1} = G_n gives a constant sequence")

    @property
    def L(self) -> int:
        return len(self.coeffs)

    @property
    def K(self) -> int:
        return max(self.coeffs)

    @property
    def monotone(self) -> bool:
        c = self.coeffs
        return min(c) >= 1 and all(c[i] >= c[i + 1] for i in range(len(c) - 1))

    @cached_property
    def transitions(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``transitions[p]`` lists ``(digit, next_state)`` in ascending digit order."""
        out = []
        for p, c in enumerate(self.coeffs):
            opts = [(a, 0) for a in range(c)]
            if p + 1 < self.L:
                opts.append((c, p + 1))
            out.append(tuple(opts))
        return tuple(out)

    def __str__(self) -> str:
        return ",".join(map(str, self.coeffs))


def validate_plrs(coeffs: Iterable[int]) -> Plrs:
    return Plrs(tuple(coeffs))


class SequenceCache:
    """Append-only store of the terms ``G_1, G_2, ...`` of one PLRS.

    Extension happens under a lock; reads of already materialized terms do not
    need it because the list only ever grows.
    """

    def __init__(self, plrs: Plrs | Sequence[int]):
        if not isinstance(plrs, Plrs):
            plrs = validate_plrs(plrs)
        self.plrs = plrs
        self.terms: list[int] = [1]
        # _max_tail[j][p]: largest value spelled on indices j..1 from state p
        self._max_tail: list[tuple[int, ...]] = [(0,) * plrs.L]
        self._lock = threading.Lock()

    def __repr__(self):
        return f"SequenceCache({list(self.plrs.coeffs)}, materialized={len(self.terms)})"

    def _extend_to(self, n: int) -> None:
        with self._lock:
            c = self.plrs.coeffs
            L = len(c)
            g = self.terms
            while len(g) < n:
                k = len(g)  # computing G_{k+1}
                if k < L:
                    nxt = sum(c[i] * g[k - 1 - i] for i in range(k)) + 1
                else:
                    nxt = sum(c[i] * g[k - 1 - i] for i in range(L))
                g.append(nxt)

    def term(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"term index must be >= 1, got {n}")
        if n > len(self.terms):
            self._extend_to(n)
        return self.terms[n - 1]

    def __getitem__(self, n: int) -> int:
        return self.term(n)

    def terms_upto(self, n: int) -> list[int]:
        self.term(n)
        return self.terms[:n]

    def find_top_index(self, N: int) -> int:
        """The unique ``n`` with ``G_n <= N < G_{n+1}``."""
        if N < 1:
            raise ZeroOrNegativeInput(f"N must be positive, got {N}")
        while self.terms[-1] <= N:
            self._extend_to(len(self.terms) + 16)
        return bisect.bisect_right(self.terms, N)

    def max_tail(self, p: int, j: int) -> int:
        """Largest value of a legal digit string on indices ``j..1`` entered in state ``p``."""
        tab = self._max_tail
        if j >= len(tab):
            self.term(j)
            trans = self.plrs.transitions
            while len(tab) <= j:
                i = len(tab)
                g = self.terms[i - 1]
                prev = tab[i - 1]
                tab.append(
                    tuple(max(a * g + prev[q] for a, q in trans[s]) for s in range(self.plrs.L))
                )
        return tab[j][p]


CacheLike = Union[SequenceCache, Plrs, Sequence[int]]


def as_cache(obj: CacheLike) -> SequenceCache:
    return obj if isinstance(obj, SequenceCache) else SequenceCache(obj)


def term(cache: SequenceCache, n: int) -> int:
    return cache.term(n)


def find_top_index(cache: SequenceCache, N: int) -> int:
    return cache.find_top_index(N)


@dataclass(frozen=True)
class Decomposition:
    """Sparse coefficient vector: ascending ``(index, coefficient)`` pairs, zeros omitted."""

    entries: tuple[tuple[int, int], ...]
    value: int = field(compare=True)

    def __post_init__(self):
        prev = 0
        for j, a in self.entries:
            if j <= prev or a < 1:
                raise ValueError(f"malformed entries {self.entries}")
            prev = j

    @classmethod
    def from_entries(cls, cache: SequenceCache, entries: Iterable[Sequence[int]]) -> "Decomposition":
        ents = tuple(sorted((int(j), int(a)) for j, a in entries if a))
        return cls(ents, sum(a * cache.term(j) for j, a in ents))

    @classmethod
    def from_top_down(cls, cache: SequenceCache, coeffs: Sequence[int]) -> "Decomposition":
        """Adapter from the top-first string ``(a_1, ..., a_m)`` meaning ``sum a_i G_{m+1-i}``."""
        m = len(coeffs)
        return cls.from_entries(cache, ((m - i, a) for i, a in enumerate(coeffs)))

    def to_top_down(self, length: int | None = None) -> list[int]:
        """Dense top-first coefficient string; ``length`` defaults to the top index."""
        top = self.top_index
        if length is None:
            length = top
        if length < top:
            raise ValueError(f"length {length} is below the top index {top}")
        out = [0] * length
        for j, a in self.entries:
            out[length - j] = a
        return out

    def dense(self, lo: int, hi: int) -> tuple[int, ...]:
        """Coefficients of indices ``lo..hi`` inclusive, ascending."""
        d = dict(self.entries)
        return tuple(d.get(j, 0) for j in range(lo, hi + 1))

    @property
    def top_index(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.entries)

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        return {"value": str(self.value), "entries": [[j, a] for j, a in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "Decomposition":
        return cls(tuple((int(j), int(a)) for j, a in obj["entries"]), int(obj["value"]))

    def symbolic(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for j, a in reversed(self.entries):
            parts.append(f"G{j}" if a == 1 else f"{a}·G{j}")
        return "+".join(parts)


EMPTY = Decomposition((), 0)


def recompose(cache: SequenceCache, decomp: Decomposition) -> int:
    return sum(a * cache.term(j) for j, a in decomp.entries)


def summand_count(decomp: Decomposition) -> int:
    return sum(a for _, a in decomp.entries)


def gap_lengths(decomp: Decomposition) -> list[int]:
    """Unoccupied runs strictly between adjacent occupied indices."""
    idx = decomp.indices
    return [idx[i + 1] - idx[i] - 1 for i in range(len(idx) - 1)]


def decompose_greedy(cache: SequenceCache, N: int) -> Decomposition:
    """Repeatedly remove the largest term that fits; legal for monotone signatures."""
    if not cache.plrs.monotone:
        raise NonMonotonePlrs(
            f"greedy decomposition is not guaranteed legal for {list(cache.plrs.coeffs)}"
        )
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if N == 0:
        return EMPTY
    top = cache.find_top_index(N)
    g = cache.terms
    rem = N
    entries = []
    for j in range(top, 0, -1):
        if rem >= g[j - 1]:
            a, rem = divmod(rem, g[j - 1])
            entries.append((j, a))
            if not rem:
                break
    entries.reverse()
    return Decomposition(tuple(entries), N)


def decompose_general(cache: SequenceCache, N: int, index_budget: int | None = None) -> Decomposition:
    """Unique legal decomposition by exhaustive top-down search.

    Branches on every admissible digit at each index and prunes a branch when
    the remainder cannot be spelled below it (``cache.max_tail``).  All
    surviving leaves are collected, so a second solution is detected rather
    than silently ignored.
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if index_budget is None:
        index_budget = cache.find_top_index(N) if N else 0
    if N >= cache.term(index_budget + 1):
        raise BudgetTooSmall(f"N={N} needs more than {index_budget} indices")
    if N == 0:
        return EMPTY
    g = cache.terms
    trans = cache.plrs.transitions
    max_tail = cache.max_tail
    solutions: list[tuple[tuple[int, int], ...]] = []
    # stack frames: (index, state, remainder, entries so far, top-down)
    stack = [(index_budget, 0, N, ())]
    while stack:
        j, p, rem, ents = stack.pop()
        if j == 0:
            if rem == 0:
                solutions.append(ents)
                if len(solutions) > 1:
                    break
            continue
        gj = g[j - 1]
        for a, q in reversed(trans[p]):
            rest = rem - a * gj
            if rest < 0 or rest > max_tail(q, j - 1):
                continue
            stack.append((j - 1, q, rest, ents + ((j, a),) if a else ents))
    if not solutions:
        raise NoLegalDecomposition(f"no legal decomposition found for {N}")
    if len(solutions) > 1:
        raise MultipleLegalDecompositions(f"{N} has legal decompositions {solutions}")
    return Decomposition(tuple(reversed(solutions[0])), N)


def decompose(cache: SequenceCache, N: int) -> Decomposition:
    """Greedy when the signature is monotone, exhaustive search otherwise."""
    if cache.plrs.monotone:
        return decompose_greedy(cache, N)
    return decompose_general(cache, N)


def is_legal(plrs: Plrs, decomp: Decomposition | Sequence[int]) -> bool:
    """Legality of a decomposition, or of a top-first coefficient string.

    The empty string (the number 0) is legal by convention.
    """
    if isinstance(plrs, SequenceCache):
        plrs = plrs.plrs
    coeffs = decomp.to_top_down() if isinstance(decomp, Decomposition) else list(decomp)
    if not coeffs:
        return True
    if coeffs[0] <= 0:
        return False
    c = plrs.coeffs
    L = len(c)
    p = 0
    for a in coeffs:
        if a < 0:
            return False
        need = c[p]
        if a < need:
            p = 0
        elif a == need and p + 1 < L:
            p += 1
        else:
            return False
    return True


def enumerate_legal(cache: CacheLike, max_index: int) -> Iterator[Decomposition]:
    """Every nonzero legal decomposition with top index <= ``max_index``.

    Order is lexicographic in the top-first coefficient string, which is also
    increasing numeric order.
    """
    cache = as_cache(cache)
    g = cache.terms_upto(max(max_index, 1))
    trans = cache.plrs.transitions

    def walk(j, p, value, ents):
        if j == 0:
            if ents:
                yield Decomposition(tuple(reversed(ents)), value)
            return
        for a, q in trans[p]:
            if a:
                yield from walk(j - 1, q, value + a * g[j - 1], ents + ((j, a),))
            else:
                yield from walk(j - 1, q, value, ents)

    yield from walk(max_index, 0, 0, ())
