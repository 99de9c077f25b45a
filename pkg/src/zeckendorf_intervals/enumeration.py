"""Vectorized enumeration of legal digit strings.

The Python generator in :mod:`plrs_core` is fine up to ~10^6 strings. Beyond
that, the same automaton walk is split in two: the low ``leaf_depth`` indices
are tabulated once per automaton state as numpy arrays (built by the same
transition rules, in the same order), and only the high indices are walked in
Python.  Each yielded block covers one high prefix and carries, for every
string in it, its value, summand count, lowest and highest occupied index
(0 when empty), and largest internal gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded
from .plrs_core import CacheLike, as_cache

DEFAULT_MAX_STRINGS = 10**9
LEAF_SIZE = 1 << 18


@dataclass
class Block:
    value: np.ndarray
    count: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    maxgap: np.ndarray

    def __len__(self):
        return len(self.value)


def _leaf_tables(cache, depth: int) -> list[Block]:
    """``tables[p]`` enumerates strings on indices ``depth..1`` entered in state ``p``."""
    L = cache.plrs.L
    trans = cache.plrs.transitions
    one = lambda v: np.array([v], dtype=np.int64)  # noqa: E731
    cur = [Block(one(0), one(0), one(0), one(0), one(0)) for _ in range(L)]
    for j in range(1, depth + 1):
        gj = cache.term(j)
        nxt = []
        for p in range(L):
            parts = []
            for a, q in trans[p]:
                ch = cur[q]
                if a:
                    has = ch.hi > 0
                    parts.append(Block(
                        ch.value + a * gj,
                        ch.count + a,
                        np.where(has, ch.lo, j),
                        np.full_like(ch.hi, j),
                        np.maximum(ch.maxgap, np.where(has, j - ch.hi - 1, 0)),
                    ))
                else:
                    parts.append(ch)
            nxt.append(Block(*(np.concatenate([getattr(b, f) for b in parts])
                               for f in ("value", "count", "lo", "hi", "maxgap"))))
        cur = nxt
    return cur


def iter_blocks(cache: CacheLike, max_index: int,
                max_strings: int = DEFAULT_MAX_STRINGS) -> Iterator[Block]:
    """All legal strings on indices ``max_index..1`` (zero string included), in
    lexicographic top-first order, as consecutive numpy blocks."""
    cache = as_cache(cache)
    total = cache.term(max_index + 1)
    if total > max_strings:
        raise BudgetExceeded(f"{total} strings exceed the budget of {max_strings}")
    if total >= 2**62:
        raise BudgetExceeded("values would overflow int64")
    depth = 0
    while depth < max_index and cache.term(depth + 2) <= LEAF_SIZE:
        depth += 1
    leaves = _leaf_tables(cache, depth)
    trans = cache.plrs.transitions
    g = cache.terms

    def walk(j, p, value, count, lo, hi, maxgap):
        if j == depth:
            leaf = leaves[p]
            if hi == 0:
                yield Block(leaf.value + value, leaf.count + count, leaf.lo, leaf.hi, leaf.maxgap)
                return
            has = leaf.hi > 0
            yield Block(
                leaf.value + value,
                leaf.count + count,
                np.where(has, leaf.lo, lo),
                np.full_like(leaf.hi, hi),
                np.maximum(np.maximum(leaf.maxgap, maxgap), np.where(has, lo - leaf.hi - 1, 0)),
            )
            return
        for a, q in trans[p]:
            if a:
                gap = lo - j - 1 if hi else 0
                yield from walk(j - 1, q, value + a * g[j - 1], count + a,
                                j, hi or j, max(maxgap, gap))
            else:
                yield from walk(j - 1, q, value, count, lo, hi, maxgap)

    yield from walk(max_index, 0, 0, 0, 0, 0, 0)
