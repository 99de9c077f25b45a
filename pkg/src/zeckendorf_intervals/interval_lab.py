"""Summand counts on subintervals ``[m, m + G_alpha)`` of ``[G_n, G_{n+1})``.

The high digits of ``x`` in such a window are frozen whenever the buffer
block between ``alpha`` and ``alpha + q`` of ``m`` holds a run of ``3L``
zeros.  The window is then matched to ``[0, G_alpha)`` by the map

    t(m + h) = m0 + h        if m0 + h <  G_alpha
             = m0 + h - G_alpha  otherwise

where ``m0`` is the part of ``m`` below index ``alpha``, and the summand
count of ``x`` differs from ``s3(m) + s(t(x))`` by less than ``K q``.
This module makes every piece of that argument checkable by brute force.
"""

from __future__ import annotations

import math
import random
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    HOutOfRange,
    IndexOutOfRange,
    Infeasible,
    InvalidInput,
    RunExceedsWindow,
    TooSmall,
    WindowTooSmall,
)
from .plrs_core import CacheLike, Decomposition, SequenceCache, as_cache, decompose, summand_count

EXHAUSTIVE_BUDGET = 10**7


@dataclass(frozen=True)
class IntervalParams:
    n: int
    alpha: int
    q: int

    def __post_init__(self):
        if self.alpha < 1:
            raise InvalidInput(f"alpha must be >= 1, got {self.alpha}")
        if self.q < 2 or self.q % 2:
            raise InvalidInput(f"q must be an even integer >= 2, got {self.q}")
        if self.alpha + self.q >= self.n:
            raise InvalidInput(f"need alpha + q < n, got {self.alpha} + {self.q} >= {self.n}")

    @classmethod
    def with_defaults(cls, n: int, alpha: int | None = None, q: int | None = None) -> "IntervalParams":
        alpha = default_alpha(n) if alpha is None else alpha
        q = default_q(n, alpha) if q is None else q
        return cls(n, alpha, q)


def default_alpha(n: int) -> int:
    if n < 4:
        raise TooSmall(f"n must be >= 4, got {n}")
    return n // 2


def default_q(n: int, alpha: int) -> int:
    """``2 * floor((alpha**(1/3) + 2) / 2)``, lowered to the largest even value below ``n - alpha``."""
    if alpha >= n:
        raise InvalidInput(f"alpha must be below n, got alpha={alpha}, n={n}")
    # floor(alpha^(1/3) / 2) exactly: largest k with 8 k^3 <= alpha
    k = 0
    while 8 * (k + 1) ** 3 <= alpha:
        k += 1
    q = 2 * (k + 1)
    cap = n - alpha - 1
    if q > cap:
        q = cap - cap % 2
    if q < 2:
        raise Infeasible(f"no even q with 2 <= q < n - alpha = {n - alpha}")
    return q


@dataclass(frozen=True)
class BlockSplit:
    """Dense ascending coefficient slices for ``[1, alpha]``, ``[alpha+1, alpha+q]``, ``[alpha+q+1, n]``."""

    c1: tuple[int, ...]
    c2: tuple[int, ...]
    c3: tuple[int, ...]

    @property
    def s1(self) -> int:
        return sum(self.c1)

    @property
    def s2(self) -> int:
        return sum(self.c2)

    @property
    def s3(self) -> int:
        return sum(self.c3)


def block_split(decomp: Decomposition, params: IntervalParams) -> BlockSplit:
    if decomp.top_index > params.n:
        raise IndexOutOfRange(f"top index {decomp.top_index} exceeds n={params.n}")
    a, q, n = params.alpha, params.q, params.n
    return BlockSplit(decomp.dense(1, a), decomp.dense(a + 1, a + q), decomp.dense(a + q + 1, n))


def longest_zero_run(coeffs: Sequence[int]) -> int:
    best = run = 0
    for a in coeffs:
        run = 0 if a else run + 1
        best = max(best, run)
    return best


def has_zero_run(split: BlockSplit, run_length: int) -> bool:
    if run_length < 1:
        raise InvalidInput(f"run_length must be >= 1, got {run_length}")
    if run_length > len(split.c2):
        raise RunExceedsWindow(f"run of {run_length} cannot fit a window of {len(split.c2)}")
    return longest_zero_run(split.c2) >= run_length


def truncate_m0(cache: SequenceCache, decomp: Decomposition, alpha: int) -> int:
    return sum(a * cache.term(j) for j, a in decomp.entries if j <= alpha - 1)


def t_map(m: int, h: int, cache: SequenceCache, alpha: int, m0: int | None = None) -> int:
    """Image of ``m + h`` in ``[0, G_alpha)``.  Pass ``m0`` to skip re-decomposing ``m``."""
    g_alpha = cache.term(alpha)
    if not 0 <= h < g_alpha:
        raise HOutOfRange(f"h={h} outside [0, {g_alpha})")
    if m0 is None:
        m0 = truncate_m0(cache, decompose(cache, m), alpha)
    v = m0 + h
    return v if v < g_alpha else v - g_alpha


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function (accurate to ~1e-15)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def ks_to_normal(histogram: dict[int, int], mean: float, stddev: float) -> float:
    """Exact sup distance between the standardized step CDF and the normal CDF.

    The supremum is attained at a jump, on one side or the other, so both the
    left limit and the value at every support point are compared.
    """
    total = sum(histogram.values())
    cum = 0
    d = 0.0
    for k in sorted(histogram):
        phi = normal_cdf((k - mean) / stddev)
        d = max(d, abs(cum / total - phi))
        cum += histogram[k]
        d = max(d, abs(cum / total - phi))
    return d


@dataclass
class DistributionSummary:
    histogram: dict[int, int]
    total: int
    mean: float
    variance: float
    stddev: float
    ks_to_normal: float
    degenerate: bool = False

    @classmethod
    def from_histogram(cls, histogram: dict[int, int]) -> "DistributionSummary":
        hist = {int(k): int(v) for k, v in sorted(histogram.items()) if v}
        total = sum(hist.values())
        if total <= 0:
            raise InvalidInput("empty histogram")
        s1 = sum(k * v for k, v in hist.items())
        s2 = sum(k * k * v for k, v in hist.items())
        mean = Fraction(s1, total)
        var = Fraction(total * s2 - s1 * s1, total * total)
        sd = math.sqrt(var)
        if var == 0:
            return cls(hist, total, float(mean), 0.0, 0.0, 1.0, degenerate=True)
        return cls(hist, total, float(mean), float(var), sd, ks_to_normal(hist, float(mean), sd))

    def merged(self, other: "DistributionSummary") -> "DistributionSummary":
        h = dict(self.histogram)
        for k, v in other.histogram.items():
            h[k] = h.get(k, 0) + v
        return DistributionSummary.from_histogram(h)

    def to_json(self) -> dict:
        return {
            "histogram": {str(k): str(v) for k, v in self.histogram.items()},
            "total": str(self.total),
            "mean": self.mean,
            "variance": self.variance,
            "stddev": self.stddev,
            "ks": self.ks_to_normal,
            "degenerate": self.degenerate,
        }

    def to_csv(self) -> str:
        return "count,freq\n" + "".join(f"{k},{v}\n" for k, v in self.histogram.items())

    def mode_clusters(self) -> list[list[int]]:
        """Support split into maximal runs of consecutive summand counts."""
        clusters: list[list[int]] = []
        for k in self.histogram:
            if clusters and k == clusters[-1][-1] + 1:
                clusters[-1].append(k)
            else:
                clusters.append([k])
        return clusters

    @property
    def bimodal(self) -> bool:
        """Mass on both sides of at least one empty summand-count band."""
        return len(self.mode_clusters()) >= 2


def _tally(values: Iterable[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for v in values:
        out[v] = out.get(v, 0) + 1
    return out


def _merge_counts(parts: Iterable[dict[int, int]]) -> dict[int, int]:
    out: dict[int, int] = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return out


def sample_rng(seed: int, stream: int) -> random.Random:
    """Independent stream per (seed, sample index); string seeds hash through SHA-512."""
    return random.Random(f"{seed}:{stream}")


def uniform_below(rng: random.Random, bound: int) -> int:
    """Uniform integer in ``[0, bound)``; ``randrange`` uses bit-string rejection internally."""
    return rng.randrange(bound)


def _parallel_map(fn: Callable, chunks: list, threads: int) -> list:
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    step = -(-n // parts)
    return [range(i, min(i + step, n)) for i in range(0, n, step)]


def histogram_over_interval(
    cache: CacheLike,
    lo: int,
    length: int,
    mode: str = "auto",
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    budget: int = EXHAUSTIVE_BUDGET,
) -> DistributionSummary:
    """Summand-count distribution over ``[lo, lo + length)``.

    ``mode`` is ``"exhaustive"``, ``"sample"`` (``samples`` uniform draws) or
    ``"auto"`` (exhaustive when ``length <= budget``).
    """
    cache = as_cache(cache)
    if lo < 0 or length < 1:
        raise InvalidInput(f"need lo >= 0 and length >= 1, got lo={lo}, length={length}")
    if mode == "auto":
        mode = "exhaustive" if length <= budget else "sample"
    if mode == "exhaustive":
        if length > budget:
            raise BudgetExceeded(f"interval of {length} integers exceeds budget {budget}")
        work = lambda r: _tally(summand_count(decompose(cache, lo + i)) for i in r)  # noqa: E731
        parts = _parallel_map(work, _chunks(length, threads), threads)
    elif mode == "sample":
        def work(r):
            return _tally(
                summand_count(decompose(cache, lo + uniform_below(sample_rng(seed, i), length)))
                for i in r
            )
        parts = _parallel_map(work, _chunks(samples, threads), threads)
    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    return DistributionSummary.from_histogram(_merge_counts(parts))


def exact_count_histogram(cache: CacheLike, k: int) -> dict[int, int]:
    """Exact summand-count histogram over ``[0, G_k)``.

    Dynamic program over the legality automaton: for each state, a
    polynomial in the summand count, advanced one index at a time from
    ``k - 1`` down to 1.
    """
    cache = as_cache(cache)
    if k < 1:
        raise InvalidInput(f"k must be >= 1, got {k}")
    plrs = cache.plrs
    size = plrs.K * (k - 1) + 1
    polys = [np.zeros(size, dtype=object) for _ in range(plrs.L)]
    polys[0][0] = 1
    for _ in range(k - 1):
        nxt = [np.zeros(size, dtype=object) for _ in range(plrs.L)]
        for p, opts in enumerate(plrs.transitions):
            src = polys[p]
            for a, q in opts:
                if a:
                    nxt[q][a:] += src[: size - a]
                else:
                    nxt[q] += src
        polys = nxt
    total = sum(polys)
    return {s: int(v) for s, v in enumerate(total) if v}


def exact_count_distribution(cache: CacheLike, k: int) -> DistributionSummary:
    return DistributionSummary.from_histogram(exact_count_histogram(cache, k))


def exact_top_interval_distribution(cache: CacheLike, n: int) -> DistributionSummary:
    """Exact distribution over ``[G_n, G_{n+1})``."""
    upper = exact_count_histogram(cache, n + 1)
    lower = exact_count_histogram(cache, n)
    return DistributionSummary.from_histogram(
        {s: v - lower.get(s, 0) for s, v in upper.items()}
    )


@dataclass
class SubintervalReport:
    m: int
    params: IntervalParams
    zero_run_found: bool
    c3_constant: bool
    shift_error_max: int
    bijection_verified: bool
    distribution: DistributionSummary | None
    shift_error_min: int = 0
    prefix_agreement: bool = False
    prefix_mismatches: int = 0
    points: int = 0
    mode: str = "exhaustive"
    window_too_small: bool = False
    within_hypothesis: bool = True
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.zero_run_found

    def to_json(self) -> dict:
        d = {
            "m": str(self.m),
            "params": asdict(self.params),
            "zero_run_found": self.zero_run_found,
            "c3_constant": self.c3_constant,
            "shift_error_min": self.shift_error_min,
            "shift_error_max": self.shift_error_max,
            "bijection_verified": self.bijection_verified,
            "prefix_agreement": self.prefix_agreement,
            "prefix_mismatches": self.prefix_mismatches,
            "points": self.points,
            "mode": self.mode,
            "window_too_small": self.window_too_small,
            "within_hypothesis": self.within_hypothesis,
            "flags": list(self.flags),
        }
        d["distribution"] = self.distribution.to_json() if self.distribution else None
        return d


def subinterval_experiment(
    cache: CacheLike,
    m: int,
    params: IntervalParams,
    mode: str = "auto",
    samples: int = 20_000,
    seed: int = 0,
    budget: int = EXHAUSTIVE_BUDGET,
) -> SubintervalReport:
    """Check the frozen-high-digits argument on ``[m, m + G_alpha)``.

    The walk is exhaustive when ``G_alpha <= budget`` (or ``mode`` forces it),
    otherwise ``samples`` offsets are drawn uniformly.  In sample mode the
    bijection check can only detect collisions, not coverage.
    """
    cache = as_cache(cache)
    plrs = cache.plrs
    n, alpha, q = params.n, params.alpha, params.q
    if not cache.term(n) <= m < cache.term(n + 1):
        raise InvalidInput(f"m must lie in [G_{n}, G_{n + 1})")
    flags = []
    within = plrs.monotone
    if not within:
        flags.append("outside theorem hypothesis: coefficients not non-increasing")
    run = 3 * plrs.L
    dm = decompose(cache, m)
    split_m = block_split(dm, params)
    if run > q:
        flags.append(f"WindowTooSmall: q={q} < 3L={run}")
        return SubintervalReport(m, params, False, False, 0, False, None,
                                 window_too_small=True, within_hypothesis=within, flags=flags)
    if not has_zero_run(split_m, run):
        flags.append("no zero run in buffer block; checks skipped")
        return SubintervalReport(m, params, False, False, 0, False, None,
                                 within_hypothesis=within, flags=flags)

    g_alpha = cache.term(alpha)
    if mode == "auto":
        mode = "exhaustive" if g_alpha <= budget else "sample"
    if mode == "exhaustive":
        if g_alpha > budget:
            raise BudgetExceeded(f"G_alpha={g_alpha} exceeds budget {budget}")
        offsets: Iterable[int] = range(g_alpha)
    elif mode == "sample":
        rng = sample_rng(seed, m)
        offsets = [uniform_below(rng, g_alpha) for _ in range(samples)]
    else:
        raise InvalidInput(f"unknown mode {mode!r}")

    hi_cut = alpha + q
    c3_m = tuple((j, a) for j, a in dm.entries if j > hi_cut)
    s3_m = sum(a for _, a in c3_m)
    m0 = truncate_m0(cache, dm, alpha)

    seen = bytearray(g_alpha) if mode == "exhaustive" else None
    seen_set: set[int] = set()
    hist: dict[int, int] = {}
    c3_ok = True
    injective = True
    emin, emax = None, None
    mismatches = 0
    points = 0
    for h in offsets:
        x = m + h
        dx = decompose(cache, x)
        tx = m0 + h
        if tx >= g_alpha:
            tx -= g_alpha
        dt = decompose(cache, tx)
        sx = summand_count(dx)
        hist[sx] = hist.get(sx, 0) + 1
        points += 1
        ents = dx.entries
        hi_part = tuple(e for e in ents if e[0] > hi_cut)
        if hi_part != c3_m:
            c3_ok = False
        err = sx - s3_m - summand_count(dt)
        emin = err if emin is None or err < emin else emin
        emax = err if emax is None or err > emax else emax
        lo_x = tuple(e for e in ents if e[0] < alpha)
        lo_t = tuple(e for e in dt.entries if e[0] < alpha)
        if lo_x != lo_t:
            mismatches += 1
        if seen is not None:
            if seen[tx]:
                injective = False
            seen[tx] = 1
        else:
            seen_set.add(h)
    if seen is not None:
        bijective = injective and all(seen)
    else:
        # distinct offsets give distinct images exactly when the map is injective on them
        images = {(m0 + h) % g_alpha for h in seen_set}
        bijective = len(images) == len(seen_set)
    return SubintervalReport(
        m, params, True, c3_ok, emax, bijective,
        DistributionSummary.from_histogram(hist),
        shift_error_min=emin,
        prefix_agreement=mismatches == 0,
        prefix_mismatches=mismatches,
        points=points,
        mode=mode,
        within_hypothesis=within,
        flags=flags,
    )


def sample_m(cache: SequenceCache, n: int, seed: int, index: int) -> int:
    g_n = cache.term(n)
    return g_n + uniform_below(sample_rng(seed, index), cache.term(n + 1) - g_n)


def gap_probability_estimate(
    cache: CacheLike, params: IntervalParams, samples: int, seed: int = 0, threads: int = 1
) -> float:
    """Fraction of uniform ``m`` in ``[G_n, G_{n+1})`` with a ``3L`` zero run in the buffer block."""
    cache = as_cache(cache)
    if samples < 1:
        raise InvalidInput(f"samples must be >= 1, got {samples}")
    run = 3 * cache.plrs.L
    if params.q < run:
        warnings.warn(WindowTooSmall(f"q={params.q} < 3L={run}; the event is impossible"))
        return 0.0
    cache.term(params.n + 1)

    def work(r):
        hits = 0
        for i in r:
            m = sample_m(cache, params.n, seed, i)
            if has_zero_run(block_split(decompose(cache, m), params), run):
                hits += 1
        return hits

    hits = sum(_parallel_map(work, _chunks(samples, threads), threads))
    return hits / samples


@dataclass
class BatchResult:
    reports: list[SubintervalReport]
    samples: int
    passed: int
    pass_fraction: float
    median_ks: float | None
    shift_bound_ok: bool
    warnings: list[str]

    def aggregate_json(self) -> dict:
        return {
            "samples": self.samples,
            "passed": self.passed,
            "pass_fraction": self.pass_fraction,
            "median_ks": self.median_ks,
            "shift_bound_ok": self.shift_bound_ok,
            "warnings": list(self.warnings),
        }


def run_subinterval_batch(
    cache: CacheLike,
    params: IntervalParams,
    samples: int,
    seed: int = 0,
    threads: int = 1,
    mode: str = "auto",
    walk_samples: int = 20_000,
    budget: int = EXHAUSTIVE_BUDGET,
) -> BatchResult:
    """Run :func:`subinterval_experiment` on ``samples`` seeded draws of ``m``."""
    cache = as_cache(cache)
    cache.term(params.n + 1)
    ms = [sample_m(cache, params.n, seed, i) for i in range(samples)]

    def work(r):
        return [subinterval_experiment(cache, ms[i], params, mode, walk_samples, seed, budget)
                for i in r]

    reports = [rep for part in _parallel_map(work, _chunks(samples, threads), threads) for rep in part]
    passing = [r for r in reports if r.passed]
    kq = cache.plrs.K * params.q
    warn = []
    if params.q < 3 * cache.plrs.L:
        warn.append(f"WindowTooSmall: q={params.q} < 3L={3 * cache.plrs.L}")
    ks = sorted(r.distribution.ks_to_normal for r in passing)
    median = None
    if ks:
        mid = len(ks) // 2
        median = ks[mid] if len(ks) % 2 else (ks[mid - 1] + ks[mid]) / 2
    return BatchResult(
        reports,
        samples,
        len(passing),
        len(passing) / samples,
        median,
        all(0 <= r.shift_error_min and r.shift_error_max < kq for r in passing),
        warn,
    )


def counterexample_interval(cache: CacheLike, n: int) -> tuple[int, int]:
    """``[G_{2n} + G_n + G_{n-2} + ... + G_r, G_{2n} + G_{n+1} + G_r)`` with ``r = floor(n^(1/4))``.

    The descending sum steps by two and stops at the last index ``>= r``.
    """
    cache = as_cache(cache)
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    r = math.isqrt(math.isqrt(n))
    r = max(r, 1)
    lo = cache.term(2 * n) + sum(cache.term(j) for j in range(n, r - 1, -2))
    hi = cache.term(2 * n) + cache.term(n + 1) + cache.term(r)
    return lo, hi


def counterexample_distribution(cache: CacheLike, n: int) -> DistributionSummary:
    lo, hi = counterexample_interval(cache, n)
    return histogram_over_interval(cache, lo, hi - lo, mode="exhaustive")
