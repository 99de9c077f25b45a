"""Counting integers whose decomposition has no large gap.

``H_n`` is the number of ``m`` in ``[0, G_n)`` whose legal decomposition has
every gap between adjacent summands shorter than ``Z``.  Reading the top
block of a digit string case by case gives, for ``n >= L + Z``,

    H_{n+1} = sum_l c_l (H_{n-l+1} - H_{n-l+1-Z}) + H_{n-L+1-Z} + (sum_l c_l - 1)

The constant counts the strings whose top block is followed by nothing at
all: each nonzero top block leaves one empty completion, which has no gap.
If the run of zeros below the lowest summand is also counted as a gap (the
``trailing=True`` convention) those completions are excluded and the
constant disappears.  Either way the first differences ``H_{n+1} - H_n``
satisfy the homogeneous recurrence, whose characteristic polynomial

    x^{L+Z} - sum_l c_l x^{L+Z-l} + sum_l c_l x^{L-l} - 1

governs the growth of ``H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

import numpy as np

from .enumeration import DEFAULT_MAX_STRINGS, iter_blocks
from .errors import InvalidInput, NoConvergence, TableTooShort, ZNotGreaterThanL
from .plrs_core import CacheLike, Plrs, SequenceCache, as_cache, decompose, gap_lengths


def _check_z(plrs: Plrs, Z: int) -> None:
    if Z <= plrs.L:
        raise ZNotGreaterThanL(f"Z must exceed L={plrs.L}, got Z={Z}")


def no_large_gap(decomp, Z: int, trailing: bool = False) -> bool:
    """Predicate counted by ``H``; the slow per-integer version of the census test."""
    if not decomp.entries:
        return True
    if trailing and decomp.entries[0][0] - 1 >= Z:
        return False
    return all(g < Z for g in gap_lengths(decomp))


def h_bruteforce(cache: CacheLike, Z: int, n: int, trailing: bool = False,
                 budget: int = DEFAULT_MAX_STRINGS) -> int:
    """Count ``m`` in ``[0, G_n)`` with every gap ``< Z`` by enumerating all legal strings."""
    cache = as_cache(cache)
    _check_z(cache.plrs, Z)
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    total = 0
    for blk in iter_blocks(cache, n - 1, budget):
        ok = blk.maxgap < Z
        if trailing:
            ok &= (blk.hi == 0) | (blk.lo <= Z)
        total += int(np.count_nonzero(ok))
    return total


def h_by_decomposition(cache: CacheLike, Z: int, n: int, trailing: bool = False) -> int:
    """Same count, one integer at a time (small ``n`` only)."""
    cache = as_cache(cache)
    return sum(no_large_gap(decompose(cache, m), Z, trailing) for m in range(cache.term(n)))


@dataclass
class CensusRow:
    n: int
    H: int
    G: int
    tilde: int

    @property
    def ratio(self) -> float:
        return self.H / self.G


@dataclass
class CensusTable:
    plrs: Plrs
    Z: int
    rows: list[CensusRow]
    base_cases: int = 0
    trailing: bool = False

    def H(self, n: int) -> int:
        return self.rows[n - 1].H

    def to_csv(self) -> str:
        lines = ["n,H_n,G_n,ratio,tilde"]
        for r in self.rows:
            lines.append(f"{r.n},{r.H},{r.G},{_plain(r.ratio)},{r.tilde}")
        return "\n".join(lines) + "\n"


def _plain(x: float) -> str:
    return format(Decimal(repr(x)), "f")


def _recurrence_constant(plrs: Plrs, trailing: bool) -> int:
    return 0 if trailing else sum(plrs.coeffs) - 1


def h_recurrence(cache: CacheLike, Z: int, n_max: int, trailing: bool = False) -> CensusTable:
    """``H_1..H_{n_max}``: brute force for ``n <= L + Z + 1``, recurrence after."""
    cache = as_cache(cache)
    plrs = cache.plrs
    _check_z(plrs, Z)
    if min(plrs.coeffs) < 1:
        raise InvalidInput("the census recurrence needs every coefficient >= 1")
    c, L = plrs.coeffs, plrs.L
    base = L + Z + 1
    if n_max < base + 1:
        raise InvalidInput(f"n_max must be >= L + Z + 2 = {base + 1}, got {n_max}")
    const = _recurrence_constant(plrs, trailing)
    H = [0] + [h_bruteforce(cache, Z, k, trailing) for k in range(1, base + 1)]
    for n in range(base, n_max):
        nxt = sum(c[l - 1] * (H[n - l + 1] - H[n - l + 1 - Z]) for l in range(1, L + 1))
        H.append(nxt + H[n - L + 1 - Z] + const)
    rows = []
    for k in range(1, n_max + 1):
        rows.append(CensusRow(k, H[k], cache.term(k), H[k] - H[k - 1]))
    return CensusTable(plrs, Z, rows, base_cases=base, trailing=trailing)


def verify_recurrence(cache: CacheLike, Z: int, upto: int, trailing: bool = False) -> list[int]:
    """Indices ``n <= upto`` where the recurrence and brute force disagree."""
    cache = as_cache(cache)
    table = h_recurrence(cache, Z, max(upto, cache.plrs.L + Z + 2), trailing)
    return [n for n in range(1, upto + 1) if table.H(n) != h_bruteforce(cache, Z, n, trailing)]


def g_polynomial(plrs: Plrs) -> list[int]:
    """``x^L - c_1 x^{L-1} - ... - c_L``, highest degree first."""
    return [1] + [-c for c in plrs.coeffs]


def h_polynomial(plrs: Plrs, Z: int) -> list[int]:
    """Characteristic polynomial of the differenced census recurrence, highest degree first."""
    L = plrs.L
    d = L + Z
    poly = [0] * (d + 1)
    poly[0] = 1
    for l, c in enumerate(plrs.coeffs, start=1):
        poly[l] -= c            # x^{d-l}
        poly[d - (L - l)] += c  # x^{L-l}
    poly[d] -= 1
    return poly


def _horner(poly: Sequence[float], x: float) -> float:
    acc = 0.0
    for a in poly:
        acc = acc * x + a
    return acc


def bisect_root(poly: Sequence[int], lo: float, hi: float, tol: float = 1e-13,
                max_iter: int = 100_000) -> float:
    flo = _horner(poly, lo)
    if flo == 0:
        return lo
    if flo * _horner(poly, hi) > 0:
        raise InvalidInput(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        fm = _horner(poly, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise NoConvergence("bisection did not converge")


def dominant_root_g(plrs: Plrs) -> float:
    """Unique positive root of the recurrence polynomial, bracketed by ``[1, 1 + sum c]``."""
    return bisect_root(g_polynomial(plrs), 1.0, 1.0 + sum(plrs.coeffs))


def power_iteration_root(poly: Sequence[int], tol: float = 1e-12,
                         max_iter: int = 100_000) -> float:
    """Dominant eigenvalue of the companion matrix of a monic polynomial.

    Iterates the underlying recurrence on a normalized state vector and stops
    when the residual ``|C v - r v|`` drops below ``tol``.
    """
    if poly[0] != 1:
        raise InvalidInput("polynomial must be monic")
    d = len(poly) - 1
    comp = np.zeros((d, d))
    comp[0, :] = -np.asarray(poly[1:], dtype=float)
    comp[np.arange(1, d), np.arange(d - 1)] = 1.0
    # the all-ones vector is an eigenvector for the root 1 of the census polynomial
    v = 0.5 ** np.arange(d)
    v /= np.linalg.norm(v)
    r = 0.0
    for _ in range(max_iter):
        w = comp @ v
        r = float(w @ v)
        if np.linalg.norm(w - r * v) < tol:
            return r
        v = w / np.linalg.norm(w)
    raise NoConvergence(f"power iteration stalled after {max_iter} steps (estimate {r})")


@dataclass
class RootReport:
    lam: float
    omega_hat: float
    empirical_rate: float | None = None

    @property
    def gap(self) -> float:
        return self.lam - self.omega_hat

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "omega_hat": self.omega_hat,
            "empirical_rate": self.empirical_rate,
            "gap": self.gap,
        }


def char_poly_roots(plrs: Plrs | SequenceCache, Z: int, table: CensusTable | None = None) -> RootReport:
    if isinstance(plrs, SequenceCache):
        plrs = plrs.plrs
    _check_z(plrs, Z)
    rate = None
    if table is not None:
        rate = table.rows[-1].H / table.rows[-2].H
    return RootReport(dominant_root_g(plrs), power_iteration_root(h_polynomial(plrs, Z)), rate)


@dataclass
class DecaySummary:
    ratios: list[float]
    slope: float
    predicted: float
    fit_range: tuple[int, int]
    eventually_nonincreasing: bool
    passed: bool
    tolerance: float = 0.05
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "predicted": self.predicted,
            "fit_range": list(self.fit_range),
            "eventually_nonincreasing": self.eventually_nonincreasing,
            "status": "PASS" if self.passed else "FAIL",
        }


def decay_report(table: CensusTable, roots: RootReport, tolerance: float = 0.05) -> DecaySummary:
    """Least-squares slope of ``log(H_n / G_n)`` over the tail half of the table."""
    if len(table.rows) < table.base_cases + 10:
        raise TableTooShort(f"need >= 10 rows beyond the {table.base_cases} base cases")
    ratios = [r.ratio for r in table.rows]
    tail = table.rows[len(table.rows) // 2:]
    xs = np.array([r.n for r in tail], dtype=float)
    ys = np.array([math.log(r.H) - math.log(r.G) for r in tail])
    slope = float(np.polyfit(xs, ys, 1)[0])
    predicted = math.log(roots.omega_hat / roots.lam)
    tail_ratios = [r.ratio for r in tail]
    noninc = all(b <= a for a, b in zip(tail_ratios, tail_ratios[1:]))
    passed = slope < 0 and abs(slope - predicted) <= tolerance
    return DecaySummary(ratios, slope, predicted, (tail[0].n, tail[-1].n), noninc, passed, tolerance)
