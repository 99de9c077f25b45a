import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeckendorf_intervals.errors import InvalidInput, TableTooShort, ZNotGreaterThanL
from zeckendorf_intervals.gap_census import (
    CensusRow,
    CensusTable,
    RootReport,
    bisect_root,
    char_poly_roots,
    decay_report,
    dominant_root_g,
    g_polynomial,
    h_bruteforce,
    h_by_decomposition,
    h_polynomial,
    h_recurrence,
    no_large_gap,
    power_iteration_root,
    verify_recurrence,
)
from zeckendorf_intervals.plrs_core import Plrs, SequenceCache, decompose

PHI = (1 + 5 ** 0.5) / 2
CENSUS_SIGNATURES = [(1, 1), (2, 3, 1), (3, 2, 1), (1, 1, 1), (2, 2, 1)]


@pytest.mark.parametrize("n, H", [(4, 5), (5, 8), (6, 12)])
def test_hand_examples(fib, n, H):
    assert h_bruteforce(fib, 3, n) == H
    assert h_by_decomposition(fib, 3, n) == H


def test_hand_example_members(fib):
    assert not no_large_gap(decompose(fib, 9), 3)
    assert no_large_gap(decompose(fib, 6), 3)
    assert no_large_gap(decompose(fib, 12), 3)
    assert no_large_gap(decompose(fib, 0), 3)
    # G_5 alone has a trailing run of four zeros
    assert no_large_gap(decompose(fib, 8), 3)
    assert not no_large_gap(decompose(fib, 8), 3, trailing=True)


@pytest.mark.parametrize("coeffs, Z, n", [((1, 1), 3, 12), ((2, 3, 1), 4, 8), ((3, 2, 1), 5, 7),
                                          ((1, 1, 1), 4, 11)])
@pytest.mark.parametrize("trailing", [False, True])
def test_vectorized_count_matches_per_integer(coeffs, Z, n, trailing):
    cache = SequenceCache(coeffs)
    assert h_bruteforce(cache, Z, n, trailing) == h_by_decomposition(cache, Z, n, trailing)


def test_z_must_exceed_l(fib):
    with pytest.raises(ZNotGreaterThanL):
        h_bruteforce(fib, 2, 5)
    with pytest.raises(ZNotGreaterThanL):
        h_recurrence(fib, 2, 30)
    with pytest.raises(ZNotGreaterThanL):
        char_poly_roots(Plrs((1, 1)), 1)


def test_n_max_too_small(fib):
    with pytest.raises(InvalidInput):
        h_recurrence(fib, 3, 5)


@pytest.mark.parametrize("Z", [3, 4, 5])
@pytest.mark.parametrize("trailing", [False, True])
def test_recurrence_fibonacci(fib, Z, trailing):
    assert verify_recurrence(fib, Z, 20, trailing) == []


@pytest.mark.parametrize("coeffs", [(2, 3, 1), (3, 2, 1), (1, 1, 1)])
@pytest.mark.parametrize("Z", [4, 5])
@pytest.mark.parametrize("trailing", [False, True])
def test_recurrence_three_term(coeffs, Z, trailing):
    cache = SequenceCache(coeffs)
    upto = 14 if max(coeffs) > 1 else 16
    assert verify_recurrence(cache, Z, upto, trailing) == []


def test_recurrence_single_term():
    cache = SequenceCache([2])
    assert verify_recurrence(cache, 2, 14) == []
    assert verify_recurrence(cache, 3, 14, trailing=True) == []


def test_fibonacci_specialization(fib):
    """With L=2, Z=3 the trailing-gap table obeys H_{n+1} = H_n + H_{n-1} - H_{n-3} exactly;
    the adjacent-gap table adds the empty-completion constant 1."""
    t = h_recurrence(fib, 3, 40, trailing=True)
    a = h_recurrence(fib, 3, 40)
    for n in range(5, 40):
        assert t.H(n + 1) == t.H(n) + t.H(n - 1) - t.H(n - 3)
        assert a.H(n + 1) == a.H(n) + a.H(n - 1) - a.H(n - 3) + 1


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES)
@pytest.mark.parametrize("trailing", [False, True])
def test_differences_satisfy_homogeneous_recurrence(coeffs, trailing):
    cache = SequenceCache(coeffs)
    L = len(coeffs)
    Z = L + 2
    table = h_recurrence(cache, Z, 60, trailing)
    poly = h_polynomial(cache.plrs, Z)
    d = len(poly) - 1
    tilde = [r.tilde for r in table.rows]
    for i in range(d + L + 2, len(tilde)):
        # highest degree first: sum poly[j] * tilde[i - j] == 0
        assert sum(poly[j] * tilde[i - j] for j in range(d + 1)) == 0


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES)
def test_table_invariants(coeffs):
    cache = SequenceCache(coeffs)
    for Z in range(len(coeffs) + 1, len(coeffs) + 4):
        table = h_recurrence(cache, Z, 80)
        prev = 0
        for r in table.rows:
            assert r.n <= r.H <= r.G
            assert r.tilde == r.H - prev and r.tilde >= 0
            assert 0 < r.ratio <= 1
            prev = r.H
        tail = [r.tilde for r in table.rows[table.base_cases:]]
        assert all(b > a for a, b in zip(tail, tail[1:]))


def test_fibonacci_lambda():
    assert abs(dominant_root_g(Plrs((1, 1))) - PHI) < 1e-9
    assert abs(dominant_root_g(Plrs((1, 1))) - 1.6180339887) < 1e-9


def test_linear_lambda():
    assert abs(dominant_root_g(Plrs((2,))) - 2.0) < 1e-10


def test_231_lambda():
    lam = dominant_root_g(Plrs((2, 3, 1)))
    assert 3 < lam < 3.2
    assert abs(lam ** 3 - 2 * lam ** 2 - 3 * lam - 1) < 1e-8 * lam ** 3


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES + [(2,), (4, 0, 1), (1, 0, 2)])
def test_lambda_against_numpy(coeffs):
    plrs = Plrs(coeffs)
    roots = np.roots(g_polynomial(plrs))
    ref = max(r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 0)
    assert abs(dominant_root_g(plrs) - ref) < 1e-9


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES)
def test_omega_hat_against_numpy(coeffs):
    plrs = Plrs(coeffs)
    for Z in range(plrs.L + 1, plrs.L + 6):
        poly = h_polynomial(plrs, Z)
        ref = max(abs(r) for r in np.roots(poly))
        omega = power_iteration_root(poly)
        assert abs(omega - ref) < 1e-8
        assert abs(np.polyval(poly, 1.0)) == 0  # 1 is always a root


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES)
def test_root_separation(coeffs):
    plrs = Plrs(coeffs)
    for Z in range(plrs.L + 1, plrs.L + 6):
        rep = char_poly_roots(plrs, Z)
        assert rep.lam > 1 and rep.omega_hat > 1
        assert rep.gap > 1e-6


@pytest.mark.parametrize("coeffs", CENSUS_SIGNATURES)
@pytest.mark.parametrize("trailing", [False, True])
def test_empirical_rate(coeffs, trailing):
    cache = SequenceCache(coeffs)
    Z = len(coeffs) + 1
    table = h_recurrence(cache, Z, 200, trailing)
    rep = char_poly_roots(cache, Z, table)
    assert abs(rep.empirical_rate - rep.omega_hat) <= 0.01


def test_bisect_requires_sign_change():
    with pytest.raises(InvalidInput):
        bisect_root([1, 0, 1], 0.0, 2.0)


def test_power_iteration_requires_monic():
    with pytest.raises(InvalidInput):
        power_iteration_root([2, -1])


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4).filter(lambda c: c[0] > 0 and c[-1] > 0 and c != [1]))
@settings(max_examples=60)
def test_lambda_root_property(coeffs):
    plrs = Plrs(tuple(coeffs))
    lam = dominant_root_g(plrs)
    assert lam > 1
    p = np.polyval(g_polynomial(plrs), lam)
    assert abs(p) < 1e-8 * lam ** plrs.L


def test_decay_fibonacci(fib):
    table = h_recurrence(fib, 3, 60)
    rep = char_poly_roots(fib, 3, table)
    decay = decay_report(table, rep)
    assert decay.slope < 0
    assert abs(decay.slope - math.log(rep.omega_hat / rep.lam)) <= 0.05
    assert decay.passed and decay.to_json()["status"] == "PASS"
    assert decay.eventually_nonincreasing


def test_decay_degenerate_fixture(fib):
    rows = [CensusRow(n, fib.term(n), fib.term(n), 0) for n in range(1, 30)]
    table = CensusTable(fib.plrs, 3, rows, base_cases=6)
    decay = decay_report(table, char_poly_roots(fib, 3))
    assert abs(decay.slope) < 1e-12
    assert not decay.passed and decay.to_json()["status"] == "FAIL"


def test_decay_table_too_short(fib):
    table = h_recurrence(fib, 3, 12)
    with pytest.raises(TableTooShort):
        decay_report(table, char_poly_roots(fib, 3))


def test_census_csv(fib):
    table = h_recurrence(fib, 3, 80)
    text = table.to_csv()
    lines = text.splitlines()
    assert lines[0] == "n,H_n,G_n,ratio,tilde"
    assert lines[4].startswith("4,5,5,1")
    assert "e" not in text.lower().replace("n,h_n,g_n,ratio,tilde", "")
    last = lines[-1].split(",")
    assert int(last[1]) == table.H(80) and int(last[2]) == fib.term(80)


def test_root_report_json():
    rep = RootReport(1.5, 1.2, 1.2000001)
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["lambda"] == 1.5 and obj["omega_hat"] == 1.2
    assert abs(obj["gap"] - 0.3) < 1e-12


def test_census_requires_positive_coefficients():
    with pytest.raises(InvalidInput):
        h_recurrence(SequenceCache([2, 0, 1]), 4, 20)
