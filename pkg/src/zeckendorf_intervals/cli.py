"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict

from . import __version__
from .errors import BudgetExceeded, InvalidInput, InvariantViolation
from .gap_census import char_poly_roots, decay_report, h_recurrence, verify_recurrence
from .interval_lab import (
    EXHAUSTIVE_BUDGET,
    IntervalParams,
    counterexample_interval,
    exact_count_distribution,
    exact_top_interval_distribution,
    histogram_over_interval,
)
from .interval_lab import run_subinterval_batch
from .plrs_core import SequenceCache, decompose_general, decompose_greedy, gap_lengths, is_legal, summand_count
from .plrs_core import validate_plrs

TOOL = "zeckendorf-lab"
GENERAL_SEARCH_WARN = 500


def _coeffs(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _config(args) -> dict:
    skip = {"func", "out", "roots_out", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _meta(args) -> dict:
    return {"tool": TOOL, "version": __version__, "config": _config(args)}


def _csv_header(args) -> str:
    return f"# {TOOL} {__version__} config={json.dumps(_config(args), sort_keys=True)}\n"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_seq(args) -> None:
    cache = SequenceCache(validate_plrs(args.coeffs))
    rows = [(k, cache.term(k)) for k in range(1, args.n + 1)]
    with _output(args.out) as out:
        if args.format == "json":
            out.write(_dump({**_meta(args), "terms": [[k, str(g)] for k, g in rows]}))
        else:
            out.write(_csv_header(args) + "n,G_n\n" + "".join(f"{k},{g}\n" for k, g in rows))


def cmd_decompose(args) -> None:
    plrs = validate_plrs(args.coeffs)
    cache = SequenceCache(plrs)
    N = int(args.N)
    if N < 0:
        raise InvalidInput(f"N must be non-negative, got {N}")
    top = cache.find_top_index(N) if N else 0
    if top > args.max_index:
        raise BudgetExceeded(f"N needs index {top}, above --max-index {args.max_index}")
    if plrs.monotone:
        d, method = decompose_greedy(cache, N), "greedy"
    else:
        if top > GENERAL_SEARCH_WARN:
            print(f"warning: general search over {top} indices", file=sys.stderr)
        d, method = decompose_general(cache, N), "general"
    legal = is_legal(plrs, d)
    if not legal:
        raise InvariantViolation(f"{method} decomposition of {N} is not legal")
    gaps = gap_lengths(d)
    values = "+".join(str(a * cache.term(j)) if a == 1 else f"{a}·{cache.term(j)}"
                      for j, a in reversed(d.entries)) or "0"
    with _output(args.out) as out:
        if args.format == "json":
            out.write(_dump({**_meta(args), "decomposition": d.to_json(), "summands": summand_count(d),
                             "gaps": gaps, "legal": legal, "method": method}))
        else:
            out.write(
                f"N = {N}\n"
                f"decomposition: {d.symbolic()}\n"
                f"values: {values}\n"
                f"summands: s={summand_count(d)}\n"
                f"gaps: ({','.join(map(str, gaps))})\n"
                f"legal: {str(legal).lower()} ({method})\n"
            )


def cmd_dist(args) -> None:
    cache = SequenceCache(validate_plrs(args.coeffs))
    extra: dict = {}
    if args.upto_index is not None:
        dist = exact_count_distribution(cache, args.upto_index)
        extra["interval"] = ["0", str(cache.term(args.upto_index))]
    elif args.top_interval is not None:
        dist = exact_top_interval_distribution(cache, args.top_interval)
        extra["interval"] = [str(cache.term(args.top_interval)), str(cache.term(args.top_interval + 1))]
    elif args.counterexample_n is not None:
        lo, hi = counterexample_interval(cache, args.counterexample_n)
        dist = histogram_over_interval(cache, lo, hi - lo, mode="exhaustive", budget=args.budget)
        extra["interval"] = [str(lo), str(hi)]
    else:
        if args.lo is None or args.len is None:
            raise InvalidInput("dist needs --upto-index, --top-interval, --counterexample-n or --lo/--len")
        dist = histogram_over_interval(cache, int(args.lo), int(args.len), mode=args.mode,
                                       samples=args.samples, seed=args.seed,
                                       threads=args.threads, budget=args.budget)
        extra["interval"] = [str(args.lo), str(int(args.lo) + int(args.len))]
    extra["bimodal"] = dist.bimodal
    extra["clusters"] = [[c[0], c[-1]] for c in dist.mode_clusters()]
    with _output(args.out) as out:
        if args.format == "json":
            out.write(_dump({**_meta(args), **dist.to_json(), **extra}))
        else:
            out.write(_csv_header(args) + dist.to_csv())


def cmd_subinterval(args) -> None:
    cache = SequenceCache(validate_plrs(args.coeffs))
    params = IntervalParams.with_defaults(args.n, args.alpha, args.q)
    batch = run_subinterval_batch(cache, params, args.samples, args.seed, args.threads,
                                  args.mode, args.walk_samples, args.budget)
    for w in batch.warnings:
        print(f"warning: {w}", file=sys.stderr)
    with _output(args.out) as out:
        if args.format == "json":
            out.write(_dump({**_meta(args), "params": asdict(params),
                             "reports": [r.to_json() for r in batch.reports],
                             "aggregate": batch.aggregate_json()}))
        else:
            out.write(_csv_header(args))
            out.write("m,zero_run_found,c3_constant,shift_error_min,shift_error_max,"
                      "bijection_verified,prefix_mismatches,points,mean,stddev,ks\n")
            for r in batch.reports:
                d = r.distribution
                stats = f"{d.mean!r},{d.stddev!r},{d.ks_to_normal!r}" if d else ",,"
                out.write(f"{r.m},{int(r.zero_run_found)},{int(r.c3_constant)},{r.shift_error_min},"
                          f"{r.shift_error_max},{int(r.bijection_verified)},{r.prefix_mismatches},"
                          f"{r.points},{stats}\n")
            agg = batch.aggregate_json()
            out.write(f"# aggregate {json.dumps(agg, sort_keys=True)}\n")


def cmd_census(args) -> None:
    cache = SequenceCache(validate_plrs(args.coeffs))
    table = h_recurrence(cache, args.Z, args.n, trailing=args.trailing_gap)
    roots = char_poly_roots(cache.plrs, args.Z, table)
    decay = decay_report(table, roots) if len(table.rows) >= table.base_cases + 10 else None
    verified = None
    if args.verify:
        bad = verify_recurrence(cache, args.Z, args.verify, trailing=args.trailing_gap)
        if bad:
            raise InvariantViolation(f"recurrence disagrees with brute force at n={bad}")
        verified = args.verify
        print(f"verified n ≤ {args.verify} against brute force: OK", file=sys.stderr)
    roots_json = {**_meta(args), "roots": roots.to_json(),
                  "decay": decay.to_json() if decay else None, "verified_upto": verified}
    with _output(args.out) as out:
        if args.format == "json":
            rows = [{"n": r.n, "H_n": str(r.H), "G_n": str(r.G), "ratio": r.ratio, "tilde": str(r.tilde)}
                    for r in table.rows]
            out.write(_dump({**roots_json, "table": rows}))
            return
        out.write(_csv_header(args) + table.to_csv())
    if args.format == "csv":
        if args.roots_out:
            with open(args.roots_out, "w") as fh:
                fh.write(_dump(roots_json))
        else:
            sys.stderr.write(_dump(roots_json))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("csv", "json"), default="csv"):
        sp.add_argument("--coeffs", type=_coeffs, required=True, help="c_1,...,c_L")
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("seq", help="sequence terms G_1..G_n")
    common(sp)
    sp.add_argument("--n", type=int, default=20)
    sp.set_defaults(func=cmd_seq)

    sp = sub.add_parser("decompose", help="legal decomposition of N")
    common(sp, ("text", "json"), "text")
    sp.add_argument("N", help="non-negative decimal integer")
    sp.add_argument("--max-index", type=int, default=100_000)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("dist", help="summand-count distribution")
    common(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--upto-index", type=int, help="exact distribution over [0, G_k)")
    g.add_argument("--top-interval", type=int, help="exact distribution over [G_n, G_{n+1})")
    g.add_argument("--counterexample-n", type=int, help="interval that cannot be Gaussian")
    g.add_argument("--lo", help="start of an explicit interval")
    sp.add_argument("--len", help="length of the explicit interval")
    sp.add_argument("--mode", choices=("auto", "exhaustive", "sample"), default="auto")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--budget", type=int, default=EXHAUSTIVE_BUDGET)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("subinterval", help="sampled [m, m + G_alpha) experiments")
    common(sp, ("json", "csv"), "json")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--alpha", type=int, default=None)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--mode", choices=("auto", "exhaustive", "sample"), default="auto")
    sp.add_argument("--walk-samples", type=int, default=20_000)
    sp.add_argument("--budget", type=int, default=EXHAUSTIVE_BUDGET)
    sp.set_defaults(func=cmd_subinterval)

    sp = sub.add_parser("census", help="count integers with no gap >= Z")
    common(sp)
    sp.add_argument("--Z", type=int, required=True)
    sp.add_argument("--n", type=int, default=60)
    sp.add_argument("--verify", type=int, default=0, help="check the recurrence by brute force up to n")
    sp.add_argument("--trailing-gap", action="store_true",
                    help="also count the zeros below the lowest summand as a gap")
    sp.add_argument("--roots-out", default=None, help="write the root report JSON here")
    sp.set_defaults(func=cmd_census)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvalidInput as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except BudgetExceeded as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except InvariantViolation as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
