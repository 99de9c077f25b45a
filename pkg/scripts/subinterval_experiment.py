"""Sampled [m, m + G_alpha) walks with the walk checks, plus the zero-run gate rate."""

import argparse
import json
from dataclasses import asdict, dataclass

from zeckendorf_intervals import SequenceCache
from zeckendorf_intervals.interval_lab import IntervalParams, gap_probability_estimate, run_subinterval_batch


@dataclass
class SubintervalConfig:
    coeffs: tuple[int, ...] = (1, 1)
    n: int = 40
    alpha: int = 20
    q: int = 8
    samples: int = 100
    gate_samples: int = 2000
    seed: int = 0
    threads: int = 1


def run(cfg: SubintervalConfig) -> dict:
    cache = SequenceCache(cfg.coeffs)
    params = IntervalParams(cfg.n, cfg.alpha, cfg.q)
    batch = run_subinterval_batch(cache, params, cfg.samples, cfg.seed, cfg.threads)
    gate = gap_probability_estimate(cache, params, cfg.gate_samples, cfg.seed, cfg.threads)
    worst = max((r.prefix_mismatches for r in batch.reports if r.passed), default=0)
    return {"config": asdict(cfg), "aggregate": batch.aggregate_json(),
            "gate_fraction": gate, "max_prefix_mismatches": worst}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--coeffs", default="1,1")
    for name, default in [("n", 40), ("alpha", 20), ("q", 8), ("samples", 100),
                          ("gate-samples", 2000), ("seed", 0), ("threads", 1)]:
        p.add_argument(f"--{name}", type=int, default=default)
    a = p.parse_args()
    cfg = SubintervalConfig(tuple(int(x) for x in a.coeffs.split(",")), a.n, a.alpha, a.q,
                            a.samples, a.gate_samples, a.seed, a.threads)
    print(json.dumps(run(cfg), indent=2))


if __name__ == "__main__":
    main()
