"""KS distance to the normal for the exact summand-count distribution over [0, G_k)."""

import argparse
from dataclasses import dataclass, field

from zeckendorf_intervals import SequenceCache
from zeckendorf_intervals.interval_lab import exact_count_distribution


@dataclass
class TrendConfig:
    coeffs: tuple[int, ...] = (1, 1)
    ks: list[int] = field(default_factory=lambda: [25, 50, 100, 200, 400])


def run(cfg: TrendConfig) -> list[tuple[int, float, float, float]]:
    cache = SequenceCache(cfg.coeffs)
    rows = []
    for k in cfg.ks:
        d = exact_count_distribution(cache, k)
        rows.append((k, d.mean, d.stddev, d.ks_to_normal))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--coeffs", default="1,1")
    p.add_argument("--k", default="25,50,100,200,400")
    a = p.parse_args()
    cfg = TrendConfig(tuple(int(x) for x in a.coeffs.split(",")), [int(x) for x in a.k.split(",")])
    print("k,mean,stddev,ks")
    for k, mean, sd, ks in run(cfg):
        print(f"{k},{mean:.6f},{sd:.6f},{ks:.6f}")


if __name__ == "__main__":
    main()
