"""H_n / G_n decay against the root prediction for a range of gap thresholds."""

import argparse
import math
from dataclasses import dataclass

from zeckendorf_intervals import SequenceCache
from zeckendorf_intervals.gap_census import char_poly_roots, decay_report, h_recurrence


@dataclass
class CensusConfig:
    coeffs: tuple[int, ...] = (1, 1)
    z_extra: int = 5
    n_max: int = 120
    trailing: bool = False


def run(cfg: CensusConfig) -> list[dict]:
    cache = SequenceCache(cfg.coeffs)
    L = len(cfg.coeffs)
    out = []
    for Z in range(L + 1, L + 1 + cfg.z_extra):
        table = h_recurrence(cache, Z, cfg.n_max, cfg.trailing)
        roots = char_poly_roots(cache, Z, table)
        decay = decay_report(table, roots)
        out.append({"Z": Z, "lambda": roots.lam, "omega_hat": roots.omega_hat,
                    "empirical_rate": roots.empirical_rate, "slope": decay.slope,
                    "predicted": math.log(roots.omega_hat / roots.lam),
                    "status": "PASS" if decay.passed else "FAIL"})
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--coeffs", default="1,1")
    p.add_argument("--z-extra", type=int, default=5)
    p.add_argument("--n-max", type=int, default=120)
    p.add_argument("--trailing-gap", action="store_true")
    a = p.parse_args()
    cfg = CensusConfig(tuple(int(x) for x in a.coeffs.split(",")), a.z_extra, a.n_max, a.trailing_gap)
    rows = run(cfg)
    print(",".join(rows[0]))
    for r in rows:
        print(",".join(str(v) for v in r.values()))


if __name__ == "__main__":
    main()
