"""Fraction of rounds where the sensor misses the TF / wake-up frame.

Vectorised Monte Carlo over isolated rounds, for a range of guard factors,
next to the Gaussian tail P(shift > guard).

    python scripts/miss_rate.py --sigma 0.01 --rounds 1000000
"""

import argparse

from scipy.stats import norm

from wursim.config import ScenarioConfig
from wursim.methods import MethodKind, miss_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, default=0.01)
    ap.add_argument("--rounds", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print(f"sigma = {args.sigma} s, {args.rounds} rounds")
    print(f"{'guard':>6s} {'tail':>10s} {'twt_tf':>10s} {'wur_cts':>10s}")
    for g in (1.0, 2.0, 3.0, 4.0):
        cfg = ScenarioConfig(guard_factor=g)
        row = [miss_fraction(cfg, m, args.sigma, args.rounds, args.seed)
               for m in (MethodKind.TWT_TF, MethodKind.WUR_CTS)]
        print(f"{g:5g}s {norm.sf(g):10.2e} " + " ".join(f"{k / n:10.2e}" for k, n in row))


if __name__ == "__main__":
    main()
