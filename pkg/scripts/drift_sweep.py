"""Channel time and energy per frame versus clock drift for the four methods.

Runs the default sweep (or a config file), writes raw.csv / aggregate.csv and
prints the aggregate table.

    python scripts/fig3_sweep.py --out results/drift
    python scripts/fig3_sweep.py --config my.cfg --out results/custom
"""

import argparse
import time
from pathlib import Path

from wursim.config import load_config
from wursim.sweep import aggregate_rows, run_sweep, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results/drift"))
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    cfg = load_config(args.config, {"seed": args.seed} if args.seed is not None else None)
    t0 = time.perf_counter()
    rows = run_sweep(cfg)
    raw, agg = write_outputs(cfg, rows, args.out)
    print(f"{len(rows)} runs in {time.perf_counter() - t0:.1f} s -> {raw}")

    print(f"\n{'method':10s} {'sigma_ms':>8s} {'energy_uJ':>18s} {'channel_ms':>16s}")
    for line in aggregate_rows(cfg, rows):
        method, sigma, _n = line[:3]
        e, e_ci, ct, ct_ci = line[5], line[6], line[7], line[8]
        print(f"{method:10s} {sigma * 1e3:8g} {e * 1e6:10.1f} ± {e_ci * 1e6:6.1f}"
              f" {ct * 1e3:8.3f} ± {ct_ci * 1e3:5.3f}")


if __name__ == "__main__":
    main()
