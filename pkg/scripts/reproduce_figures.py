#!/usr/bin/env python3
"""Re-run the canned benchmark experiments (fig2 .. fig6).

Each experiment writes its CSV artifacts under runs/<figure>/ by
default.  The sweeps take a while at the full 100 trials per point;
pass --trials to thin them out while iterating.

    python3 scripts/reproduce_figures.py                 # everything
    python3 scripts/reproduce_figures.py fig5 --trials 10
    python3 scripts/reproduce_figures.py snr sigma --threads 8
"""

import argparse
import sys
import time

from ris_doa.harness import (
    PRESET_NAMES,
    preset_config,
    run_spectrum,
    run_sweep,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("figures", nargs="*", default=list(PRESET_NAMES),
                        help="figure ids or aliases (default: all)")
    parser.add_argument("--trials", type=int, default=None,
                        help="override trials per sweep point")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: RIS_DOA_THREADS or 1)")
    args = parser.parse_args()

    for name in args.figures:
        cfg = preset_config(name, trials=args.trials, master_seed=args.seed,
                            threads=args.threads)
        print(f"== {name} -> {cfg.out_dir} "
              f"({cfg.trials} trial{'s' if cfg.trials != 1 else ''}"
              f"{'' if cfg.sweep_var is None else f', sweep {cfg.sweep_var}'})")
        start = time.monotonic()
        if cfg.sweep_var is None:
            run_spectrum(cfg)
        else:
            result = run_sweep(cfg)
            for row in result.rows:
                print(f"  {cfg.sweep_var}={row.sweep_value:g} "
                      f"{row.method:10s} rmse_deg={row.rmse_deg:.4f} "
                      f"failures={row.failures}")
        print(f"  done in {time.monotonic() - start:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
