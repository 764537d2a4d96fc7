"""Command-line front end: simulate, estimate, bench, sweep, reproduce."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .anm import SolverError, estimate_doa, find_peaks
from .baselines import anm_ula_estimate, build_grid_dictionary, fft_spectrum, omp_estimate
from .geometry import compute_transformation
from .harness import (ConfigError, ExperimentConfig, PRESET_ALIASES, load_config,
                      preset_config, rmse, run_spectrum, run_sweep,
                      write_spectra_csv, _build_trial, _resolve_gamma)
from .numerics import NumericError
from .signal_model import write_received_csv

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="flat JSON config file (defaults apply otherwise)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    parser.add_argument("--out-dir", type=Path, default=None,
                        help="directory for output files")
    parser.add_argument("--trials", type=int, default=None,
                        help="override the per-point trial count")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: RIS_DOA_THREADS or 1)")
    parser.add_argument("--fixed-geometry", action="store_true",
                        help="pin one array realization across trials "
                             "(debugging aid; default draws a fresh layout "
                             "per trial)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-doa",
        description="Gridless DOA estimation benchmarks for a single-receiver "
                    "phase-flipping surface on a perturbed linear array.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write one scenario and its samples")
    _add_common(p)

    p = sub.add_parser("estimate", help="run one estimator on one scenario")
    _add_common(p)
    p.add_argument("--method", choices=("proposed", "fft", "omp", "anm"),
                   default="proposed")

    p = sub.add_parser("bench", help="Monte-Carlo benchmark at the base point")
    _add_common(p)

    p = sub.add_parser("sweep", help="Monte-Carlo benchmark over a sweep")
    _add_common(p)

    p = sub.add_parser("reproduce", help="run a canned experiment")
    p.add_argument("figure", choices=sorted(set(PRESET_ALIASES)),
                   help="fig2..fig6 or a semantic alias "
                        "(spectrum, hyper, sigma, snr, measurements)")
    _add_common(p)

    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.trials is not None:
        updates["trials"] = args.trials
    if getattr(args, "out_dir", None) is not None:
        updates["out_dir"] = str(args.out_dir)
    if args.threads is not None:
        updates["threads"] = args.threads
    if getattr(args, "fixed_geometry", False):
        updates["fixed_geometry"] = True
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    scenario, received, _ = _build_trial(cfg, 0, 0)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.json").write_text(scenario.to_json() + "\n")
    write_received_csv(out / "received.csv", received)
    print(f"wrote {out / 'scenario.json'} and {out / 'received.csv'} "
          f"({received.r.size} samples, noise variance "
          f"{received.noise_variance:.6g})")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = _load(args)
    scenario, received, c = _build_trial(cfg, 0, 0)
    truth = scenario.target_angles_deg
    k = truth.size
    r = received.r
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spectrum = None
    diagnostics = None
    if args.method == "proposed":
        tmat = compute_transformation(scenario.geometry,
                                      n_points=cfg.transform_grid_points)
        gamma = _resolve_gamma(cfg, r, c, tmat.t)
        est = estimate_doa(r, c, tmat.t, k, gamma, options=cfg.solver_options(),
                           n_grid=cfg.spectrum_points)
        angles, spectrum, diagnostics = est.angles_deg, est.spectrum, est.diagnostics
    elif args.method == "anm":
        gamma = _resolve_gamma(cfg, r, c, np.eye(cfg.n_elements))
        est = anm_ula_estimate(r, c, gamma, k, options=cfg.solver_options(),
                               n_grid=cfg.spectrum_points)
        angles, spectrum, diagnostics = est.angles_deg, est.spectrum, est.diagnostics
    elif args.method == "omp":
        dictionary = build_grid_dictionary(c, scenario.geometry,
                                           step_deg=cfg.omp_grid_step_deg)
        angles = omp_estimate(r, dictionary, k)
    else:
        spectrum = fft_spectrum(r, c, cfg.n_fft)
        angles = find_peaks(spectrum, k).angles_deg
    if spectrum is not None:
        write_spectra_csv(out / "spectrum.csv", {args.method: spectrum})
    if diagnostics is not None:
        (out / "diagnostics.json").write_text(json.dumps(diagnostics, indent=2)
                                              + "\n")
    print(f"true_angles_deg: {', '.join(f'{a:.4f}' for a in truth)}")
    print(f"estimated_angles_deg: {', '.join(f'{a:.4f}' for a in angles)}")
    print(f"rmse_deg: {rmse(angles, truth):.6f}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = dataclasses.replace(_load(args), sweep_var=None, sweep_values=())
    result = run_sweep(cfg)
    for row in result.rows:
        print(f"{row.method:10s} rmse_deg={row.rmse_deg:.4f} "
              f"mean_runtime_s={row.mean_runtime_s:.4f} "
              f"trials={row.trials} failures={row.failures}")
    print(f"outputs in {cfg.out_dir}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep_var is None:
        raise ConfigError("field 'sweep_var': required for the sweep command")
    result = run_sweep(cfg)
    for row in result.rows:
        print(f"{cfg.sweep_var}={row.sweep_value:g} {row.method:10s} "
              f"rmse_deg={row.rmse_deg:.4f} trials={row.trials} "
              f"failures={row.failures}")
    print(f"outputs in {cfg.out_dir}")
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    cfg = preset_config(args.figure, trials=args.trials,
                        master_seed=args.seed,
                        out_dir=str(args.out_dir) if args.out_dir else None,
                        threads=args.threads)
    if args.config is not None:
        raise ConfigError("reproduce uses canned configs; --config is not accepted")
    if args.fixed_geometry:
        cfg = dataclasses.replace(cfg, fixed_geometry=True)
    if PRESET_ALIASES[args.figure] == "fig2":
        _, estimates = run_spectrum(cfg)
        for name, angles in estimates.items():
            print(f"{name:10s} angles_deg: "
                  f"{', '.join(f'{a:.4f}' for a in angles)}")
    else:
        result = run_sweep(cfg)
        for row in result.rows:
            print(f"{cfg.sweep_var}={row.sweep_value:g} {row.method:10s} "
                  f"rmse_deg={row.rmse_deg:.4f} failures={row.failures}")
    print(f"outputs in {cfg.out_dir}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "bench": _cmd_bench,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, NumericError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
