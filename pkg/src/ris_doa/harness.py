"""Monte-Carlo experiment harness: configs, seeding, sweeps, and outputs.

A single flat :class:`ExperimentConfig` describes one scenario family
plus an optional parameter sweep.  Every trial derives its own seeds
deterministically from (master_seed, sweep_index, trial_index), so
results are independent of scheduling and thread count, and a run can
be reproduced from its manifest alone.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .anm import (EstimateSet, SolverError, SolverOptions, dual_polynomial,
                  estimate_doa, find_peaks, gamma_from_snr, ula_steering)
from .baselines import anm_ula_estimate, build_grid_dictionary, fft_spectrum, omp_estimate
from .geometry import compute_transformation, make_nulra
from .numerics import NumericError
from .signal_model import (Scenario, combined_matrix, make_measurement_matrix,
                           simulate_received)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "BenchmarkResult",
    "rmse",
    "run_point",
    "run_sweep",
    "run_spectrum",
    "preset_config",
    "PRESET_NAMES",
    "load_config",
    "write_spectra_csv",
]

METHOD_NAMES = ("proposed", "fft", "omp", "anm")
SWEEP_VARS = ("snr_db", "sigma", "n_measurements", "gamma")
MISSING_TARGET_PENALTY_DEG = 90.0
THREADS_ENV_VAR = "RIS_DOA_THREADS"

# Fallback regularization for noiseless data: a fixed fraction of the
# dual certificate amplitude of the data itself (scale-free, and always
# keeps the constraint active).  Peak bias grows roughly linearly with
# this fraction; 1e-3 keeps noiseless single-target estimates within a
# few millidegrees of the truth while the constraint stays active.
_NOISELESS_GAMMA_FRACTION = 1e-3


class ConfigError(ValueError):
    """A configuration file or value is unusable; the message names it."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, JSON-compatible description of one experiment.

    Defaults reproduce the reference benchmark scenario: 16 elements on
    a sigma = 0.1 perturbed half-wavelength layout, 32 sign-flip
    snapshots, three unit-power targets, 20 dB SNR.
    """

    n_elements: int = 16
    wavelength: float = 1.0
    n_measurements: int = 32
    sigma: float = 0.1
    target_angles_deg: tuple[float, ...] = (-30.345, 0.789, 20.456)
    receiver_direction_deg: float = 0.0
    snr_db: float | None = 20.0
    gamma_mode: str = "paper-fit"  # paper-fit | theory | fixed
    gamma_value: float | None = None
    methods: tuple[str, ...] = ("proposed", "fft", "omp", "anm")
    trials: int = 100
    master_seed: int = 1729
    sweep_var: str | None = None
    sweep_values: tuple[float, ...] = ()
    fixed_geometry: bool = False
    omp_grid_step_deg: float = 1.0
    n_fft: int = 4096
    spectrum_points: int = 8192
    transform_grid_points: int = 181
    solver_max_iterations: int = 20000
    solver_tol: float = 1e-6
    out_dir: str = "runs"
    threads: int = 0  # 0 -> RIS_DOA_THREADS env var, else 1

    def __post_init__(self):
        object.__setattr__(self, "target_angles_deg",
                           tuple(float(a) for a in self.target_angles_deg))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "sweep_values",
                           tuple(float(v) for v in self.sweep_values))
        for name in self.methods:
            if name not in METHOD_NAMES:
                raise ConfigError(f"field 'methods': unknown method {name!r}")
        if self.sweep_var is not None and self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"field 'sweep_var': must be one of {SWEEP_VARS}")
        if self.sweep_var is not None and not self.sweep_values:
            raise ConfigError("field 'sweep_values': empty while sweep_var is set")
        if self.gamma_mode not in ("paper-fit", "theory", "fixed"):
            raise ConfigError("field 'gamma_mode': must be paper-fit, theory or fixed")
        if self.gamma_mode == "fixed" and self.gamma_value is None \
                and self.sweep_var != "gamma":
            raise ConfigError("field 'gamma_value': required when gamma_mode is fixed")
        if self.trials < 1:
            raise ConfigError("field 'trials': must be at least 1")
        if not self.target_angles_deg:
            raise ConfigError("field 'target_angles_deg': need at least one target")

    @property
    def n_targets(self) -> int:
        return len(self.target_angles_deg)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(max_iterations=self.solver_max_iterations,
                             tol=self.solver_tol)

    def resolved_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        env = os.environ.get(THREADS_ENV_VAR, "")
        if env.strip():
            try:
                value = int(env)
            except ValueError as exc:
                raise ConfigError(
                    f"environment variable {THREADS_ENV_VAR}={env!r} is not an integer"
                ) from exc
            if value >= 1:
                return value
        return 1

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["target_angles_deg"] = list(self.target_angles_deg)
        data["methods"] = list(self.methods)
        data["sweep_values"] = list(self.sweep_values)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        values = {}
        for key, raw in data.items():
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
            values[key] = _coerce_field(key, raw, known[key].type)
        return cls(**values)


_INT_FIELDS = {"n_elements", "n_measurements", "trials", "master_seed", "n_fft",
               "spectrum_points", "transform_grid_points",
               "solver_max_iterations", "threads"}
_FLOAT_FIELDS = {"wavelength", "sigma", "receiver_direction_deg",
                 "omp_grid_step_deg", "solver_tol"}
_OPTIONAL_FLOAT_FIELDS = {"snr_db", "gamma_value"}
_TUPLE_FIELDS = {"target_angles_deg", "sweep_values", "methods"}


def _coerce_field(key: str, raw, _annotation) -> object:
    try:
        if key in _INT_FIELDS:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)) \
                    or int(raw) != raw:
                raise TypeError
            return int(raw)
        if key in _FLOAT_FIELDS:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            return float(raw)
        if key in _OPTIONAL_FLOAT_FIELDS:
            if raw is None:
                return None
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            return float(raw)
        if key in _TUPLE_FIELDS:
            if isinstance(raw, (str, bytes)) or not hasattr(raw, "__iter__"):
                raise TypeError
            return tuple(raw)
        if key == "fixed_geometry":
            if not isinstance(raw, bool):
                raise TypeError
            return raw
        if key in ("gamma_mode", "out_dir"):
            if not isinstance(raw, str):
                raise TypeError
            return raw
        if key == "sweep_var":
            if raw is not None and not isinstance(raw, str):
                raise TypeError
            return raw
    except TypeError:
        raise ConfigError(
            f"field {key!r}: value {raw!r} has the wrong type"
        ) from None
    raise ConfigError(f"unknown config field {key!r}")  # pragma: no cover


def load_config(path) -> ExperimentConfig:
    """Read a flat JSON config file, reporting bad fields by name."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return ExperimentConfig.from_dict(data)


def rmse(estimates, truth) -> float:
    """Root-mean-square angle error under the best target matching.

    Estimates are matched to ground-truth angles by brute force over
    permutations (the target counts here are tiny).  Missing estimates
    are charged the worst-case error of 90 degrees each, so a deficit is
    penalized rather than silently dropped.
    """
    truth = np.atleast_1d(np.asarray(truth, dtype=float))
    estimates = np.atleast_1d(np.asarray(estimates, dtype=float))
    k = truth.size
    if k == 0:
        raise ValueError("need at least one true angle")
    if estimates.size > k:
        raise ValueError("more estimates than true angles")
    missing = k - estimates.size
    penalty = missing * MISSING_TARGET_PENALTY_DEG ** 2
    if estimates.size == 0:
        return math.sqrt(penalty / k)
    best = math.inf
    for assignment in itertools.permutations(range(k), estimates.size):
        sq = float(np.sum((estimates - truth[list(assignment)]) ** 2))
        best = min(best, sq)
    return math.sqrt((best + penalty) / k)


@dataclass(frozen=True)
class TrialOutcome:
    """One (trial, method) record; squared errors allow exact re-pooling."""

    trial: int
    method: str
    rmse_deg: float
    n_targets: int
    deficit: int
    runtime_s: float
    failed: bool


@dataclass(frozen=True)
class PointSummary:
    sweep_value: float | None
    method: str
    rmse_deg: float
    mean_runtime_s: float
    median_runtime_s: float
    trials: int
    failures: int
    deficits: int


@dataclass(frozen=True)
class BenchmarkResult:
    config: ExperimentConfig
    rows: tuple[PointSummary, ...]
    trial_rows: tuple[TrialOutcome, ...] = ()
    sweep_indices: tuple[int, ...] = ()

    def by_method(self, sweep_value=None) -> dict[str, PointSummary]:
        out = {}
        for row in self.rows:
            matches = (sweep_value is None or row.sweep_value == sweep_value
                       or (row.sweep_value is None and sweep_value is None))
            if matches and row.method not in out:
                out[row.method] = row
        return out


def _point_config(cfg: ExperimentConfig, sweep_value: float | None) -> ExperimentConfig:
    if cfg.sweep_var is None or sweep_value is None:
        return cfg
    if cfg.sweep_var == "gamma":
        return dataclasses.replace(cfg, gamma_value=float(sweep_value),
                                   sweep_var=None, sweep_values=())
    if cfg.sweep_var == "n_measurements":
        return dataclasses.replace(cfg, n_measurements=int(sweep_value),
                                   sweep_var=None, sweep_values=())
    return dataclasses.replace(cfg, **{cfg.sweep_var: float(sweep_value)},
                               sweep_var=None, sweep_values=())


def _trial_seeds(master_seed: int, sweep_index: int, trial_index: int) -> dict:
    seq = np.random.SeedSequence((master_seed, sweep_index, trial_index))
    geom, meas, gains, noise = (int(s) for s in seq.generate_state(4, dtype=np.uint64))
    return {"geometry": geom, "measurement": meas, "gains": gains, "noise": noise}


_FIXED_GEOMETRY_MARKER = 0x0F1CED


def _build_trial(cfg: ExperimentConfig, sweep_index: int, trial_index: int):
    """Materialize one trial: geometry, mixing matrix, signals, map."""
    seeds = _trial_seeds(cfg.master_seed, sweep_index, trial_index)
    if cfg.fixed_geometry:
        pinned = _trial_seeds(cfg.master_seed, _FIXED_GEOMETRY_MARKER, 0)
        seeds["geometry"] = pinned["geometry"]
    geometry = make_nulra(cfg.n_elements, cfg.wavelength, cfg.sigma,
                          seed=seeds["geometry"])
    measurement = make_measurement_matrix(cfg.n_elements, cfg.n_measurements,
                                          seed=seeds["measurement"])
    gain_rng = np.random.default_rng(seeds["gains"])
    gains = np.exp(2j * np.pi * gain_rng.uniform(size=cfg.n_targets))
    scenario = Scenario(
        geometry=geometry,
        target_angles_deg=np.asarray(cfg.target_angles_deg),
        target_gains=gains,
        measurement=measurement,
        snr_db=cfg.snr_db,
        receiver_direction_deg=cfg.receiver_direction_deg,
        noise_seed=seeds["noise"],
    )
    received = simulate_received(scenario)
    c = combined_matrix(measurement, geometry, cfg.receiver_direction_deg)
    return scenario, received, c


def _resolve_gamma(cfg: ExperimentConfig, r, c, t) -> float:
    if cfg.gamma_value is not None:
        return float(cfg.gamma_value)
    if cfg.snr_db is None:
        d_op = np.asarray(t, dtype=complex).conj().T @ c.conj().T
        manifold = ula_steering(c.shape[1], np.linspace(-89.9, 90.0, 4096))
        sup = float(np.abs(manifold.conj().T @ (d_op @ r)).max())
        return _NOISELESS_GAMMA_FRACTION * sup
    return gamma_from_snr(cfg.snr_db, cfg.n_measurements, cfg.n_targets,
                          mode=cfg.gamma_mode if cfg.gamma_mode != "fixed"
                          else "paper-fit")


def _run_trial(cfg: ExperimentConfig, sweep_index: int,
               trial_index: int) -> list[TrialOutcome]:
    scenario, received, c = _build_trial(cfg, sweep_index, trial_index)
    truth = scenario.target_angles_deg
    k = truth.size
    r = received.r
    solver_opts = cfg.solver_options()
    tmat = None
    if "proposed" in cfg.methods:
        tmat = compute_transformation(scenario.geometry,
                                      n_points=cfg.transform_grid_points)
    outcomes = []
    for name in cfg.methods:
        start = time.perf_counter()
        failed = False
        deficit = 0
        angles = np.empty(0)
        try:
            if name == "proposed":
                gamma = _resolve_gamma(cfg, r, c, tmat.t)
                est = estimate_doa(r, c, tmat.t, k, gamma, options=solver_opts,
                                   n_grid=cfg.spectrum_points)
                angles, deficit = est.angles_deg, est.deficit
            elif name == "anm":
                identity = np.eye(cfg.n_elements, dtype=complex)
                gamma = _resolve_gamma(cfg, r, c, identity)
                est = anm_ula_estimate(r, c, gamma, k, options=solver_opts,
                                       n_grid=cfg.spectrum_points)
                angles, deficit = est.angles_deg, est.deficit
            elif name == "omp":
                dictionary = build_grid_dictionary(c, scenario.geometry,
                                                   step_deg=cfg.omp_grid_step_deg)
                angles = omp_estimate(r, dictionary, k)
                deficit = k - angles.size
            elif name == "fft":
                est = find_peaks(fft_spectrum(r, c, cfg.n_fft), k)
                angles, deficit = est.angles_deg, est.deficit
        except (SolverError, NumericError):
            failed = True
        runtime = time.perf_counter() - start
        error = math.nan if failed else rmse(angles, truth)
        outcomes.append(TrialOutcome(
            trial=trial_index,
            method=name,
            rmse_deg=error,
            n_targets=k,
            deficit=deficit,
            runtime_s=runtime,
            failed=failed,
        ))
    return outcomes


def _pool_outcomes(outcomes: list[TrialOutcome], sweep_value,
                   methods) -> list[PointSummary]:
    rows = []
    for name in methods:
        mine = [o for o in outcomes if o.method == name]
        good = [o for o in mine if not o.failed]
        failures = len(mine) - len(good)
        if good:
            sq_sum = sum(o.rmse_deg ** 2 * o.n_targets for o in good)
            count = sum(o.n_targets for o in good)
            pooled = math.sqrt(sq_sum / count)
            runtimes = [o.runtime_s for o in good]
            mean_rt = float(np.mean(runtimes))
            median_rt = float(statistics.median(runtimes))
        else:
            pooled = math.nan
            mean_rt = median_rt = math.nan
        rows.append(PointSummary(
            sweep_value=sweep_value,
            method=name,
            rmse_deg=pooled,
            mean_runtime_s=mean_rt,
            median_runtime_s=median_rt,
            trials=len(mine),
            failures=failures,
            deficits=sum(o.deficit for o in good),
        ))
    return rows


def run_point(cfg: ExperimentConfig, sweep_index: int = 0,
              sweep_value: float | None = None,
              executor: ProcessPoolExecutor | None = None):
    """Run all trials of one sweep point; returns (summaries, trial rows)."""
    point_cfg = _point_config(cfg, sweep_value)
    indices = range(point_cfg.trials)
    if executor is None:
        per_trial = [_run_trial(point_cfg, sweep_index, i) for i in indices]
    else:
        futures = [executor.submit(_run_trial, point_cfg, sweep_index, i)
                   for i in indices]
        per_trial = [f.result() for f in futures]
    outcomes = [o for trial in per_trial for o in trial]
    return _pool_outcomes(outcomes, sweep_value, point_cfg.methods), outcomes


def run_sweep(cfg: ExperimentConfig, out_dir=None,
              write_outputs: bool = True) -> BenchmarkResult:
    """Run a full (possibly single-point) sweep and write its artifacts.

    Outputs, under ``out_dir`` (default: the config's ``out_dir``):
    ``benchmark.csv`` (pooled per point and method), ``trials.csv``
    (per-trial log, carries the deficit flags), ``run_manifest.json``.
    """
    values: list[float | None]
    if cfg.sweep_var is None:
        values = [None]
    else:
        values = list(cfg.sweep_values)
    threads = cfg.resolved_threads()
    rows: list[PointSummary] = []
    trial_rows: list[TrialOutcome] = []
    sweep_indices: list[int] = []
    executor = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for index, value in enumerate(values):
            summaries, outcomes = run_point(cfg, sweep_index=index,
                                            sweep_value=value, executor=executor)
            rows.extend(summaries)
            trial_rows.extend(outcomes)
            sweep_indices.extend([index] * len(outcomes))
    finally:
        if executor is not None:
            executor.shutdown()
    result = BenchmarkResult(config=cfg, rows=tuple(rows),
                             trial_rows=tuple(trial_rows),
                             sweep_indices=tuple(sweep_indices))
    if write_outputs:
        target = Path(out_dir if out_dir is not None else cfg.out_dir)
        target.mkdir(parents=True, exist_ok=True)
        write_benchmark_csv(target / "benchmark.csv", result)
        write_trials_csv(target / "trials.csv", result)
        write_manifest(target / "run_manifest.json", result)
    return result


def _format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def write_benchmark_csv(path, result: BenchmarkResult) -> None:
    cfg = result.config
    sweep_var = cfg.sweep_var if cfg.sweep_var is not None else "none"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep_var", "sweep_value", "method", "rmse_deg",
                         "mean_runtime_s", "trials", "failures"])
        for row in result.rows:
            writer.writerow([
                sweep_var,
                _format_value(row.sweep_value),
                row.method,
                _format_value(row.rmse_deg),
                _format_value(row.mean_runtime_s),
                row.trials,
                row.failures,
            ])


def write_trials_csv(path, result: BenchmarkResult) -> None:
    cfg = result.config
    sweep_var = cfg.sweep_var if cfg.sweep_var is not None else "none"
    values = list(cfg.sweep_values) if cfg.sweep_var is not None else [None]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep_var", "sweep_value", "trial", "method",
                         "rmse_deg", "n_targets", "deficit", "runtime_s",
                         "failed"])
        for index, outcome in zip(result.sweep_indices, result.trial_rows):
            writer.writerow([
                sweep_var,
                _format_value(values[index] if index < len(values) else None),
                outcome.trial,
                outcome.method,
                _format_value(outcome.rmse_deg),
                outcome.n_targets,
                outcome.deficit,
                _format_value(outcome.runtime_s),
                int(outcome.failed),
            ])


def write_manifest(path, result: BenchmarkResult) -> None:
    per_point = []
    for row in result.rows:
        per_point.append({
            "sweep_value": row.sweep_value,
            "method": row.method,
            "rmse_deg": None if math.isnan(row.rmse_deg) else row.rmse_deg,
            "median_runtime_s": None if math.isnan(row.median_runtime_s)
            else row.median_runtime_s,
            "trials": row.trials,
            "failures": row.failures,
            "deficits": row.deficits,
        })
    manifest = {
        "library_version": __version__,
        "numpy_version": np.__version__,
        "config": result.config.to_dict(),
        "seed_derivation": "SeedSequence((master_seed, sweep_index, trial_index))",
        "per_point": per_point,
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")


def write_spectra_csv(path, spectra: dict) -> None:
    """Write labeled spectra as ``angle_deg,value,method`` rows.

    ``spectra`` maps a method name to either a Spectrum or a pair of
    (angles, values) arrays, so impulse-style entries (e.g. grid-method
    selections) fit the same schema.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["angle_deg", "value", "method"])
        for method, spec in spectra.items():
            if hasattr(spec, "angles_deg"):
                angles, values = spec.angles_deg, spec.values
            else:
                angles, values = spec
            for a, v in zip(angles, values):
                writer.writerow([_format_value(float(a)), _format_value(float(v)),
                                 method])


def run_spectrum(cfg: ExperimentConfig, out_dir=None,
                 write_outputs: bool = True):
    """One seeded realization: export every method's spatial spectrum.

    Returns (spectra dict, estimates dict).  The gridless methods
    contribute their dual polynomials, the FFT method its beamforming
    spectrum, and OMP its selected angles as impulses at the matched
    correlation score.
    """
    scenario, received, c = _build_trial(cfg, 0, 0)
    truth = scenario.target_angles_deg
    k = truth.size
    r = received.r
    solver_opts = cfg.solver_options()
    spectra: dict[str, object] = {}
    estimates: dict[str, np.ndarray] = {}
    for name in cfg.methods:
        if name == "proposed":
            tmat = compute_transformation(scenario.geometry,
                                          n_points=cfg.transform_grid_points)
            gamma = _resolve_gamma(cfg, r, c, tmat.t)
            est = estimate_doa(r, c, tmat.t, k, gamma, options=solver_opts,
                               n_grid=cfg.spectrum_points)
            spectra[name] = est.spectrum
            estimates[name] = est.angles_deg
        elif name == "anm":
            identity = np.eye(cfg.n_elements, dtype=complex)
            gamma = _resolve_gamma(cfg, r, c, identity)
            est = anm_ula_estimate(r, c, gamma, k, options=solver_opts,
                                   n_grid=cfg.spectrum_points)
            spectra[name] = est.spectrum
            estimates[name] = est.angles_deg
        elif name == "fft":
            spectrum = fft_spectrum(r, c, cfg.n_fft)
            spectra[name] = spectrum
            estimates[name] = find_peaks(spectrum, k).angles_deg
        elif name == "omp":
            dictionary = build_grid_dictionary(c, scenario.geometry,
                                               step_deg=cfg.omp_grid_step_deg)
            angles = omp_estimate(r, dictionary, k)
            scores = np.abs(dictionary.atoms.conj().T @ r) / dictionary.norms
            picked = np.searchsorted(dictionary.angles_deg, angles)
            spectra[name] = (angles, scores[picked] ** 2)
            estimates[name] = angles
    if write_outputs:
        target = Path(out_dir if out_dir is not None else cfg.out_dir)
        target.mkdir(parents=True, exist_ok=True)
        write_spectra_csv(target / "spectra.csv", spectra)
        single = BenchmarkResult(config=cfg, rows=tuple(
            _pool_outcomes(_run_trial(cfg, 0, 0), None, cfg.methods)))
        write_manifest(target / "run_manifest.json", single)
        with open(target / "estimates.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "angles_deg"])
            for name, angles in estimates.items():
                writer.writerow([name, " ".join(f"{a:.6f}" for a in angles)])
    return spectra, estimates


# ---------------------------------------------------------------------------
# Figure presets.  Numbers follow the reference experiment set: fig2 the
# spatial-spectrum snapshot, fig3 the regularization sweep, fig4 the
# layout-perturbation sweep, fig5 the SNR sweep, fig6 the snapshot-count
# sweep.  Semantic aliases are accepted everywhere figure ids are.
# ---------------------------------------------------------------------------

PRESET_ALIASES = {
    "fig2": "fig2", "spectrum": "fig2",
    "fig3": "fig3", "hyper": "fig3", "gamma": "fig3",
    "fig4": "fig4", "sigma": "fig4", "perturbation": "fig4",
    "fig5": "fig5", "snr": "fig5",
    "fig6": "fig6", "measurements": "fig6",
}
PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")


def preset_config(name: str, trials: int | None = None,
                  master_seed: int | None = None,
                  out_dir: str | None = None,
                  threads: int | None = None) -> ExperimentConfig:
    """Config for one of the canned experiments (fig2 .. fig6)."""
    key = PRESET_ALIASES.get(name)
    if key is None:
        raise ConfigError(f"unknown preset {name!r}; "
                          f"choose from {sorted(set(PRESET_ALIASES))}")
    base = ExperimentConfig()
    if key == "fig2":
        cfg = dataclasses.replace(base, trials=1, out_dir="runs/fig2")
    elif key == "fig3":
        gammas = tuple(float(g) for g in np.sqrt(np.logspace(2.0, 6.0, 9)))
        cfg = dataclasses.replace(base, sweep_var="gamma", sweep_values=gammas,
                                  gamma_mode="fixed", trials=100,
                                  methods=("proposed", "anm"),
                                  out_dir="runs/fig3")
    elif key == "fig4":
        cfg = dataclasses.replace(base, sweep_var="sigma",
                                  sweep_values=(0.0, 0.025, 0.05, 0.1),
                                  trials=100, out_dir="runs/fig4")
    elif key == "fig5":
        cfg = dataclasses.replace(base, sweep_var="snr_db",
                                  sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0,
                                                25.0, 30.0),
                                  trials=100, out_dir="runs/fig5")
    else:  # fig6
        cfg = dataclasses.replace(base, sweep_var="n_measurements",
                                  sweep_values=(16.0, 32.0, 64.0),
                                  trials=100, out_dir="runs/fig6")
    if trials is not None:
        cfg = dataclasses.replace(cfg, trials=trials)
    if master_seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=master_seed)
    if out_dir is not None:
        cfg = dataclasses.replace(cfg, out_dir=out_dir)
    if threads is not None:
        cfg = dataclasses.replace(cfg, threads=threads)
    return cfg
