"""Single-receiver DOA estimation behind a phase-flipping surface on a
non-uniform linear array: a gridless atomic-norm estimator with a
manifold transformation, classic baselines, and a benchmark harness."""

__version__ = "0.1.0"

from .geometry import (ArrayGeometry, TransformationMatrix, compute_transformation,
                       fit_transformation_at, make_nulra, steering_matrix,
                       steering_vector, ula_steering)
from .signal_model import (MeasurementMatrix, ReceivedSignal, Scenario,
                           combined_matrix, make_measurement_matrix,
                           simulate_received, write_received_csv)
from .anm import (ConvergenceError, EstimateSet, SdpProblem, SdpSolution,
                  SolverError, SolverOptions, Spectrum, dual_polynomial,
                  estimate_doa, find_peaks, gamma_from_snr, solve_sdp)
from .baselines import (GridDictionary, anm_ula_estimate, build_grid_dictionary,
                        fft_spectrum, omp_estimate)
from .harness import (BenchmarkResult, ConfigError, ExperimentConfig,
                      load_config, preset_config, rmse, run_point,
                      run_spectrum, run_sweep)

__all__ = [
    "__version__",
    "ArrayGeometry", "TransformationMatrix", "compute_transformation",
    "fit_transformation_at", "make_nulra", "steering_matrix",
    "steering_vector", "ula_steering",
    "MeasurementMatrix", "ReceivedSignal", "Scenario", "combined_matrix",
    "make_measurement_matrix", "simulate_received", "write_received_csv",
    "ConvergenceError", "EstimateSet", "SdpProblem", "SdpSolution",
    "SolverError", "SolverOptions", "Spectrum", "dual_polynomial",
    "estimate_doa", "find_peaks", "gamma_from_snr", "solve_sdp",
    "GridDictionary", "anm_ula_estimate", "build_grid_dictionary",
    "fft_spectrum", "omp_estimate",
    "BenchmarkResult", "ConfigError", "ExperimentConfig", "load_config",
    "preset_config", "rmse", "run_point", "run_spectrum", "run_sweep",
]
