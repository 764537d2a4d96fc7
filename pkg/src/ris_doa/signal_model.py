"""Measurement model for a single-channel receiver behind a phase-flipping
surface.

Each snapshot m applies a programmable unit-modulus weight to every
element, sums the element signals toward the receiver direction alpha,
and adds circular complex Gaussian noise:

    r = B diag(a(alpha, p)) A(theta, p) s + w

with B the (M, N) weight matrix (rows = snapshots), a(.) steering
vectors on the actual element positions p, and s the target gains.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, steering_matrix, steering_vector

__all__ = [
    "MeasurementMatrix",
    "Scenario",
    "ReceivedSignal",
    "make_measurement_matrix",
    "combined_matrix",
    "simulate_received",
    "write_received_csv",
]

# Noise variance applied when a scenario has no targets (signal power 0
# makes the SNR definition vacuous); chosen arbitrarily but fixed.
ZERO_SIGNAL_NOISE_VARIANCE = 1.0

_PHASE_TOL_DEG = 1e-6


@dataclass(frozen=True)
class MeasurementMatrix:
    """Snapshot weight matrix with entries restricted to a phase alphabet.

    The default alphabet {0, 180} degrees models hardware that can only
    flip sign, so entries are exactly +1 or -1.
    """

    b: np.ndarray
    phase_alphabet_deg: tuple[float, ...] = (0.0, 180.0)
    seed: int | None = None

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "phase_alphabet_deg",
                           tuple(float(p) for p in self.phase_alphabet_deg))
        if b.ndim != 2:
            raise ValueError(f"weight matrix must be 2-d, got shape {b.shape}")
        if not self.phase_alphabet_deg:
            raise ValueError("phase alphabet must not be empty")
        moduli = np.abs(b)
        if np.any(np.abs(moduli - 1.0) > 1e-12):
            raise ValueError("weight entries must have unit modulus")
        phases = np.degrees(np.angle(b))[..., None]  # (M, N, 1)
        alphabet = np.asarray(self.phase_alphabet_deg, dtype=float)[None, None, :]
        distance = np.abs((phases - alphabet + 180.0) % 360.0 - 180.0)
        if np.any(distance.min(axis=-1) > _PHASE_TOL_DEG):
            raise ValueError("weight entries fall outside the phase alphabet")
        b.flags.writeable = False

    @property
    def n_measurements(self) -> int:
        return self.b.shape[0]

    @property
    def n_elements(self) -> int:
        return self.b.shape[1]

    def to_dict(self) -> dict:
        if self.seed is None:
            raise ValueError(
                "only seed-generated measurement matrices are serializable"
            )
        return {
            "n_measurements": int(self.n_measurements),
            "n_elements": int(self.n_elements),
            "phase_alphabet_deg": list(self.phase_alphabet_deg),
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MeasurementMatrix":
        return make_measurement_matrix(
            n_elements=int(data["n_elements"]),
            n_measurements=int(data["n_measurements"]),
            seed=int(data["seed"]),
            phase_alphabet_deg=tuple(data.get("phase_alphabet_deg", (0.0, 180.0))),
        )


def make_measurement_matrix(n_elements: int, n_measurements: int,
                            seed: int | None = None,
                            phase_alphabet_deg: tuple[float, ...] = (0.0, 180.0),
                            ) -> MeasurementMatrix:
    """Draw snapshot weights i.i.d. uniform over the phase alphabet."""
    if n_elements < 1 or n_measurements < 1:
        raise ValueError("matrix dimensions must be positive")
    alphabet = tuple(float(p) for p in phase_alphabet_deg)
    if not alphabet:
        raise ValueError("phase alphabet must not be empty")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(alphabet), size=(n_measurements, n_elements))
    if alphabet == (0.0, 180.0):
        values = np.array([1.0 + 0.0j, -1.0 + 0.0j])  # exact sign flips
    else:
        values = np.exp(1j * np.radians(np.asarray(alphabet)))
    return MeasurementMatrix(b=values[picks], phase_alphabet_deg=alphabet, seed=seed)


def combined_matrix(measurement: MeasurementMatrix, geometry: ArrayGeometry,
                    receiver_direction_deg: float = 0.0) -> np.ndarray:
    """Effective (M, N) mixing matrix  C = B diag(a(alpha, p))."""
    if measurement.n_elements != geometry.n_elements:
        raise ValueError(
            f"measurement matrix has {measurement.n_elements} columns, "
            f"geometry has {geometry.n_elements} elements"
        )
    a_rx = steering_vector(receiver_direction_deg, geometry.positions,
                           geometry.wavelength)
    return measurement.b * a_rx[None, :]


@dataclass(frozen=True)
class Scenario:
    """Everything needed to synthesize one batch of received samples."""

    geometry: ArrayGeometry
    target_angles_deg: np.ndarray
    target_gains: np.ndarray
    measurement: MeasurementMatrix
    snr_db: float | None = 20.0  # None -> noiseless
    receiver_direction_deg: float = 0.0
    noise_seed: int | None = None

    def __post_init__(self):
        angles = np.atleast_1d(np.asarray(self.target_angles_deg, dtype=float))
        gains = np.atleast_1d(np.asarray(self.target_gains, dtype=complex))
        object.__setattr__(self, "target_angles_deg", angles)
        object.__setattr__(self, "target_gains", gains)
        if angles.size != gains.size:
            raise ValueError("need one gain per target angle")
        if angles.size >= self.geometry.n_elements:
            raise ValueError("the model assumes fewer targets than elements")
        if angles.size and (np.any(angles <= -90.0) or np.any(angles > 90.0)):
            raise ValueError("target angles must lie in (-90, 90] degrees")
        if self.measurement.n_elements != self.geometry.n_elements:
            raise ValueError("measurement matrix and geometry disagree on N")
        if not (-90.0 < self.receiver_direction_deg <= 90.0):
            raise ValueError("receiver direction must lie in (-90, 90] degrees")
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite (or None for noiseless)")
        angles.flags.writeable = False
        gains.flags.writeable = False

    @property
    def n_targets(self) -> int:
        return self.target_angles_deg.size

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "target_angles_deg": [float(a) for a in self.target_angles_deg],
            "target_gains": [[float(g.real), float(g.imag)] for g in self.target_gains],
            "measurement": self.measurement.to_dict(),
            "snr_db": None if self.snr_db is None else float(self.snr_db),
            "receiver_direction_deg": float(self.receiver_direction_deg),
            "noise_seed": None if self.noise_seed is None else int(self.noise_seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        gains = np.asarray([complex(re, im) for re, im in data["target_gains"]])
        return cls(
            geometry=ArrayGeometry.from_dict(data["geometry"]),
            target_angles_deg=np.asarray(data["target_angles_deg"], dtype=float),
            target_gains=gains,
            measurement=MeasurementMatrix.from_dict(data["measurement"]),
            snr_db=data.get("snr_db"),
            receiver_direction_deg=float(data.get("receiver_direction_deg", 0.0)),
            noise_seed=data.get("noise_seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ReceivedSignal:
    """Simulated receiver samples plus the noiseless part for diagnostics."""

    r: np.ndarray
    noiseless: np.ndarray
    noise_variance: float


def simulate_received(scenario: Scenario) -> ReceivedSignal:
    """Generate one batch of received samples for a scenario.

    The noise variance is set from the realized noiseless signal power:
    10 log10( ||noiseless||^2 / (M * sigma_w^2) ) = snr_db, i.e. the SNR
    is the per-snapshot signal-to-noise power ratio after combining.
    Noise is circular complex Gaussian, seeded by ``noise_seed``.
    """
    c = combined_matrix(scenario.measurement, scenario.geometry,
                        scenario.receiver_direction_deg)
    m = scenario.measurement.n_measurements
    if scenario.n_targets:
        a = steering_matrix(scenario.target_angles_deg,
                            scenario.geometry.positions,
                            scenario.geometry.wavelength)
        noiseless = c @ (a @ scenario.target_gains)
    else:
        noiseless = np.zeros(m, dtype=complex)
    if scenario.snr_db is None:
        return ReceivedSignal(r=noiseless.copy(), noiseless=noiseless,
                              noise_variance=0.0)
    signal_power = float(np.vdot(noiseless, noiseless).real)
    if signal_power == 0.0:
        warnings.warn(
            "scenario has zero signal power; using the fixed noise floor",
            UserWarning,
            stacklevel=2,
        )
        variance = ZERO_SIGNAL_NOISE_VARIANCE
    else:
        variance = signal_power / (m * 10.0 ** (scenario.snr_db / 10.0))
    rng = np.random.default_rng(scenario.noise_seed)
    noise = np.sqrt(variance / 2.0) * (rng.standard_normal(m)
                                       + 1j * rng.standard_normal(m))
    return ReceivedSignal(r=noiseless + noise, noiseless=noiseless,
                          noise_variance=variance)


def write_received_csv(path, signal: ReceivedSignal) -> None:
    """Dump received samples as rows of ``index,re,im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for i, value in enumerate(signal.r):
            writer.writerow([i, f"{value.real:.17g}", f"{value.imag:.17g}"])
