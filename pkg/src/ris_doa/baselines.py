"""Reference estimators the gridless method is benchmarked against.

* FFT: least-squares inversion of the mixing matrix back to the element
  domain, then a zero-padded DFT scan uniform in sin(theta).
* OMP: greedy sparse recovery over a fixed angle-grid dictionary built
  on the true element positions.
* Conventional ANM: the same SDP pipeline with the manifold map forced
  to identity, i.e. pretending the layout is the half-wavelength grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .anm import EstimateSet, SolverOptions, Spectrum, estimate_doa
from .geometry import ArrayGeometry, steering_matrix
from .numerics import least_squares

__all__ = [
    "GridDictionary",
    "build_grid_dictionary",
    "fft_spectrum",
    "omp_estimate",
    "anm_ula_estimate",
]


def fft_spectrum(r, c, n_fft: int = 4096) -> Spectrum:
    """Beamforming spectrum after least-squares element-domain recovery.

    Recovers x = argmin ||C x - r||, zero-pads to ``n_fft`` and evaluates
    |sum_n x_n exp(-j pi n sin(theta))|^2 on bins uniform in sin(theta),
    which is exactly one FFT.  Total spectrum mass obeys Parseval:
    sum(values) / n_fft == ||x||^2.
    """
    c = np.asarray(c, dtype=complex)
    if n_fft < c.shape[1]:
        raise ValueError("n_fft must be at least the element count")
    x = least_squares(c, np.asarray(r, dtype=complex).ravel())
    bins = np.fft.fft(x, n=int(n_fft))
    values = np.fft.fftshift(np.abs(bins) ** 2)
    sines = np.fft.fftshift(np.fft.fftfreq(int(n_fft))) * 2.0  # [-1, 1)
    angles = np.degrees(np.arcsin(sines))
    return Spectrum(angles_deg=angles, values=values)


@dataclass(frozen=True)
class GridDictionary:
    """Atoms C a(theta_i, p) for a fixed angle grid, with cached norms."""

    angles_deg: np.ndarray
    atoms: np.ndarray
    norms: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles_deg, dtype=float)
        atoms = np.asarray(self.atoms, dtype=complex)
        norms = np.asarray(self.norms, dtype=float)
        object.__setattr__(self, "angles_deg", angles)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "norms", norms)
        if np.any(np.diff(angles) <= 0):
            raise ValueError("dictionary angles must be strictly increasing")
        if atoms.shape[1] != angles.size or norms.size != angles.size:
            raise ValueError("dictionary columns must match the angle grid")
        if np.any(norms <= 0):
            raise ValueError("dictionary atoms must be non-trivial")

    @property
    def size(self) -> int:
        return self.angles_deg.size


def build_grid_dictionary(c, geometry: ArrayGeometry, step_deg: float = 1.0,
                          angles_deg=None) -> GridDictionary:
    """Measurement-domain dictionary on a (default 1 degree) angle grid."""
    c = np.asarray(c, dtype=complex)
    if angles_deg is None:
        if step_deg <= 0:
            raise ValueError("step_deg must be positive")
        angles = np.arange(-90.0 + step_deg, 90.0 + 0.5 * step_deg, step_deg)
    else:
        angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    atoms = c @ steering_matrix(angles, geometry.positions, geometry.wavelength)
    norms = np.linalg.norm(atoms, axis=0)
    return GridDictionary(angles_deg=angles, atoms=atoms, norms=norms)


def omp_estimate(r, dictionary: GridDictionary, k: int,
                 return_residuals: bool = False):
    """Orthogonal matching pursuit over the grid dictionary.

    Runs ``k`` rounds of correlate-select-refit and returns the selected
    angles sorted ascending.  If the selected atoms become rank
    deficient the loop stops early with a warning, so the result may be
    shorter than ``k``.  With ``return_residuals`` the residual norm
    after every round (starting from ||r||) is returned as well.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > dictionary.size:
        raise ValueError("cannot select more atoms than the dictionary holds")
    r = np.asarray(r, dtype=complex).ravel()
    residual = r.copy()
    selected: list[int] = []
    residual_norms = [float(np.linalg.norm(residual))]
    for _ in range(k):
        scores = np.abs(dictionary.atoms.conj().T @ residual) / dictionary.norms
        scores[selected] = -1.0  # never reselect an atom
        best = int(np.argmax(scores))
        trial = selected + [best]
        basis = dictionary.atoms[:, trial]
        smallest = np.linalg.svd(basis, compute_uv=False)[-1]
        if smallest < 1e-10 * dictionary.norms[best]:
            warnings.warn(
                f"OMP stopped early after {len(selected)} atoms: the next "
                "selection is linearly dependent",
                UserWarning,
                stacklevel=2,
            )
            break
        selected = trial
        coefficients = least_squares(basis, r)
        residual = r - basis @ coefficients
        residual_norms.append(float(np.linalg.norm(residual)))
    angles = np.sort(dictionary.angles_deg[selected])
    if len(selected) < k:
        warnings.warn(
            f"OMP returned {len(selected)} of {k} requested angles",
            UserWarning,
            stacklevel=2,
        )
    if return_residuals:
        return angles, np.asarray(residual_norms)
    return angles


def anm_ula_estimate(r, c, gamma: float, k: int, u: float = 1.0,
                     options: SolverOptions | None = None,
                     n_grid: int = 8192) -> EstimateSet:
    """Conventional gridless baseline: identical pipeline, identity map.

    This is what the estimator degenerates to when the perturbed layout
    is (wrongly, in general) assumed to be the half-wavelength grid.
    """
    c = np.asarray(c, dtype=complex)
    identity = np.eye(c.shape[1], dtype=complex)
    return estimate_doa(r, c, identity, k, gamma, u=u, options=options,
                        n_grid=n_grid)
