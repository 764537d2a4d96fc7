"""Array geometry: perturbed linear layouts, steering vectors, and the
linear map that carries the half-wavelength reference manifold onto the
actual (non-uniform) element manifold.

Angles are degrees everywhere at the API surface, measured from array
broadside, and live in the open-closed interval (-90, 90].  Element
positions share the length unit of the wavelength.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import ConditioningWarning, least_squares

__all__ = [
    "ArrayGeometry",
    "TransformationMatrix",
    "make_nulra",
    "steering_vector",
    "steering_matrix",
    "ula_steering",
    "compute_transformation",
    "fit_transformation_at",
]

# Perturbations are validated against these bounds (in wavelengths):
# beyond WARN the layout is still legal but element ordering becomes
# fragile, at REJECT an element could swap past its neighbour's slot.
_PERTURBATION_WARN = 0.25
_PERTURBATION_REJECT = 0.5

_DEFAULT_FIT_SPAN_DEG = 89.0
_DEFAULT_FIT_POINTS = 181


def _check_angles(thetas: np.ndarray) -> None:
    if np.any(~np.isfinite(thetas)):
        raise ValueError("angles must be finite")
    if np.any(thetas <= -90.0) or np.any(thetas > 90.0):
        raise ValueError("angles must lie in (-90, 90] degrees")


def steering_vector(theta_deg: float, positions, wavelength: float = 1.0) -> np.ndarray:
    """Unit-modulus steering vector exp(j*2*pi/wavelength * p * sin(theta)).

    Parameters
    ----------
    theta_deg : float
        Direction in degrees, inside (-90, 90].
    positions : array_like
        Element positions, same unit as ``wavelength``.
    wavelength : float
        Carrier wavelength (> 0).
    """
    thetas = np.asarray([float(theta_deg)])
    _check_angles(thetas)
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    positions = np.asarray(positions, dtype=float)
    phase = (2.0 * np.pi / wavelength) * positions * np.sin(np.radians(thetas[0]))
    return np.exp(1j * phase)


def steering_matrix(thetas_deg, positions, wavelength: float = 1.0) -> np.ndarray:
    """Stack steering vectors column-wise: shape (n_elements, n_angles).

    Duplicate angles are legal but produce repeated columns, so a
    warning is emitted.
    """
    thetas = np.atleast_1d(np.asarray(thetas_deg, dtype=float))
    _check_angles(thetas)
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if np.unique(thetas).size != thetas.size:
        warnings.warn("duplicate angles produce repeated steering columns",
                      UserWarning, stacklevel=2)
    positions = np.asarray(positions, dtype=float)
    phase = (2.0 * np.pi / wavelength) * np.outer(positions, np.sin(np.radians(thetas)))
    return np.exp(1j * phase)


def ula_steering(n_elements: int, thetas_deg) -> np.ndarray:
    """Steering matrix of the half-wavelength reference layout.

    Positions are n * wavelength / 2, so the phases reduce to
    pi * n * sin(theta) and the wavelength cancels.
    """
    thetas = np.atleast_1d(np.asarray(thetas_deg, dtype=float))
    _check_angles(thetas)
    n = np.arange(n_elements, dtype=float)
    return np.exp(1j * np.pi * np.outer(n, np.sin(np.radians(thetas))))


@dataclass(frozen=True)
class ArrayGeometry:
    """A (possibly perturbed) linear element layout.

    ``positions[n]`` is the n-th element coordinate; the matching
    reference layout puts element n at ``n * wavelength / 2``.  ``sigma``
    records the perturbation standard deviation (in wavelengths) used to
    generate the layout, ``seed`` the generator seed; both are metadata
    for provenance and serialization.
    """

    n_elements: int
    wavelength: float
    positions: np.ndarray
    sigma: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", positions)
        if self.n_elements < 2:
            raise ValueError("need at least two elements")
        if positions.shape != (self.n_elements,):
            raise ValueError(
                f"positions has shape {positions.shape}, expected ({self.n_elements},)"
            )
        if not np.all(np.isfinite(positions)):
            raise ValueError("positions must be finite")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if np.any(np.diff(positions) <= 0):
            raise ValueError("positions must be strictly increasing")
        offsets = np.abs(self.perturbations) / self.wavelength
        if np.any(offsets >= _PERTURBATION_REJECT):
            raise ValueError(
                "element offsets reach half a wavelength; ordering versus the "
                "reference layout is no longer meaningful"
            )
        if np.any(offsets > _PERTURBATION_WARN):
            warnings.warn(
                "element offsets exceed a quarter wavelength; the layout is "
                "legal but close to violating element ordering",
                UserWarning,
                stacklevel=2,
            )
        positions.flags.writeable = False

    @property
    def reference_positions(self) -> np.ndarray:
        """Half-wavelength grid n * wavelength / 2 (same length unit)."""
        return np.arange(self.n_elements) * (self.wavelength / 2.0)

    @property
    def perturbations(self) -> np.ndarray:
        return self.positions - self.reference_positions

    def steering(self, thetas_deg, reference: bool = False) -> np.ndarray:
        """Steering matrix for this layout (or its reference layout)."""
        if reference:
            return ula_steering(self.n_elements, thetas_deg)
        return steering_matrix(thetas_deg, self.positions, self.wavelength)

    def to_dict(self) -> dict:
        return {
            "n_elements": int(self.n_elements),
            "wavelength": float(self.wavelength),
            "positions": [float(p) for p in self.positions],
            "seed": None if self.seed is None else int(self.seed),
            "sigma": float(self.sigma),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ArrayGeometry":
        try:
            return cls(
                n_elements=int(data["n_elements"]),
                wavelength=float(data["wavelength"]),
                positions=np.asarray(data["positions"], dtype=float),
                sigma=float(data.get("sigma", 0.0)),
                seed=data.get("seed"),
            )
        except KeyError as exc:
            raise ValueError(f"geometry record is missing field {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ArrayGeometry":
        return cls.from_dict(json.loads(text))


def make_nulra(n_elements: int, wavelength: float, sigma: float,
               seed: int | None = None, max_redraws: int = 100) -> ArrayGeometry:
    """Draw a non-uniform linear array around the half-wavelength grid.

    Element n sits at ``n * wavelength/2 + e_n`` with
    ``e_n ~ N(0, (sigma * wavelength)^2)``, drawn independently per
    element.  A draw that would break strict left-to-right ordering (or
    put an element half a wavelength off its slot) is rejected and
    redrawn, up to ``max_redraws`` times per element; for the sigma
    values of interest (<= 0.1) redraws are essentially never needed, so
    the marginal distribution is unaffected.

    The standard normal draw is scaled by ``sigma * wavelength``
    afterwards, so two layouts built from the same seed but different
    sigma share the same underlying perturbation direction.
    """
    if n_elements < 2:
        raise ValueError("need at least two elements")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    positions = np.empty(n_elements, dtype=float)
    previous = -np.inf
    bound = _PERTURBATION_REJECT * wavelength
    for n in range(n_elements):
        base = n * wavelength / 2.0
        for _ in range(max_redraws):
            offset = sigma * wavelength * rng.standard_normal()
            candidate = base + offset
            if candidate > previous and abs(offset) < bound:
                break
        else:
            raise ValueError(
                f"could not place element {n} after {max_redraws} draws; "
                f"sigma={sigma} is too large for an ordered layout"
            )
        positions[n] = candidate
        previous = candidate
    # Every draw was checked against the ordering/offset bounds above, so
    # the construction-time "close to reordering" warning is pure noise here
    # (at sigma = 0.1 roughly one layout in five trips it).
    with warnings.catch_warnings():
        warnings.filterwarnings(
            "ignore", message="element offsets exceed a quarter wavelength"
        )
        return ArrayGeometry(
            n_elements=n_elements,
            wavelength=wavelength,
            positions=positions,
            sigma=sigma,
            seed=seed,
        )


@dataclass(frozen=True)
class TransformationMatrix:
    """Least-squares map T with T a(theta, reference) ~= a(theta, actual).

    ``fit_residual`` is the relative Frobenius residual
    ||T A_ref - A_actual||_F / ||A_actual||_F over the fit grid.
    """

    t: np.ndarray
    fit_grid_deg: np.ndarray
    fit_residual: float

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        object.__setattr__(self, "t", t)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError(f"transformation must be square, got {t.shape}")
        if not (np.isfinite(self.fit_residual) and self.fit_residual >= 0):
            raise ValueError("fit residual must be finite and non-negative")

    @property
    def n_elements(self) -> int:
        return self.t.shape[0]

    def identity_distance(self) -> float:
        """Frobenius distance to the identity; 0 for an unperturbed layout."""
        return float(np.linalg.norm(self.t - np.eye(self.n_elements)))


def _default_fit_grid(n_points: int, uniform_in: str) -> np.ndarray:
    if uniform_in == "angle":
        return np.linspace(-_DEFAULT_FIT_SPAN_DEG, _DEFAULT_FIT_SPAN_DEG, n_points)
    if uniform_in == "sine":
        sines = np.linspace(np.sin(np.radians(-_DEFAULT_FIT_SPAN_DEG)),
                            np.sin(np.radians(_DEFAULT_FIT_SPAN_DEG)), n_points)
        return np.degrees(np.arcsin(sines))
    raise ValueError("uniform_in must be 'angle' or 'sine'")


def compute_transformation(geometry: ArrayGeometry, fit_grid_deg=None,
                           n_points: int = _DEFAULT_FIT_POINTS,
                           uniform_in: str = "angle") -> TransformationMatrix:
    """Fit the reference-to-actual manifold map over a dense angle grid.

    Solves ``min_T ||T A(grid, reference) - A(grid, actual)||_F`` row by
    row.  The grid is a geometry-only choice (default: 181 angles
    uniform over [-89, 89] degrees), so T can be precomputed once per
    layout without knowing the target directions.  The grid must contain
    at least as many distinct angles as elements, otherwise the fit is
    underdetermined (see :func:`fit_transformation_at` for the
    known-directions diagnostic variant).
    """
    if fit_grid_deg is None:
        grid = _default_fit_grid(n_points, uniform_in)
    else:
        grid = np.atleast_1d(np.asarray(fit_grid_deg, dtype=float))
    _check_angles(grid)
    n = geometry.n_elements
    if np.unique(grid).size < n:
        raise ValueError(
            f"fit grid needs at least {n} distinct angles, got {np.unique(grid).size}"
        )
    a_ref = ula_steering(n, grid)
    a_act = geometry.steering(grid)
    cond = np.linalg.cond(a_ref)
    if cond > 1e10:
        warnings.warn(
            f"reference manifold is ill conditioned on this grid (cond={cond:.2e})",
            ConditioningWarning,
            stacklevel=2,
        )
    # (T A_ref)^H = A_ref^H T^H : one least-squares solve per row of T.
    t = least_squares(a_ref.conj().T, a_act.conj().T).conj().T
    residual = np.linalg.norm(t @ a_ref - a_act) / np.linalg.norm(a_act)
    return TransformationMatrix(t=t, fit_grid_deg=grid, fit_residual=float(residual))


def fit_transformation_at(geometry: ArrayGeometry, thetas_deg) -> TransformationMatrix:
    """Diagnostic fit of the manifold map at known directions only.

    With fewer directions than elements the system is underdetermined
    and the minimum-norm solution is returned.  Useful for probing how
    much the dense-grid fit loses against a map matched to the true
    directions; not used by the estimator itself.
    """
    grid = np.atleast_1d(np.asarray(thetas_deg, dtype=float))
    _check_angles(grid)
    n = geometry.n_elements
    a_ref = ula_steering(n, grid)
    a_act = geometry.steering(grid)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        t = least_squares(a_ref.conj().T, a_act.conj().T).conj().T
    residual = np.linalg.norm(t @ a_ref - a_act) / np.linalg.norm(a_act)
    return TransformationMatrix(t=t, fit_grid_deg=grid, fit_residual=float(residual))
