"""Dense complex linear-algebra kernels shared by the whole package.

Every matrix handled here is small (tens of rows) and dense, so the
routines are thin, contract-checked wrappers around LAPACK via numpy:
the value they add is the tolerance policy, not the factorization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericOptions",
    "DEFAULT_OPTIONS",
    "DimensionError",
    "NumericError",
    "RankError",
    "ConditioningWarning",
    "hermitian_eig",
    "hermitian_eigenvalues",
    "psd_project",
    "least_squares",
]


class DimensionError(ValueError):
    """Input shape is incompatible with the requested operation."""


class NumericError(RuntimeError):
    """A numerical routine failed to meet its residual contract."""


class RankError(NumericError):
    """Matrix is rank deficient and the caller demanded full rank."""


class ConditioningWarning(UserWarning):
    """A problem is solvable but numerically suspect."""


@dataclass(frozen=True)
class NumericOptions:
    """Single record of tolerance knobs used by all kernels.

    hermitian_tol     relative slack allowed when symmetrizing input
    eig_residual_tol  reconstruction bound ||H - V diag(w) V^H||_F
                      <= eig_residual_tol * max(1, ||H||_F)
    max_condition     condition number above which a least-squares
                      system is treated as rank deficient
    """

    hermitian_tol: float = 1e-12
    eig_residual_tol: float = 1e-9
    max_condition: float = 1e12


DEFAULT_OPTIONS = NumericOptions()


def _as_square_matrix(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    return h


def hermitian_eig(h, options: NumericOptions = DEFAULT_OPTIONS):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (H + H^H)/2 before factorizing, so mild
    asymmetry from accumulated roundoff is tolerated.  Returns
    ``(eigenvalues, eigenvectors)`` with eigenvalues real and sorted
    descending and eigenvectors unitary (columns).  The reconstruction
    residual is verified against ``options.eig_residual_tol``.
    """
    h = _as_square_matrix(h)
    hs = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigendecomposition did not converge: {exc}") from exc
    w = w[::-1]
    v = v[:, ::-1]
    scale = max(1.0, np.linalg.norm(hs))
    residual = np.linalg.norm(hs - (v * w) @ v.conj().T)
    if residual > options.eig_residual_tol * scale:
        raise NumericError(
            f"eigendecomposition residual {residual:.3e} exceeds "
            f"{options.eig_residual_tol:.1e} * {scale:.3e}"
        )
    return w, v


def hermitian_eigenvalues(h) -> np.ndarray:
    """Eigenvalues only (descending), without the reconstruction check."""
    h = _as_square_matrix(h)
    hs = 0.5 * (h + h.conj().T)
    return np.linalg.eigvalsh(hs)[::-1]


def psd_project(h, options: NumericOptions = DEFAULT_OPTIONS) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix to ``(H + H^H)/2``.

    Negative eigenvalues are clipped to zero and the matrix is rebuilt;
    PSD inputs pass through unchanged up to symmetrization.
    """
    h = _as_square_matrix(h)
    w, v = hermitian_eig(h, options)
    if w[-1] >= 0.0:
        return 0.5 * (h + h.conj().T)
    x = (v * np.maximum(w, 0.0)) @ v.conj().T
    return 0.5 * (x + x.conj().T)


def least_squares(a, b, strict: bool = False,
                  options: NumericOptions = DEFAULT_OPTIONS) -> np.ndarray:
    """Solve ``min_x ||A x - b||_2`` for dense complex A.

    With a full-column-rank A (condition number below
    ``options.max_condition``) this is the unique least-squares solution;
    the residual is orthogonal to range(A).  Rank-deficient systems fall
    back to the minimum-norm solution and emit a :class:`ConditioningWarning`,
    or raise :class:`RankError` when ``strict`` is set.  ``b`` may have
    multiple right-hand-side columns.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d coefficient matrix, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}"
        )
    singular_values = np.linalg.svd(a, compute_uv=False)
    smallest = singular_values[-1] if singular_values.size else 0.0
    rank_ok = (
        a.shape[0] >= a.shape[1]
        and smallest > 0.0
        and singular_values[0] / smallest < options.max_condition
    )
    if not rank_ok:
        if strict:
            raise RankError(
                f"matrix of shape {a.shape} is rank deficient "
                f"(singular values {singular_values[0]:.3e} .. {smallest:.3e})"
            )
        warnings.warn(
            "least-squares system is rank deficient; returning the "
            "minimum-norm solution",
            ConditioningWarning,
            stacklevel=2,
        )
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x
