"""Independent reference implementations used to cross-check the library.

Everything in this module is deliberately simple and slow: direct
formula evaluation, brute-force enumeration, or first-order methods run
for a very long time.  Nothing here calls into the code paths it is
meant to check -- steering vectors, array responses and projections are
recomputed from scratch so that agreement between a test subject and
its oracle is meaningful.
"""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np

try:
    import mpmath
except ImportError:  # pragma: no cover - optional, tests skip without it
    mpmath = None


# ---------------------------------------------------------------------------
# geometry / signal model
# ---------------------------------------------------------------------------

def steering_vector_mpmath(theta_deg, positions, wavelength, dps=50):
    """Steering vector evaluated in ``dps``-digit arithmetic.

    Returns a complex128 array rounded from the extended-precision
    values, suitable for comparing against double-precision code at
    ~1e-15 tolerances without worrying about the oracle's own rounding.
    """
    if mpmath is None:  # pragma: no cover
        raise RuntimeError("mpmath unavailable")
    with mpmath.workdps(dps):
        theta = mpmath.mpf(str(float(theta_deg))) * mpmath.pi / 180
        s = mpmath.sin(theta)
        out = []
        for p in positions:
            phase = 2 * mpmath.pi * mpmath.mpf(str(float(p))) * s \
                / mpmath.mpf(str(float(wavelength)))
            val = mpmath.expjpi(phase / mpmath.pi)
            out.append(complex(val.real, val.imag))
    return np.asarray(out, dtype=complex)


def double_sum_received(positions, wavelength, b, alpha_deg, thetas_deg, gains):
    """Elementwise double-sum synthesis of the noiseless snapshot vector.

    r_m = sum_k s_k * sum_n B[m, n] * e^{j 2 pi p_n (sin alpha + sin theta_k) / lambda}

    computed with scalar Python arithmetic, one term at a time.
    """
    b = np.asarray(b)
    m_count, n_count = b.shape
    alpha = math.radians(float(alpha_deg))
    out = np.zeros(m_count, dtype=complex)
    for m in range(m_count):
        acc = 0j
        for k, theta in enumerate(thetas_deg):
            sines = math.sin(alpha) + math.sin(math.radians(float(theta)))
            for n in range(n_count):
                phase = 2.0 * math.pi * float(positions[n]) * sines / float(wavelength)
                acc += complex(gains[k]) * complex(b[m, n]) * cmath.exp(1j * phase)
        out[m] = acc
    return out


def kron_vec_transformation(a_ref, a_act):
    """Manifold map via the explicit vec/Kronecker least-squares system.

    Solves (A_ref^T kron I_N) vec(T) = vec(A_act) with column-major vec,
    then unstacks.  Only usable for small N (the system is N*G x N^2).
    """
    a_ref = np.asarray(a_ref, dtype=complex)
    a_act = np.asarray(a_act, dtype=complex)
    n = a_ref.shape[0]
    system = np.kron(a_ref.T, np.eye(n, dtype=complex))
    t_vec, *_ = np.linalg.lstsq(system, a_act.flatten(order="F"), rcond=None)
    return t_vec.reshape((n, n), order="F")


# ---------------------------------------------------------------------------
# dense linear algebra
# ---------------------------------------------------------------------------

def hermitian_2x2_eigenvalues(h):
    """Characteristic-polynomial roots of a 2x2 Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    a = float(h[0, 0].real)
    d = float(h[1, 1].real)
    b = complex(h[0, 1])
    half_trace = 0.5 * (a + d)
    det = a * d - abs(b) ** 2
    disc = math.sqrt(max(half_trace * half_trace - det, 0.0))
    return half_trace + disc, half_trace - disc


def psd_nearest_bruteforce(h):
    """Frobenius-nearest PSD matrix by enumerating eigenvalue clippings.

    Every candidate keeps or zeroes each eigenvalue of the symmetrized
    input; non-PSD candidates are discarded and the closest survivor is
    returned.  Exponential in the matrix size -- keep it tiny.
    """
    h = np.asarray(h, dtype=complex)
    hs = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(hs)
    best = None
    best_dist = math.inf
    for mask in itertools.product((0.0, 1.0), repeat=w.size):
        lam = w * np.asarray(mask)
        if np.any(lam < 0.0):
            continue
        candidate = (v * lam) @ v.conj().T
        dist = float(np.linalg.norm(hs - candidate))
        if dist < best_dist:
            best_dist = dist
            best = candidate
    return best


def normal_equations_solve(a, b):
    """Least squares through the explicit normal equations (A^H A)^-1 A^H b."""
    a = np.asarray(a, dtype=complex)
    gram = a.conj().T @ a
    return np.linalg.inv(gram) @ (a.conj().T @ np.asarray(b, dtype=complex))


# ---------------------------------------------------------------------------
# regularized dual-ball projection (the SDP's equivalent form)
# ---------------------------------------------------------------------------

def _reference_manifold(n_elements, n_grid):
    """exp(j pi n sin(theta)) manifold on a uniform angle grid, built inline."""
    grid = -90.0 + np.arange(1, n_grid + 1) * (180.0 / n_grid)
    sines = np.sin(np.radians(grid))
    return np.exp(1j * np.pi * np.outer(np.arange(n_elements), sines))


def subgradient_ball_solver(r, d, gamma, n_iter=1_000_000, n_grid=4096):
    """Slow-but-sure solver for min 0.5||r - z||^2 s.t. sup|a^H D z| <= gamma.

    The dual-norm constraint is enforced on a dense angle grid.  A
    switching subgradient method alternates Polyak projection steps onto
    the most-violated halfspace with 1/k gradient steps on the strongly
    convex objective; the best feasible iterate is tracked and returned
    as (objective, z).
    """
    r = np.asarray(r, dtype=complex).ravel()
    d = np.asarray(d, dtype=complex)
    rows = _reference_manifold(d.shape[0], n_grid).conj().T @ d  # grid x M
    row_sq = np.einsum("ij,ij->i", rows, rows.conj()).real
    z = np.zeros(r.size, dtype=complex)
    best = math.inf
    z_best = z.copy()
    k_obj = 0
    for _ in range(n_iter):
        w = rows @ z
        aw = np.abs(w)
        i = int(np.argmax(aw))
        violation = aw[i] - gamma
        if violation > 0.0:
            z = z - (violation / row_sq[i]) * (w[i] / aw[i]) * rows[i].conj()
        else:
            f = 0.5 * float(np.linalg.norm(r - z) ** 2)
            if f < best:
                best = f
                z_best = z.copy()
            k_obj += 1
            z = z - (1.0 / k_obj) * (z - r)
    return best, z_best
