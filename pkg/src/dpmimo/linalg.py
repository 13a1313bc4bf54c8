"""Hermitian linear algebra used throughout the simulator.

Covariance matrices in this codebase are Hermitian positive semidefinite
by construction but accumulate roundoff, so every consumer goes through
the guarded primitives below instead of raw numpy calls.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatch, NotHermitian, NotPSD, Singular

# relative tolerances, in units of the spectral / Frobenius norm
HERMITIAN_RTOL = 1e-10
PSD_RTOL = 1e-10
SOLVE_RTOL = 1e-14


def check_hermitian(a, rtol=HERMITIAN_RTOL):
    """Raise NotHermitian if a is not square Hermitian within rtol."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a, 2)
    if scale == 0.0:
        return
    dev = np.linalg.norm(a - a.conj().T, 2)
    if dev > rtol * scale:
        raise NotHermitian(
            f"relative deviation from Hermitian symmetry {dev / scale:.3e} "
            f"exceeds {rtol:.1e}"
        )


def symmetrize(a):
    """Return (a + a^H)/2, removing roundoff-level asymmetry."""
    return 0.5 * (a + np.conj(a.swapaxes(-2, -1)))


@dataclass(frozen=True)
class HermitianFactor:
    """Result of a PSD square root: base = factor @ factor^H.

    eigen_floor records the most negative eigenvalue that was clamped
    to zero, for diagnostics; it is 0.0 when the input was numerically PSD.
    """

    base: np.ndarray
    factor: np.ndarray
    eigen_floor: float


def hermitian_psd_sqrt(a, rtol=PSD_RTOL, scale=None):
    """Unique Hermitian PSD square root of a Hermitian PSD matrix.

    Eigenvalues in [-rtol * lambda_max, 0) are treated as roundoff and
    clamped to zero; anything more negative raises NotPSD. For matrices
    formed by cancellation (e.g. a difference of two covariances that
    nearly coincide), lambda_max itself sits at the roundoff floor, so
    callers pass the norm of the parent matrices as `scale` and the
    clamp window becomes rtol * max(lambda_max, scale).
    """
    a = np.asarray(a, dtype=np.complex128)
    check_hermitian(a)
    w, u = np.linalg.eigh(a)
    lam_max = float(w[-1]) if w.size else 0.0
    ref = lam_max if scale is None else max(lam_max, float(scale))
    if lam_max < -rtol * ref:
        raise NotPSD(f"largest eigenvalue {lam_max:.3e} is negative")
    floor = min(float(w[0]), 0.0)
    if ref > 0.0 and floor < -rtol * ref:
        raise NotPSD(
            f"eigenvalue {floor:.3e} below tolerance {-rtol * ref:.3e}"
        )
    w_clamped = np.maximum(w, 0.0)
    b = (u * np.sqrt(w_clamped)) @ u.conj().T
    return HermitianFactor(base=a, factor=symmetrize(b), eigen_floor=floor)


def hermitian_solve(a, b):
    """Solve a @ x = b for Hermitian positive definite a via Cholesky.

    Raises Singular when the factorization fails or the smallest pivot
    indicates the system is numerically indefinite.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    check_hermitian(a)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"rhs has leading dimension {b.shape[0]}, matrix is {a.shape[0]}"
        )
    try:
        c, lower = cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise Singular(str(exc)) from exc
    min_pivot = float(np.min(np.abs(np.diag(c))))
    scale = np.linalg.norm(a, "fro")
    if scale > 0.0 and min_pivot**2 < SOLVE_RTOL * scale:
        raise Singular(
            f"pivot {min_pivot:.3e} too small relative to norm {scale:.3e}"
        )
    return cho_solve((c, lower), b, check_finite=False)


def trace_product(a, b):
    """tr(a @ b) without forming the product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise DimensionMismatch(f"cannot trace product of {a.shape} and {b.shape}")
    return complex(np.einsum("ij,ji->", a, b))


def sample_standard_complex_gaussian(rng, shape):
    """Draw i.i.d. CN(0, 1) entries, unit variance split between re/im."""
    z = rng.standard_normal((2,) + tuple(shape))
    return (z[0] + 1j * z[1]) * np.sqrt(0.5)
