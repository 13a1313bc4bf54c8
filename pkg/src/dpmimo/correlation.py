"""Spatial correlation and polarization structure.

The BS array is a uniform linear array of dual-polarized elements; each
element exposes a vertical and a horizontal port, interleaved in the
port ordering (1V, 1H, 2V, 2H, ...). Spatial correlation acts on the
element index only and is identical for both polarizations, so the full
port-level covariance is a Kronecker product R_bs kron I_2.

Imperfect antenna XPD leaks a fraction q of each transmitted
polarization into the orthogonal one. The per-port polarization
weighting is diagonal in the port basis, which gives the closed
Kronecker forms used below.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import DimensionMismatch, GeometryInfeasible
from .linalg import hermitian_psd_sqrt, symmetrize


@dataclass(frozen=True)
class XPDSpec:
    """Cross-polar discrimination: q is the leaked power fraction."""

    xpd_db: float
    q: float


def xpd_from_db(xpd_db):
    """Map an XPD value in dB to the leakage fraction q in [0, 1/2].

    XPD = (1 - q) / q, so q = 1 / (1 + 10^(xpd_db / 10)); +inf dB means
    ideal ports with no leakage.
    """
    if np.isinf(xpd_db) and xpd_db > 0:
        return XPDSpec(xpd_db=float(xpd_db), q=0.0)
    q = 1.0 / (1.0 + 10.0 ** (xpd_db / 10.0))
    return XPDSpec(xpd_db=float(xpd_db), q=float(q))


def local_scattering_cov(n_antennas, beta, cluster_angles, asd_deg=5.0):
    """Per-element spatial covariance for a half-wavelength ULA.

    Gaussian local scattering: each cluster contributes a ray at its
    nominal angle with a small Gaussian angular spread, and the entries
    depend only on the antenna index difference, so the matrix is
    Hermitian Toeplitz.
    """
    angles = np.asarray(cluster_angles, dtype=float)
    if angles.size == 0:
        raise GeometryInfeasible("at least one scattering cluster required")
    sigma_phi = np.deg2rad(asd_deg)
    gaps = np.arange(n_antennas)
    # (n_antennas, n_clusters) phase and spread terms per index gap
    arg = np.pi * gaps[:, None] * np.sin(angles)[None, :]
    damp = -0.5 * (sigma_phi * np.pi * gaps[:, None] * np.cos(angles)[None, :]) ** 2
    col = (beta / angles.size) * np.sum(np.exp(1j * arg + damp), axis=1)
    return symmetrize(toeplitz(col))


@dataclass(frozen=True)
class CorrelationSet:
    """Port-level covariances for one UE at a given XPD.

    r_full is the covariance of either polarization's channel before
    polarization weighting; r_v and r_h are the covariances of the
    channels observed at the UE's V and H ports. sqrt_r is the Hermitian
    PSD square root of r_full used by the channel sampler.
    """

    r_bs: np.ndarray
    r_full: np.ndarray
    r_v: np.ndarray
    r_h: np.ndarray
    sqrt_r: np.ndarray
    xpd: XPDSpec


def build_correlation_set(r_bs, xpd):
    """Expand a per-element covariance to the dual-polarized port level."""
    r_bs = np.asarray(r_bs, dtype=np.complex128)
    if r_bs.ndim != 2 or r_bs.shape[0] != r_bs.shape[1]:
        raise DimensionMismatch(f"r_bs must be square, got {r_bs.shape}")
    sqrt_bs = hermitian_psd_sqrt(r_bs)
    eye2 = np.eye(2)
    r_full = np.kron(r_bs, eye2)
    sqrt_r = np.kron(sqrt_bs.factor, eye2)
    d_v = np.diag([1.0 - xpd.q, xpd.q])
    d_h = np.diag([xpd.q, 1.0 - xpd.q])
    r_v = np.kron(r_bs, d_v)
    r_h = np.kron(r_bs, d_h)
    return CorrelationSet(
        r_bs=r_bs, r_full=r_full, r_v=r_v, r_h=r_h, sqrt_r=sqrt_r, xpd=xpd
    )


def polarized_covariances_via_sqrt(r_full, sqrt_r, q):
    """Definitional construction of (r_v, r_h) from the square root.

    Slow path kept for validation: applies the per-port polarization
    weights to the square-root factor and forms the covariances
    explicitly. Matches the Kronecker shortcut in build_correlation_set.
    """
    m = r_full.shape[0]
    if m % 2 != 0:
        raise DimensionMismatch(f"port count {m} must be even")
    w_v = np.tile([1.0 - q, q], m // 2)
    w_h = np.tile([q, 1.0 - q], m // 2)
    r_v = symmetrize((sqrt_r * w_v) @ sqrt_r.conj().T)
    r_h = symmetrize((sqrt_r * w_h) @ sqrt_r.conj().T)
    return r_v, r_h
