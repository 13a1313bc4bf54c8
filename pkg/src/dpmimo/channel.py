"""Channel realization sampling for dual- and uni-polarized arrays."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientSamples
from .linalg import sample_standard_complex_gaussian


@dataclass(frozen=True)
class DualPolChannel:
    """One realization seen from one UE: rows are the UE's V and H ports."""

    h_v: np.ndarray   # (m_ports,) channel to the UE V port
    h_h: np.ndarray   # (m_ports,) channel to the UE H port

    @property
    def matrix(self):
        """(2, m_ports) stacked form."""
        return np.stack([self.h_v, self.h_h])


@dataclass(frozen=True)
class UniPolChannel:
    """One realization for a co-polarized baseline array."""

    h: np.ndarray     # (n_antennas,)


def _polarization_scales(m_ports, q):
    """Per-port standard deviations for the V-port channel, interleaved."""
    if m_ports % 2 != 0:
        raise DimensionMismatch(f"port count {m_ports} must be even")
    scale_v = np.sqrt(np.tile([1.0 - q, q], m_ports // 2))
    scale_h = np.sqrt(np.tile([q, 1.0 - q], m_ports // 2))
    return scale_v, scale_h


def sample_dual_channels(corr, n, rng):
    """Draw n i.i.d. dual-polarized realizations for one UE.

    Returns (h_v, h_h) arrays of shape (n, m_ports). The inner Gaussian
    has independent entries weighted per port by the XPD leakage before
    spatial coloring, so co- and cross-polar components stay independent.
    """
    m = corr.r_full.shape[0]
    scale_v, scale_h = _polarization_scales(m, corr.xpd.q)
    s_v = sample_standard_complex_gaussian(rng, (n, m)) * scale_v
    s_h = sample_standard_complex_gaussian(rng, (n, m)) * scale_h
    # h = B s as rows: (S @ B.T) row i equals B @ s_i
    h_v = s_v @ corr.sqrt_r.T
    h_h = s_h @ corr.sqrt_r.T
    return h_v, h_h


def sample_dual_channel(corr, rng):
    """Single-realization convenience wrapper."""
    h_v, h_h = sample_dual_channels(corr, 1, rng)
    return DualPolChannel(h_v=h_v[0], h_h=h_h[0])


def sample_uni_channels(r_sqrt_factor, n, rng):
    """Draw n correlated realizations for a uni-polarized array."""
    m = r_sqrt_factor.shape[0]
    s = sample_standard_complex_gaussian(rng, (n, m))
    return s @ r_sqrt_factor.T


def sample_uni_channel(r_sqrt_factor, rng):
    return UniPolChannel(h=sample_uni_channels(r_sqrt_factor, 1, rng)[0])


def empirical_xpd(h_v, h_h, m_ports=None):
    """Estimate the XPD in dB from channel samples.

    Ratio of average co-polar to cross-polar received power, pooling the
    V-port and H-port channels. h_v, h_h have shape (n, m_ports).
    """
    h_v = np.atleast_2d(h_v)
    h_h = np.atleast_2d(h_h)
    if h_v.shape != h_h.shape:
        raise DimensionMismatch(f"shape mismatch {h_v.shape} vs {h_h.shape}")
    n, m = h_v.shape
    if m_ports is not None and m != m_ports:
        raise DimensionMismatch(f"expected {m_ports} ports, got {m}")
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    v_slots = np.arange(0, m, 2)
    h_slots = np.arange(1, m, 2)
    co = np.sum(np.abs(h_v[:, v_slots]) ** 2) + np.sum(np.abs(h_h[:, h_slots]) ** 2)
    cross = np.sum(np.abs(h_v[:, h_slots]) ** 2) + np.sum(np.abs(h_h[:, v_slots]) ** 2)
    if cross == 0.0:
        return np.inf
    return 10.0 * np.log10(co / cross)
