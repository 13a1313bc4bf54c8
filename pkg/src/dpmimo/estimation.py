"""Pilot transmission synthesis and MMSE channel estimation.

Uplink pilots occupy tau_p = 2K symbols; UE k transmits on two mutually
orthogonal pilot sequences, one per polarization port. The BS despreads
the received block with the UE's sequences and applies the per-port
linear MMSE filter. Estimates and errors are jointly Gaussian and
independent, which permits a second, much cheaper sampling path that
draws them directly from their covariances; both paths are exposed and
their equivalence is a tested contract.
"""

from dataclasses import dataclass

import numpy as np

from .channel import DualPolChannel, sample_dual_channels, sample_uni_channels
from .errors import DimensionMismatch, PilotBudgetExceeded
from .linalg import (
    hermitian_psd_sqrt,
    hermitian_solve,
    sample_standard_complex_gaussian,
    symmetrize,
)


@dataclass(frozen=True)
class PilotBook:
    """Orthogonal pilot assignment for K dual-polarized UEs.

    v holds tau_p mutually orthogonal columns with squared norm tau_p;
    UE k owns columns 2k and 2k+1 (V and H port, in that order).
    pilot_powers[k] = (p_v, p_h) in mW.
    """

    tau_p: int
    v: np.ndarray
    pilot_powers: tuple


def build_pilot_book(k, powers, tau_c, tau_p=None):
    """Assemble the pilot book for k UEs inside a tau_c-symbol block.

    The sequences are columns of the unnormalized tau_p-point DFT
    matrix, which satisfies Vᴴ V = tau_p I. tau_p defaults to the
    minimum 2k.
    """
    if tau_p is None:
        tau_p = 2 * k
    if tau_p > tau_c:
        raise PilotBudgetExceeded(
            f"{tau_p} pilot symbols exceed the block length {tau_c}"
        )
    if tau_p < 2 * k:
        raise PilotBudgetExceeded(
            f"{2 * k} orthogonal pilots do not fit in {tau_p} symbols"
        )
    powers = tuple((float(pv), float(ph)) for pv, ph in powers)
    if len(powers) != k:
        raise DimensionMismatch(f"expected {k} power pairs, got {len(powers)}")
    n = np.arange(tau_p)
    v = np.exp(-2j * np.pi * np.outer(n, n) / tau_p)
    return PilotBook(tau_p=tau_p, v=v, pilot_powers=powers)


def ue_pilot(book, k):
    """Pilot signal of UE k: a 2 x tau_p block, one row per port."""
    p_v, p_h = book.pilot_powers[k]
    v_k = book.v[:, 2 * k : 2 * k + 2]
    return np.sqrt(np.diag([p_v, p_h])) @ v_k.T


def process_pilots(channels, book, noise_var, rng):
    """Synthesize one uplink pilot block and despread it per UE.

    channels is the list of K DualPolChannel realizations. Returns a
    list of (y_v, y_h) despread columns; y_v = tau_p sqrt(p_v) h_v plus
    noise with covariance sigma^2 tau_p I.
    """
    k = len(channels)
    m = channels[0].h_v.shape[0]
    y = np.zeros((m, book.tau_p), dtype=np.complex128)
    for l in range(k):
        p_v, p_h = book.pilot_powers[l]
        y += np.sqrt(p_v) * np.outer(channels[l].h_v, book.v[:, 2 * l])
        y += np.sqrt(p_h) * np.outer(channels[l].h_h, book.v[:, 2 * l + 1])
    y += sample_standard_complex_gaussian(rng, (m, book.tau_p)) * np.sqrt(noise_var)
    out = []
    for l in range(k):
        y_l = y @ np.conj(book.v[:, 2 * l : 2 * l + 2])
        out.append((y_l[:, 0], y_l[:, 1]))
    return out


@dataclass(frozen=True)
class EstimationStatistics:
    """Second-order description of the MMSE estimator for one UE.

    filter_v maps a despread V-port column to the estimate; gamma_v is
    the estimate covariance, c_v the error covariance, and the traces
    are cached because the MR normalization divides by them.
    """

    gamma_v: np.ndarray
    gamma_h: np.ndarray
    c_v: np.ndarray
    c_h: np.ndarray
    filter_v: np.ndarray
    filter_h: np.ndarray
    trace_gamma_v: float
    trace_gamma_h: float


def _per_port_statistics(r, p, tau_p, noise_var):
    m = r.shape[0]
    # psi_r = (p tau_p R + sigma^2 I)^{-1} R, shared by filter and Gamma
    a = p * tau_p * r + noise_var * np.eye(m)
    psi_r = hermitian_solve(a, r)
    filt = np.sqrt(p) * psi_r.conj().T
    gamma = symmetrize(p * tau_p * (psi_r.conj().T @ r))
    c = symmetrize(r - gamma)
    return gamma, c, filt


def estimation_statistics(corr, p_v, p_h, tau_p, noise_var):
    """Gamma, error covariance, and MMSE filter for both ports of one UE."""
    gamma_v, c_v, filter_v = _per_port_statistics(corr.r_v, p_v, tau_p, noise_var)
    gamma_h, c_h, filter_h = _per_port_statistics(corr.r_h, p_h, tau_p, noise_var)
    return EstimationStatistics(
        gamma_v=gamma_v,
        gamma_h=gamma_h,
        c_v=c_v,
        c_h=c_h,
        filter_v=filter_v,
        filter_h=filter_h,
        trace_gamma_v=float(np.trace(gamma_v).real),
        trace_gamma_h=float(np.trace(gamma_h).real),
    )


@dataclass(frozen=True)
class ChannelEstimate:
    """MMSE estimate pair for one UE with its covariance bookkeeping."""

    hhat_v: np.ndarray
    hhat_h: np.ndarray
    stats: EstimationStatistics

    @property
    def gamma_v(self):
        return self.stats.gamma_v

    @property
    def gamma_h(self):
        return self.stats.gamma_h

    @property
    def c_v(self):
        return self.stats.c_v

    @property
    def c_h(self):
        return self.stats.c_h


def mmse_estimate(y_v, y_h, corr, p_v, p_h, tau_p, noise_var, stats=None):
    """Linear MMSE estimate from one despread pilot pair.

    The estimate is sqrt(p) R_v (p tau_p R_v + sigma^2 I)^{-1} y_v per
    port. Pass precomputed stats to skip the solve.
    """
    if stats is None:
        stats = estimation_statistics(corr, p_v, p_h, tau_p, noise_var)
    return ChannelEstimate(
        hhat_v=stats.filter_v @ y_v,
        hhat_h=stats.filter_h @ y_h,
        stats=stats,
    )


def sample_estimate_directly(stats, rng):
    """Draw (estimate, true channel) from the estimator's statistics.

    Estimates and errors are independent zero-mean Gaussians with
    covariances Gamma and C; the true channel is their sum. Returns
    (ChannelEstimate, DualPolChannel).
    """
    m = stats.gamma_v.shape[0]
    # Gamma and C are complementary pieces of R; near-perfect or
    # near-useless estimation drives one of them to the roundoff floor
    # of the other, so the PSD clamp is referenced to tr(R_v).
    scale = float(np.trace(stats.gamma_v).real + np.trace(stats.c_v).real)
    factors = [
        hermitian_psd_sqrt(a, scale=scale).factor
        for a in (stats.gamma_v, stats.gamma_h, stats.c_v, stats.c_h)
    ]
    draws = [
        f @ sample_standard_complex_gaussian(rng, (m,)) for f in factors
    ]
    hhat_v, hhat_h, e_v, e_h = draws
    est = ChannelEstimate(hhat_v=hhat_v, hhat_h=hhat_h, stats=stats)
    truth = DualPolChannel(h_v=hhat_v + e_v, h_h=hhat_h + e_h)
    return est, truth


def direct_joint_sampler(stats_list):
    """Batched sampler of (true, estimated) channels for all UEs.

    Returns draw(n, rng) -> (h_true, h_hat), each of shape (n, 2K, M)
    with row 2k holding UE k's V-port channel as a conjugated row
    vector (hᴴ) and row 2k+1 the H port, ready for downlink products
    h_true @ W. The per-UE draw order is fixed (estimate V, estimate H,
    error V, error H) so results are reproducible for a given stream.
    """
    k = len(stats_list)
    m = stats_list[0].gamma_v.shape[0]
    scales = [
        float(np.trace(s.gamma_v).real + np.trace(s.c_v).real)
        for s in stats_list
    ]
    factors = [
        (
            hermitian_psd_sqrt(s.gamma_v, scale=sc).factor,
            hermitian_psd_sqrt(s.gamma_h, scale=sc).factor,
            hermitian_psd_sqrt(s.c_v, scale=sc).factor,
            hermitian_psd_sqrt(s.c_h, scale=sc).factor,
        )
        for s, sc in zip(stats_list, scales)
    ]

    def draw(n, rng):
        h_true = np.empty((n, 2 * k, m), dtype=np.complex128)
        h_hat = np.empty((n, 2 * k, m), dtype=np.complex128)
        for i, (fg_v, fg_h, fc_v, fc_h) in enumerate(factors):
            hhat_v = sample_standard_complex_gaussian(rng, (n, m)) @ fg_v.T
            hhat_h = sample_standard_complex_gaussian(rng, (n, m)) @ fg_h.T
            e_v = sample_standard_complex_gaussian(rng, (n, m)) @ fc_v.T
            e_h = sample_standard_complex_gaussian(rng, (n, m)) @ fc_h.T
            h_hat[:, 2 * i] = np.conj(hhat_v)
            h_hat[:, 2 * i + 1] = np.conj(hhat_h)
            h_true[:, 2 * i] = np.conj(hhat_v + e_v)
            h_true[:, 2 * i + 1] = np.conj(hhat_h + e_h)
        return h_true, h_hat

    return draw


def end_to_end_joint_sampler(corr_sets, stats_list, book, noise_var):
    """Batched sampler running the full pilot chain per realization.

    Same interface and row convention as direct_joint_sampler, but each
    trial samples true channels, synthesizes the uplink pilot block,
    despreads, and filters. Used to validate the direct path.
    """
    k = len(corr_sets)
    m = corr_sets[0].r_full.shape[0]

    def draw(n, rng):
        h_v_all = np.empty((k, n, m), dtype=np.complex128)
        h_h_all = np.empty((k, n, m), dtype=np.complex128)
        for l in range(k):
            h_v_all[l], h_h_all[l] = sample_dual_channels(corr_sets[l], n, rng)
        y = np.zeros((n, m, book.tau_p), dtype=np.complex128)
        for l in range(k):
            p_v, p_h = book.pilot_powers[l]
            y += np.sqrt(p_v) * h_v_all[l][:, :, None] * book.v[None, None, :, 2 * l]
            y += (
                np.sqrt(p_h)
                * h_h_all[l][:, :, None]
                * book.v[None, None, :, 2 * l + 1]
            )
        y += sample_standard_complex_gaussian(rng, (n, m, book.tau_p)) * np.sqrt(
            noise_var
        )
        h_true = np.empty((n, 2 * k, m), dtype=np.complex128)
        h_hat = np.empty((n, 2 * k, m), dtype=np.complex128)
        for l in range(k):
            y_l = y @ np.conj(book.v[:, 2 * l : 2 * l + 2])
            hhat_v = y_l[:, :, 0] @ stats_list[l].filter_v.T
            hhat_h = y_l[:, :, 1] @ stats_list[l].filter_h.T
            h_hat[:, 2 * l] = np.conj(hhat_v)
            h_hat[:, 2 * l + 1] = np.conj(hhat_h)
            h_true[:, 2 * l] = np.conj(h_v_all[l])
            h_true[:, 2 * l + 1] = np.conj(h_h_all[l])
        return h_true, h_hat

    return draw


@dataclass(frozen=True)
class UniEstimationStatistics:
    """MMSE bookkeeping for one UE of the uni-polarized baseline."""

    r_bs: np.ndarray
    gamma: np.ndarray
    c: np.ndarray
    filter: np.ndarray
    trace_gamma: float


def uni_estimation_statistics(r_bs, p, tau_p, noise_var):
    """Estimator statistics for a co-polarized array with K pilots."""
    gamma, c, filt = _per_port_statistics(r_bs, p, tau_p, noise_var)
    return UniEstimationStatistics(
        r_bs=r_bs,
        gamma=gamma,
        c=c,
        filter=filt,
        trace_gamma=float(np.trace(gamma).real),
    )


def uni_direct_joint_sampler(stats_list):
    """Direct sampler for the uni-polarized baseline, rows are hᴴ."""
    k = len(stats_list)
    m = stats_list[0].gamma.shape[0]
    factors = [
        (
            hermitian_psd_sqrt(s.gamma, scale=float(np.trace(s.r_bs).real)).factor,
            hermitian_psd_sqrt(s.c, scale=float(np.trace(s.r_bs).real)).factor,
        )
        for s in stats_list
    ]

    def draw(n, rng):
        h_true = np.empty((n, k, m), dtype=np.complex128)
        h_hat = np.empty((n, k, m), dtype=np.complex128)
        for i, (fg, fc) in enumerate(factors):
            hhat = sample_standard_complex_gaussian(rng, (n, m)) @ fg.T
            e = sample_standard_complex_gaussian(rng, (n, m)) @ fc.T
            h_hat[:, i] = np.conj(hhat)
            h_true[:, i] = np.conj(hhat + e)
        return h_true, h_hat

    return draw
