"""Downlink spectral efficiency: Monte Carlo bound and closed forms.

The generic route estimates the mean effective channel A_k = E{H_k W_k}
and the received power matrix B_k = E{H_k (sum_l W_l W_lᴴ) H_kᴴ} by
sample averaging, then evaluates

    SE_k = prelog * log2 det(I + A_kᴴ (B_k + sigma² I − A_k A_kᴴ)⁻¹ A_k).

For MR precoding normalized by tr(Gamma), the same bound collapses to a
trace-only closed form; both are implemented independently and their
agreement is part of the acceptance suite.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTrace,
    IndefiniteEffectiveNoise,
    InsufficientSamples,
    Singular,
)
from .linalg import hermitian_solve, symmetrize, trace_product

TRACE_FLOOR = 1e-30


@dataclass(frozen=True)
class SEReport:
    """Per-UE and sum SE with enough metadata to place the numbers."""

    per_ue_se: np.ndarray
    sum_se: float
    method: str
    prelog: float
    trials: int
    config_digest: str = ""
    stderr_per_ue: np.ndarray = None


def _report(per_ue, method, prelog, trials, config_digest="", stderr=None):
    per_ue = np.asarray(per_ue, dtype=float)
    return SEReport(
        per_ue_se=per_ue,
        sum_se=float(np.sum(per_ue)),
        method=method,
        prelog=prelog,
        trials=trials,
        config_digest=config_digest,
        stderr_per_ue=stderr,
    )


@dataclass(frozen=True)
class MonteCarloSpec:
    """Trial budget and stream seed for one Monte Carlo SE run."""

    trials: int
    seed: int
    batch: int = 500

    def __post_init__(self):
        if self.trials < 100:
            raise InsufficientSamples(
                f"{self.trials} trials cannot give a meaningful SE estimate"
            )


def _checked_trace(tg, rho):
    if rho > 0.0 and tg <= TRACE_FLOOR:
        raise DegenerateTrace(
            f"estimate covariance trace {tg:.3e} with power {rho} mW"
        )
    return tg


def closed_form_se_mr(corr_sets, stats_list, rho_v, rho_h, noise_var, prelog,
                      config_digest=""):
    """Trace-based SE of MR precoding from the estimator statistics.

    Per stream, the signal term is rho tr(Gamma) and every stream l
    (both polarizations, own UE included) contributes interference
    rho_l tr(Gamma_l R_k) / tr(Gamma_l); the own-stream term accounts
    for precoder fluctuation around its mean.
    """
    k = len(corr_sets)
    rho_v = np.asarray(rho_v, dtype=float)
    rho_h = np.asarray(rho_h, dtype=float)
    tg_v = [_checked_trace(s.trace_gamma_v, rho_v[i]) for i, s in enumerate(stats_list)]
    tg_h = [_checked_trace(s.trace_gamma_h, rho_h[i]) for i, s in enumerate(stats_list)]
    per_ue = np.zeros(k)
    for i in range(k):
        r_v = corr_sets[i].r_v
        r_h = corr_sets[i].r_h
        den_v = noise_var
        den_h = noise_var
        for l in range(k):
            if rho_v[l] > 0.0:
                g = stats_list[l].gamma_v
                den_v += rho_v[l] * trace_product(g, r_v).real / tg_v[l]
                den_h += rho_v[l] * trace_product(g, r_h).real / tg_v[l]
            if rho_h[l] > 0.0:
                g = stats_list[l].gamma_h
                den_v += rho_h[l] * trace_product(g, r_v).real / tg_h[l]
                den_h += rho_h[l] * trace_product(g, r_h).real / tg_h[l]
        sinr_v = rho_v[i] * tg_v[i] / den_v
        sinr_h = rho_h[i] * tg_h[i] / den_h
        per_ue[i] = prelog * (np.log2(1.0 + sinr_v) + np.log2(1.0 + sinr_h))
    return _report(per_ue, "closed_form_mr", prelog, 0, config_digest)


def _block_se(a, b, noise_var, prelog, strict):
    """SE of one UE from its moment blocks; see the module docstring."""
    ports = a.shape[0]
    omega_arg = symmetrize(b + noise_var * np.eye(ports) - a @ a.conj().T)
    if strict:
        try:
            x = hermitian_solve(omega_arg, a)
        except Singular as exc:
            raise IndefiniteEffectiveNoise(
                "interference-plus-noise estimate is not positive definite; "
                "increase the trial count"
            ) from exc
    else:
        try:
            x = np.linalg.solve(omega_arg, a)
        except np.linalg.LinAlgError:
            return 0.0
    d = np.eye(ports) + a.conj().T @ x
    if ports == 1:
        det = d[0, 0].real
    else:
        det = (d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]).real
    return prelog * np.log2(max(det, 1.0))


def monte_carlo_se(joint_sampler, precoder_builder, ports_per_ue, noise_var,
                   prelog, spec, method="monte_carlo", config_digest=""):
    """Estimate the SE lower bound by averaging over channel realizations.

    joint_sampler(n, rng) yields (h_true, h_hat) with one conjugated
    channel row per stream; precoder_builder(h_hat) returns the (n, M, S)
    precoder batch. Accumulation is sequential over fixed-size batches,
    so a given spec yields bit-identical results. Per-UE standard errors
    come from the spread of per-batch SE estimates.
    """
    rng = np.random.default_rng(spec.seed)
    sizes = [spec.batch] * (spec.trials // spec.batch)
    if spec.trials % spec.batch:
        sizes.append(spec.trials % spec.batch)
    s = None
    sum_p = None
    sum_bb = None
    batch_ses = []
    for n in sizes:
        h_true, h_hat = joint_sampler(n, rng)
        if s is None:
            s = h_true.shape[1]
            k = s // ports_per_ue
            sum_p = np.zeros((s, s), dtype=np.complex128)
            sum_bb = np.zeros((k, ports_per_ue, ports_per_ue), dtype=np.complex128)
        w = precoder_builder(h_hat)
        p = h_true @ w
        bp = p.sum(axis=0)
        sum_p += bp
        batch_se = np.zeros(k)
        for i in range(k):
            idx = slice(i * ports_per_ue, (i + 1) * ports_per_ue)
            pk = p[:, idx, :]
            bb = np.einsum("nij,nlj->il", pk, np.conj(pk))
            sum_bb[i] += bb
            batch_se[i] = _block_se(
                bp[idx, idx] / n, bb / n, noise_var, prelog, strict=False
            )
        batch_ses.append(batch_se)
    per_ue = np.zeros(k)
    for i in range(k):
        idx = slice(i * ports_per_ue, (i + 1) * ports_per_ue)
        a = sum_p[idx, idx] / spec.trials
        b = sum_bb[i] / spec.trials
        per_ue[i] = _block_se(a, b, noise_var, prelog, strict=True)
    stderr = None
    if len(batch_ses) >= 2:
        stacked = np.asarray(batch_ses)
        stderr = np.std(stacked, axis=0, ddof=1) / np.sqrt(stacked.shape[0])
    return _report(per_ue, method, prelog, spec.trials, config_digest, stderr)


def simplified_se_uncorrelated(betas, p_v, p_h, rho_v, rho_h, m, tau_p,
                               noise_var, prelog, config_digest=""):
    """Scalar SE for uncorrelated fading and ideal polarization isolation.

    With R_bs = beta I and no cross-polar leakage the two ports decouple
    into disjoint antenna sets: each stream gets an array gain of M/2
    weighted by its estimation quality, and receives interference only
    from its own polarization, because opposite-polarization estimates
    occupy the complementary ports.
    """
    betas = np.asarray(betas, dtype=float)
    p_v = np.asarray(p_v, dtype=float)
    p_h = np.asarray(p_h, dtype=float)
    rho_v = np.asarray(rho_v, dtype=float)
    rho_h = np.asarray(rho_h, dtype=float)
    k = betas.size
    half_m = m / 2.0

    def gamma_trace(beta, p):
        return half_m * p * tau_p * beta**2 / (p * tau_p * beta + noise_var)

    for l in range(k):
        _checked_trace(gamma_trace(betas[l], p_v[l]), rho_v[l])
        _checked_trace(gamma_trace(betas[l], p_h[l]), rho_h[l])
    per_ue = np.zeros(k)
    for i in range(k):
        sig_v = rho_v[i] * gamma_trace(betas[i], p_v[i])
        sig_h = rho_h[i] * gamma_trace(betas[i], p_h[i])
        den_v = noise_var + betas[i] * np.sum(rho_v)
        den_h = noise_var + betas[i] * np.sum(rho_h)
        per_ue[i] = prelog * (
            np.log2(1.0 + sig_v / den_v) + np.log2(1.0 + sig_h / den_h)
        )
    return _report(per_ue, "simplified", prelog, 0, config_digest)


def uni_closed_form_se_mr(uni_stats_list, rho, noise_var, prelog,
                          config_digest=""):
    """Single-polarization analog of the MR closed form."""
    k = len(uni_stats_list)
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (k,)).copy()
    tg = [
        _checked_trace(s.trace_gamma, r)
        for s, r in zip(uni_stats_list, rho)
    ]
    per_ue = np.zeros(k)
    for i in range(k):
        r_i = uni_stats_list[i].r_bs
        den = noise_var
        for l in range(k):
            if rho[l] <= 0.0:
                continue
            den += rho[l] * trace_product(uni_stats_list[l].gamma, r_i).real / tg[l]
        sinr = rho[i] * tg[i] / den if rho[i] > 0.0 else 0.0
        per_ue[i] = prelog * np.log2(1.0 + sinr)
    return _report(per_ue, "uni_closed_form_mr", prelog, 0, config_digest)
