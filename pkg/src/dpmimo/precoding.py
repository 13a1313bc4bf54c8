"""MR and ZF downlink precoders for dual- and uni-polarized arrays.

MR columns point along the channel estimates and are normalized by the
analytical average estimate energy tr(Gamma), which is what makes the
closed-form SE expression exact. ZF columns come from the pseudo-inverse
of the stacked estimates and are normalized per realization.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEstimateStatistics, RankDeficient, TooManyUEs
from .linalg import hermitian_solve

TRACE_FLOOR = 1e-30
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class PrecoderSet:
    """Per-UE precoding matrices with their scheme and power labels."""

    w: tuple          # per-UE arrays, (M, 2) dual or (M/2, 1) uni
    scheme: str       # "MR" or "ZF"
    powers: tuple     # per-UE (rho_v, rho_h) or (rho_uni,)


def _mr_column(hhat, trace_gamma, rho):
    if rho == 0.0:
        return np.zeros_like(hhat)
    if trace_gamma <= TRACE_FLOOR:
        raise DegenerateEstimateStatistics(
            f"estimate energy {trace_gamma:.3e} cannot normalize a column"
        )
    return np.sqrt(rho / trace_gamma) * hhat


def mr_precoder_dual(est, rho_v, rho_h):
    """MR matrix for one UE: columns sqrt(rho) hhat / sqrt(tr(Gamma))."""
    w_v = _mr_column(est.hhat_v, est.stats.trace_gamma_v, rho_v)
    w_h = _mr_column(est.hhat_h, est.stats.trace_gamma_h, rho_h)
    return np.stack([w_v, w_h], axis=1)


def zf_pseudo_inverse(h_all):
    """Unnormalized ZF matrix H_allᴴ (H_all H_allᴴ)⁻¹ for stacked rows.

    h_all has one conjugated estimate per row (S x M); the product
    h_all @ result is the identity up to solve accuracy.
    """
    s, m = h_all.shape
    if s > m:
        raise TooManyUEs(f"{s} streams cannot be separated by {m} antennas")
    gram = h_all @ h_all.conj().T
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise RankDeficient("stacked estimates are numerically rank deficient")
    return hermitian_solve(gram, h_all).conj().T


def _normalize_columns(w0, rho):
    norms = np.linalg.norm(w0, axis=0)
    w = np.zeros_like(w0)
    for j, r in enumerate(rho):
        if r == 0.0:
            continue
        if norms[j] == 0.0:
            raise RankDeficient(f"ZF column {j} has zero norm")
        w[:, j] = np.sqrt(r) * w0[:, j] / norms[j]
    return w


def zf_precoder_dual(estimates, rho_pairs):
    """ZF precoders for all UEs from their stacked estimates.

    Row order of the stack is (UE 0 V, UE 0 H, UE 1 V, ...); each
    extracted column is unit-normalized then scaled to its power.
    """
    k = len(estimates)
    rows = []
    for est in estimates:
        rows.append(np.conj(est.hhat_v))
        rows.append(np.conj(est.hhat_h))
    w0 = zf_pseudo_inverse(np.asarray(rows))
    rho = [p for pair in rho_pairs for p in pair]
    w = _normalize_columns(w0, rho)
    per_ue = tuple(w[:, 2 * i : 2 * i + 2] for i in range(k))
    return PrecoderSet(w=per_ue, scheme="ZF", powers=tuple(rho_pairs))


def mr_precoder_uni(hhat, trace_gamma, rho):
    """Uni-polarized MR vector sqrt(rho) hhat / sqrt(tr(Gamma))."""
    return _mr_column(hhat, trace_gamma, rho)


def zf_precoder_uni(estimates, rho):
    """Uni-polarized ZF: one pseudo-inverse column per UE."""
    if len(estimates) == 0:
        return PrecoderSet(w=(), scheme="ZF", powers=())
    h_all = np.asarray([np.conj(h) for h in estimates])
    w0 = zf_pseudo_inverse(h_all)
    w = _normalize_columns(w0, [rho] * len(estimates))
    per_ue = tuple(w[:, i : i + 1] for i in range(len(estimates)))
    return PrecoderSet(w=per_ue, scheme="ZF", powers=(rho,) * len(estimates))


def mr_precode_batch(h_hat, rho, trace_gammas):
    """Batched MR: h_hat is (n, S, M) conjugated rows, returns (n, M, S).

    Stream j's column is sqrt(rho_j / tr(Gamma_j)) times the estimate.
    """
    rho = np.asarray(rho, dtype=float)
    tg = np.asarray(trace_gammas, dtype=float)
    if np.any((rho > 0.0) & (tg <= TRACE_FLOOR)):
        raise DegenerateEstimateStatistics("zero estimate energy with nonzero power")
    scale = np.where(rho > 0.0, np.sqrt(rho / np.where(tg > 0.0, tg, 1.0)), 0.0)
    return np.conj(h_hat).transpose(0, 2, 1) * scale[None, None, :]


def zf_precode_batch(h_hat, rho):
    """Batched ZF with per-realization column normalization.

    h_hat is (n, S, M); returns (n, M, S). Trials with numerically
    singular Gram matrices raise RankDeficient.
    """
    rho = np.asarray(rho, dtype=float)
    gram = h_hat @ np.conj(h_hat).transpose(0, 2, 1)
    try:
        x = np.linalg.solve(gram, h_hat)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient(str(exc)) from exc
    w0 = np.conj(x).transpose(0, 2, 1)
    norms = np.linalg.norm(w0, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise RankDeficient("ZF produced a zero column")
    return w0 / norms * np.sqrt(rho)[None, None, :]
