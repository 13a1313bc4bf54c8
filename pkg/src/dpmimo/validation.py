"""Self-check battery tying the analytical layer to the sampling layer.

Each check measures a quantity whose expected value the model pins down
(an exact identity, a statistical moment, or an agreement between two
independent computation routes) and compares it against a threshold.
Failures are report content, not exceptions.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .channel import empirical_xpd, sample_dual_channels
from .config import config_digest
from .correlation import (
    build_correlation_set,
    polarized_covariances_via_sqrt,
    xpd_from_db,
)
from .estimation import (
    build_pilot_book,
    direct_joint_sampler,
    end_to_end_joint_sampler,
    estimation_statistics,
)
from .precoding import mr_precode_batch, zf_pseudo_inverse
from .se import MonteCarloSpec, closed_form_se_mr, monte_carlo_se
from .experiments import _build_drop, _tag_seed, _tag_stream


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple
    config_digest: str
    seed: int

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def to_text(self):
        lines = [
            f"validation report  digest={self.config_digest}  seed={self.seed}"
        ]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = (
                f"  {status}  {c.name}: measured {c.measured:.3e}"
                f" vs threshold {c.threshold:.3e}"
            )
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
        verdict = "all checks passed" if self.all_passed else "CHECKS FAILED"
        lines.append(verdict)
        return "\n".join(lines)


def _rel_err(a, b):
    scale = np.linalg.norm(b, "fro")
    if scale == 0.0:
        return float(np.linalg.norm(a - b, "fro"))
    return float(np.linalg.norm(a - b, "fro") / scale)


def run_validation(cfg, gamma_corruption=1.0):
    """Run every model self-check on one drop of the given config.

    gamma_corruption is a fault-injection hook: values other than 1
    scale the estimate covariances fed to the closed form so that the
    closed-form-versus-Monte-Carlo check must fail.
    """
    checks = []
    noise = cfg.noise_var_mw
    xpd = xpd_from_db(cfg.xpd_db)
    ues, r_bs_list = _build_drop(cfg, cfg.m, 0)
    corr = [build_correlation_set(rb, xpd) for rb in r_bs_list]
    stats = [
        estimation_statistics(c, cfg.p_kv, cfg.p_kh, cfg.tau_p, noise)
        for c in corr
    ]

    err = max(_rel_err(c.r_v + c.r_h, c.r_full) for c in corr)
    checks.append(ValidationCheck("covariance_split", err <= 1e-10, err, 1e-10))

    err = 0.0
    for c in corr:
        rv, rh = polarized_covariances_via_sqrt(c.r_full, c.sqrt_r, c.xpd.q)
        err = max(err, _rel_err(rv, c.r_v), _rel_err(rh, c.r_h))
    checks.append(
        ValidationCheck(
            "kronecker_vs_definitional", err <= 1e-10, err, 1e-10,
            "R_v, R_h via explicit square-root weighting",
        )
    )

    if cfg.p_kv == cfg.p_kh:
        err = max(
            abs(s.trace_gamma_v - s.trace_gamma_h)
            / max(s.trace_gamma_v, 1e-300)
            for s in stats
        )
        checks.append(
            ValidationCheck("estimate_trace_parity", err <= 1e-10, err, 1e-10,
                            "equal pilot powers")
        )
    trace_err = max(
        abs(np.trace(c.r_v).real - np.trace(c.r_bs).real)
        / abs(np.trace(c.r_bs).real)
        for c in corr
    )
    checks.append(
        ValidationCheck("covariance_trace", trace_err <= 1e-10, trace_err, 1e-10,
                        "tr(R_v) = tr(R_bs)")
    )

    err = max(
        max(_rel_err(s.gamma_v + s.c_v, c.r_v), _rel_err(s.gamma_h + s.c_h, c.r_h))
        for s, c in zip(stats, corr)
    )
    checks.append(ValidationCheck("gamma_plus_error", err <= 1e-10, err, 1e-10))

    n_xpd = 20000
    rng = _tag_stream(cfg.seed, "validate|xpd")
    h_v, h_h = sample_dual_channels(corr[0], n_xpd, rng)
    measured_xpd = empirical_xpd(h_v, h_h)
    if np.isinf(cfg.xpd_db):
        ok = np.isinf(measured_xpd)
        checks.append(
            ValidationCheck("empirical_xpd", ok, measured_xpd, np.inf,
                            "no cross-polar power expected")
        )
    else:
        dev = abs(measured_xpd - cfg.xpd_db)
        checks.append(
            ValidationCheck("empirical_xpd", dev <= 0.3, dev, 0.3,
                            f"measured {measured_xpd:.2f} dB over {n_xpd} draws")
        )

    n_orth = 2000
    book = build_pilot_book(
        cfg.k, [(cfg.p_kv, cfg.p_kh)] * cfg.k, cfg.tau_c, cfg.tau_p
    )
    e2e = end_to_end_joint_sampler(corr, stats, book, noise)
    rng = _tag_stream(cfg.seed, "validate|orthogonality")
    h_true, h_hat = e2e(n_orth, rng)
    hv_hat = np.conj(h_hat[:, 0])
    ev = np.conj(h_true[:, 0]) - hv_hat
    cross = hv_hat.T @ np.conj(ev) / n_orth
    bound = 5.0 * np.linalg.norm(corr[0].r_v, "fro") / np.sqrt(n_orth)
    measured = float(np.max(np.abs(cross)))
    checks.append(
        ValidationCheck("mmse_orthogonality", measured <= bound, measured, bound,
                        "UE 0, end-to-end pilot path")
    )

    rho_v = np.full(cfg.k, cfg.rho_kv)
    rho_h = np.full(cfg.k, cfg.rho_kh)
    rho_streams = np.empty(2 * cfg.k)
    rho_streams[0::2] = rho_v
    rho_streams[1::2] = rho_h
    tg = np.empty(2 * cfg.k)
    tg[0::2] = [s.trace_gamma_v for s in stats]
    tg[1::2] = [s.trace_gamma_h for s in stats]

    cf_stats = stats
    if gamma_corruption != 1.0:
        cf_stats = [
            dataclasses.replace(
                s,
                gamma_v=gamma_corruption * s.gamma_v,
                gamma_h=gamma_corruption * s.gamma_h,
                trace_gamma_v=gamma_corruption * s.trace_gamma_v,
                trace_gamma_h=gamma_corruption * s.trace_gamma_h,
            )
            for s in stats
        ]
    cf = closed_form_se_mr(corr, cf_stats, rho_v, rho_h, noise, cfg.prelog_dual)
    direct = direct_joint_sampler(stats)
    mr_builder = lambda h_hat: mr_precode_batch(h_hat, rho_streams, tg)
    # keep at least ~8 batches so the stderr-driven tolerance is live
    batch = max(25, min(500, cfg.mc_trials // 8))
    spec = MonteCarloSpec(cfg.mc_trials, _tag_seed(cfg.seed, "validate|mc-mr"),
                          batch=batch)
    mc = monte_carlo_se(direct, mr_builder, 2, noise, cfg.prelog_dual, spec)
    stderr = mc.stderr_per_ue
    if stderr is None:
        stderr = np.zeros(cfg.k)
    gaps = np.abs(cf.per_ue_se - mc.per_ue_se)
    tol = np.maximum(4.0 * stderr, 0.03)
    measured = float(np.max(gaps - tol))
    checks.append(
        ValidationCheck(
            "closed_form_vs_monte_carlo", bool(np.all(gaps <= tol)), measured, 0.0,
            f"max per-UE gap beyond tolerance, {cfg.mc_trials} trials",
        )
    )

    spec_a = MonteCarloSpec(cfg.mc_trials, _tag_seed(cfg.seed, "validate|path-a"),
                            batch=batch)
    spec_b = MonteCarloSpec(cfg.mc_trials, _tag_seed(cfg.seed, "validate|path-b"),
                            batch=batch)
    mc_direct = monte_carlo_se(direct, mr_builder, 2, noise, cfg.prelog_dual, spec_a)
    mc_e2e = monte_carlo_se(e2e, mr_builder, 2, noise, cfg.prelog_dual, spec_b)
    err_a = mc_direct.stderr_per_ue
    err_b = mc_e2e.stderr_per_ue
    if err_a is None or err_b is None:
        joint = np.zeros(cfg.k)
    else:
        joint = np.sqrt(err_a**2 + err_b**2)
    gaps = np.abs(mc_direct.per_ue_se - mc_e2e.per_ue_se)
    tol = np.maximum(3.0 * joint, 0.03)
    measured = float(np.max(gaps - tol))
    checks.append(
        ValidationCheck(
            "estimator_path_equivalence", bool(np.all(gaps <= tol)), measured, 0.0,
            "direct sampling vs end-to-end pilots, MR",
        )
    )

    rng = _tag_stream(cfg.seed, "validate|zf")
    _, h_hat = direct(1, rng)
    w0 = zf_pseudo_inverse(h_hat[0])
    residual = float(np.max(np.abs(h_hat[0] @ w0 - np.eye(2 * cfg.k))))
    checks.append(
        ValidationCheck("zf_nulling", residual <= 1e-8, residual, 1e-8,
                        "estimated-channel interference")
    )

    return ValidationReport(
        checks=tuple(checks), config_digest=config_digest(cfg), seed=cfg.seed
    )


def validation_rows(report):
    """Flatten a report for CSV output."""
    return [
        {
            "check": c.name,
            "passed": int(c.passed),
            "measured": c.measured,
            "threshold": c.threshold,
            "detail": c.detail,
        }
        for c in report.checks
    ]
