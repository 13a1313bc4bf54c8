"""Experiment campaigns with reproducible seeding and CSV output.

Every random stream is derived from (config seed, structured tag), so
any row can be regenerated from its fields alone. UE drops are keyed by
(m, drop_index) only; campaigns that sweep other parameters therefore
reuse the same geometry per drop, which turns sweep comparisons into
common-random-number comparisons.
"""

import csv
import json
import zlib
from dataclasses import dataclass, fields

import numpy as np

from .config import config_digest
from .correlation import build_correlation_set, local_scattering_cov, xpd_from_db
from .errors import SimulationError
from .estimation import (
    direct_joint_sampler,
    estimation_statistics,
    uni_direct_joint_sampler,
    uni_estimation_statistics,
)
from .precoding import mr_precode_batch, zf_precode_batch
from .scenario import Geometry, drop_ues
from .se import MonteCarloSpec, closed_form_se_mr, monte_carlo_se, uni_closed_form_se_mr


@dataclass(frozen=True)
class ResultRow:
    """One SE datapoint; ue_index -1 is a sum, drop_index -1 an average."""

    experiment: str
    m: int
    k: int
    precoder: str
    setup: str
    xpd_db: float
    drop_index: int
    ue_index: int
    se: float
    method: str
    seed: int


RESULT_FIELDS = tuple(f.name for f in fields(ResultRow))

DEFAULT_M_VALUES = (20, 40, 60, 80, 100)
DEFAULT_XPD_VALUES = (float("inf"), 7.0, 0.0)


def _tag_stream(seed, tag):
    """Independent generator keyed by the config seed and a text tag."""
    return np.random.default_rng(
        np.random.SeedSequence([seed, zlib.crc32(tag.encode())])
    )


def _tag_seed(seed, tag):
    """Integer seed for a MonteCarloSpec, same keying as _tag_stream."""
    ss = np.random.SeedSequence([seed, zlib.crc32(tag.encode())])
    state = ss.generate_state(2)
    return int(state[0]) | (int(state[1]) << 32)


def _build_drop(cfg, m, drop_index):
    """Geometry and spatial covariances shared by every sweep point."""
    rng = _tag_stream(cfg.seed, f"drop|{m}|{drop_index}")
    ues = drop_ues(cfg.k, Geometry(), rng, cfg.n_clusters, cfg.sigma_sf)
    r_bs_list = [
        local_scattering_cov(m // 2, ue.beta, ue.cluster_angles, cfg.asd_deg)
        for ue in ues
    ]
    return ues, r_bs_list


def _dual_reports(cfg, m, r_bs_list, xpd_db, mc_tag):
    """Closed-form MR and Monte Carlo ZF on the dual-polarized setup."""
    xpd = xpd_from_db(xpd_db)
    corr = [build_correlation_set(rb, xpd) for rb in r_bs_list]
    stats = [
        estimation_statistics(c, cfg.p_kv, cfg.p_kh, cfg.tau_p, cfg.noise_var_mw)
        for c in corr
    ]
    rho_v = np.full(cfg.k, cfg.rho_kv)
    rho_h = np.full(cfg.k, cfg.rho_kh)
    digest = config_digest(cfg)
    mr = closed_form_se_mr(
        corr, stats, rho_v, rho_h, cfg.noise_var_mw, cfg.prelog_dual, digest
    )
    rho_streams = np.empty(2 * cfg.k)
    rho_streams[0::2] = rho_v
    rho_streams[1::2] = rho_h
    sampler = direct_joint_sampler(stats)
    spec = MonteCarloSpec(cfg.mc_trials, _tag_seed(cfg.seed, mc_tag + "|ZF"))
    zf = monte_carlo_se(
        sampler,
        lambda h_hat: zf_precode_batch(h_hat, rho_streams),
        2,
        cfg.noise_var_mw,
        cfg.prelog_dual,
        spec,
        config_digest=digest,
    )
    return mr, zf


def _uni_reports(cfg, r_bs_list, mc_tag):
    """Closed-form MR and Monte Carlo ZF on the half-size uni baseline."""
    stats = [
        uni_estimation_statistics(rb, cfg.p_uni, cfg.tau_uni_p, cfg.noise_var_mw)
        for rb in r_bs_list
    ]
    digest = config_digest(cfg)
    mr = uni_closed_form_se_mr(
        stats, cfg.rho_uni, cfg.noise_var_mw, cfg.prelog_uni, digest
    )
    rho = np.full(cfg.k, cfg.rho_uni)
    sampler = uni_direct_joint_sampler(stats)
    spec = MonteCarloSpec(cfg.mc_trials, _tag_seed(cfg.seed, mc_tag + "|ZF"))
    zf = monte_carlo_se(
        sampler,
        lambda h_hat: zf_precode_batch(h_hat, rho),
        1,
        cfg.noise_var_mw,
        cfg.prelog_uni,
        spec,
        config_digest=digest,
    )
    return mr, zf


# (setup, precoder, report index) in fixed emission order
_COMBOS = (("dual", "MR", 0), ("dual", "ZF", 1), ("uni", "MR", 2), ("uni", "ZF", 3))


def _drop_reports(cfg, m, drop_index, experiment, xpd_db):
    ues, r_bs_list = _build_drop(cfg, m, drop_index)
    mc_tag = f"mc|{experiment}|{m}|{drop_index}|{xpd_db!r}"
    dual_mr, dual_zf = _dual_reports(cfg, m, r_bs_list, xpd_db, mc_tag + "|dual")
    uni_mr, uni_zf = _uni_reports(cfg, r_bs_list, mc_tag + "|uni")
    return dual_mr, dual_zf, uni_mr, uni_zf


def _row(cfg, experiment, m, xpd_db, drop_index, ue_index, se, precoder, setup,
         method):
    return ResultRow(
        experiment=experiment,
        m=m,
        k=cfg.k,
        precoder=precoder,
        setup=setup,
        xpd_db=xpd_db,
        drop_index=drop_index,
        ue_index=ue_index,
        se=float(se),
        method=method,
        seed=cfg.seed,
    )


def _failure_rows(cfg, experiment, m, xpd_db, drop_index, exc, combos=_COMBOS):
    label = f"failed:{type(exc).__name__}"
    return [
        _row(cfg, experiment, m, xpd_db, drop_index, -1, 0.0, prec, setup, label)
        for setup, prec, _ in combos
    ]


def _average_rows(cfg, experiment, m, xpd_db, per_combo_sums):
    rows = []
    for (setup, prec, method), values in per_combo_sums.items():
        if not values:
            continue
        rows.append(
            _row(cfg, experiment, m, xpd_db, -1, -1,
                 float(np.mean(values)), prec, setup, method)
        )
    return rows


def run_m_sweep(cfg, m_values=DEFAULT_M_VALUES):
    """Average sum SE versus array size, dual and uni, MR and ZF.

    Emits one sum row per (m, drop, setup, precoder) plus average rows
    with drop_index -1; failed drops yield flagged rows with se 0.
    """
    experiment = "m-sweep"
    rows = []
    for m in m_values:
        sums = {}
        for drop_index in range(cfg.drops):
            try:
                reports = _drop_reports(cfg, m, drop_index, experiment, cfg.xpd_db)
            except SimulationError as exc:
                rows.extend(
                    _failure_rows(cfg, experiment, m, cfg.xpd_db, drop_index, exc)
                )
                continue
            for setup, prec, ri in _COMBOS:
                rep = reports[ri]
                rows.append(
                    _row(cfg, experiment, m, cfg.xpd_db, drop_index, -1,
                         rep.sum_se, prec, setup, rep.method)
                )
                sums.setdefault((setup, prec, rep.method), []).append(rep.sum_se)
        rows.extend(_average_rows(cfg, experiment, m, cfg.xpd_db, sums))
    return rows


def run_cdf(cfg):
    """Per-UE SE rows across drops at fixed m, for empirical CDFs."""
    experiment = "cdf"
    rows = []
    for drop_index in range(cfg.drops):
        try:
            reports = _drop_reports(cfg, cfg.m, drop_index, experiment, cfg.xpd_db)
        except SimulationError as exc:
            rows.extend(
                _failure_rows(cfg, experiment, cfg.m, cfg.xpd_db, drop_index, exc)
            )
            continue
        for setup, prec, ri in _COMBOS:
            rep = reports[ri]
            for ue_index, se in enumerate(rep.per_ue_se):
                rows.append(
                    _row(cfg, experiment, cfg.m, cfg.xpd_db, drop_index,
                         ue_index, se, prec, setup, rep.method)
                )
    return rows


def run_xpd_sweep(cfg, m_values=DEFAULT_M_VALUES, xpd_values=DEFAULT_XPD_VALUES):
    """Dual-polarized average sum SE over (m, xpd) grid, MR and ZF.

    Drop geometry is keyed by (m, drop_index) only, so all XPD values
    see identical UE placements.
    """
    experiment = "xpd-sweep"
    dual_combos = tuple(c for c in _COMBOS if c[0] == "dual")
    rows = []
    for m in m_values:
        for xpd_db in xpd_values:
            sums = {}
            for drop_index in range(cfg.drops):
                try:
                    ues, r_bs_list = _build_drop(cfg, m, drop_index)
                    mc_tag = f"mc|{experiment}|{m}|{drop_index}|{xpd_db!r}|dual"
                    reports = _dual_reports(cfg, m, r_bs_list, xpd_db, mc_tag)
                except SimulationError as exc:
                    rows.extend(
                        _failure_rows(cfg, experiment, m, xpd_db, drop_index,
                                      exc, dual_combos)
                    )
                    continue
                for setup, prec, ri in dual_combos:
                    rep = reports[ri]
                    rows.append(
                        _row(cfg, experiment, m, xpd_db, drop_index, -1,
                             rep.sum_se, prec, setup, rep.method)
                    )
                    sums.setdefault((setup, prec, rep.method), []).append(rep.sum_se)
            rows.extend(_average_rows(cfg, experiment, m, xpd_db, sums))
    return rows


def _format_cell(value):
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_rows_csv(rows, path):
    """Serialize rows with a fixed header and 9-significant-digit floats."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_FIELDS)
        for row in rows:
            writer.writerow(
                _format_cell(getattr(row, name)) for name in RESULT_FIELDS
            )


def write_metadata(path, cfg, experiment, extra=None):
    """Sidecar JSON with the digest and seed needed to replay a run."""
    from . import __version__

    payload = {
        "experiment": experiment,
        "config_digest": config_digest(cfg),
        "seed": cfg.seed,
        "version": __version__,
        "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)},
    }
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
