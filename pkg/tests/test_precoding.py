"""MR and ZF precoder construction, normalization, and failure modes."""
import numpy as np
import pytest

from dpmimo.correlation import build_correlation_set, local_scattering_cov, xpd_from_db
from dpmimo.errors import DegenerateEstimateStatistics, RankDeficient, TooManyUEs
from dpmimo.estimation import (
    ChannelEstimate,
    estimation_statistics,
    sample_estimate_directly,
)
from dpmimo.precoding import (
    mr_precode_batch,
    mr_precoder_dual,
    mr_precoder_uni,
    zf_precode_batch,
    zf_precoder_dual,
    zf_precoder_uni,
    zf_pseudo_inverse,
)

BETA = 1.0e-9
NOISE = 10.0 ** (-94.0 / 10.0)


def _stats(half_m=3, angles=(0.2, -0.1)):
    corr = build_correlation_set(
        local_scattering_cov(half_m, BETA, list(angles)), xpd_from_db(7.0)
    )
    return estimation_statistics(corr, 100.0, 100.0, 8, NOISE)


class TestMrPrecoder:
    def test_zero_power_zero_matrix(self):
        stats = _stats()
        est, _ = sample_estimate_directly(stats, np.random.default_rng(40))
        w = mr_precoder_dual(est, 0.0, 0.0)
        np.testing.assert_array_equal(w, np.zeros_like(w))

    def test_average_column_power_is_rho(self):
        from dpmimo.estimation import direct_joint_sampler

        stats = _stats()
        draw = direct_joint_sampler([stats])
        n = 10_000
        _, h_hat = draw(n, np.random.default_rng(41))
        rho = np.array([100.0, 50.0])
        tg = np.array([stats.trace_gamma_v, stats.trace_gamma_h])
        w = mr_precode_batch(h_hat, rho, tg)
        power = np.mean(np.sum(np.abs(w[:, :, 0]) ** 2, axis=1))
        assert power == pytest.approx(rho[0], rel=0.02)

    def test_column_direction(self):
        stats = _stats()
        est, _ = sample_estimate_directly(stats, np.random.default_rng(42))
        w = mr_precoder_dual(est, 100.0, 100.0)
        expected = np.sqrt(100.0 / stats.trace_gamma_v) * est.hhat_v
        np.testing.assert_allclose(w[:, 0], expected, atol=1e-15)

    def test_degenerate_trace_rejected(self):
        stats = _stats()
        est, _ = sample_estimate_directly(stats, np.random.default_rng(43))
        bad = ChannelEstimate(
            hhat_v=est.hhat_v,
            hhat_h=est.hhat_h,
            stats=type(stats)(
                gamma_v=stats.gamma_v,
                gamma_h=stats.gamma_h,
                c_v=stats.c_v,
                c_h=stats.c_h,
                filter_v=stats.filter_v,
                filter_h=stats.filter_h,
                trace_gamma_v=0.0,
                trace_gamma_h=stats.trace_gamma_h,
            ),
        )
        with pytest.raises(DegenerateEstimateStatistics):
            mr_precoder_dual(bad, 100.0, 100.0)


class TestZfPrecoder:
    def test_single_ue_orthonormal_estimates_reduce_to_mr(self):
        stats = _stats(half_m=1, angles=(0.0,))
        est = ChannelEstimate(
            hhat_v=np.array([1.0 + 0.0j, 0.0]),
            hhat_h=np.array([0.0, 1.0 + 0.0j]),
            stats=stats,
        )
        ps = zf_precoder_dual([est], [(4.0, 9.0)])
        w = ps.w[0]
        np.testing.assert_allclose(w[:, 0], [2.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(w[:, 1], [0.0, 3.0], atol=1e-12)

    def test_nulling_identity(self):
        stats = _stats(half_m=4)
        rng = np.random.default_rng(44)
        ests = [sample_estimate_directly(stats, rng)[0] for _ in range(3)]
        rows = []
        for est in ests:
            rows.append(np.conj(est.hhat_v))
            rows.append(np.conj(est.hhat_h))
        h_all = np.asarray(rows)
        w0 = zf_pseudo_inverse(h_all)
        np.testing.assert_allclose(h_all @ w0, np.eye(6), atol=1e-8)

    def test_column_norms_exact(self):
        stats = _stats(half_m=4)
        rng = np.random.default_rng(45)
        ests = [sample_estimate_directly(stats, rng)[0] for _ in range(2)]
        rho_pairs = [(100.0, 50.0), (25.0, 0.0)]
        ps = zf_precoder_dual(ests, rho_pairs)
        for w, (rv, rh) in zip(ps.w, rho_pairs):
            for col, rho in zip(w.T, (rv, rh)):
                norm = np.linalg.norm(col)
                if rho == 0.0:
                    assert norm == 0.0
                else:
                    assert norm == pytest.approx(np.sqrt(rho), rel=1e-12)

    def test_too_many_streams(self):
        with pytest.raises(TooManyUEs):
            zf_pseudo_inverse(np.eye(3, 2, dtype=complex))

    def test_rank_deficient(self):
        row = np.array([1.0, 2.0j, -1.0, 0.5])
        with pytest.raises(RankDeficient):
            zf_pseudo_inverse(np.asarray([row, row]))


class TestUniPrecoders:
    def test_mr_vector(self):
        hhat = np.array([1.0j, 2.0])
        w = mr_precoder_uni(hhat, 5.0, 20.0)
        np.testing.assert_allclose(w, 2.0 * hhat, atol=1e-12)

    def test_zf_self_product_real_positive(self):
        rng = np.random.default_rng(46)
        ests = [rng.standard_normal(6) + 1j * rng.standard_normal(6)
                for _ in range(3)]
        ps = zf_precoder_uni(ests, 200.0)
        for h, w in zip(ests, ps.w):
            # downlink product uses the conjugated channel row
            val = np.conj(h) @ w[:, 0]
            assert abs(val.imag) <= 1e-10 * abs(val.real)
            assert val.real > 0.0

    def test_empty_input(self):
        ps = zf_precoder_uni([], 200.0)
        assert ps.w == ()


class TestBatchedPrecoders:
    def test_mr_batch_matches_single(self):
        stats = _stats()
        rng = np.random.default_rng(47)
        est, _ = sample_estimate_directly(stats, rng)
        h_hat = np.stack(
            [np.conj(est.hhat_v), np.conj(est.hhat_h)]
        )[None, :, :]
        rho = np.array([100.0, 60.0])
        tg = np.array([stats.trace_gamma_v, stats.trace_gamma_h])
        w = mr_precode_batch(h_hat, rho, tg)
        single = mr_precoder_dual(est, 100.0, 60.0)
        np.testing.assert_allclose(w[0], single, atol=1e-14)

    def test_mr_batch_degenerate_trace(self):
        with pytest.raises(DegenerateEstimateStatistics):
            mr_precode_batch(np.ones((1, 2, 4), complex), [1.0, 1.0], [0.0, 1.0])

    def test_zf_batch_nulling_and_norms(self):
        rng = np.random.default_rng(48)
        h_hat = rng.standard_normal((5, 4, 8)) + 1j * rng.standard_normal((5, 4, 8))
        rho = np.array([100.0, 100.0, 50.0, 25.0])
        w = zf_precode_batch(h_hat, rho)
        for t in range(5):
            p = h_hat[t] @ w[t]
            # off-diagonal nulling on the estimates
            off = p - np.diag(np.diag(p))
            assert np.max(np.abs(off)) <= 1e-8 * np.max(np.abs(p))
            np.testing.assert_allclose(
                np.linalg.norm(w[t], axis=0), np.sqrt(rho), rtol=1e-10
            )

    def test_zf_batch_zero_power_column(self):
        rng = np.random.default_rng(49)
        h_hat = rng.standard_normal((2, 3, 6)) + 1j * rng.standard_normal((2, 3, 6))
        w = zf_precode_batch(h_hat, [100.0, 0.0, 100.0])
        assert np.all(w[:, :, 1] == 0.0)
