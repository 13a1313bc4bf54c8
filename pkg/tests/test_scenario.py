"""Cell geometry, UE placement, pathloss, shadowing, cluster angles."""
import numpy as np
import pytest
from scipy import stats

from dpmimo.errors import GeometryInfeasible, NonPositiveDistance
from dpmimo.scenario import (
    Geometry,
    draw_cluster_angles,
    draw_positions,
    drop_ues,
    pathloss_db,
)


class TestPathloss:
    def test_reference_distance(self):
        # log term vanishes at 1 m
        assert pathloss_db(1.0) == pytest.approx(-35.3, abs=1e-12)

    def test_hundred_meters(self):
        assert pathloss_db(100.0) == pytest.approx(-110.5, abs=1e-12)

    def test_shadow_term_added(self):
        assert pathloss_db(100.0, 3.5) == pytest.approx(-107.0, abs=1e-12)

    def test_vector_input(self):
        out = pathloss_db(np.array([1.0, 100.0]))
        np.testing.assert_allclose(out, [-35.3, -110.5], atol=1e-12)

    def test_nonpositive_distance(self):
        with pytest.raises(NonPositiveDistance):
            pathloss_db(0.0)
        with pytest.raises(NonPositiveDistance):
            pathloss_db(-3.0)


class TestGeometry:
    def test_defaults(self):
        g = Geometry()
        assert g.side == 500.0 and g.min_distance == 15.0

    def test_invalid(self):
        with pytest.raises(GeometryInfeasible):
            Geometry(side=0.0)
        with pytest.raises(GeometryInfeasible):
            Geometry(min_distance=-1.0)
        with pytest.raises(GeometryInfeasible):
            Geometry(side=100.0, min_distance=50.0)


class TestPositions:
    def test_distance_bounds_default_geometry(self):
        rng = np.random.default_rng(2)
        pos = draw_positions(10, Geometry(), rng)
        d = np.hypot(pos[:, 0], pos[:, 1])
        assert np.all(d >= 15.0)
        assert np.all(d <= 250.0 * np.sqrt(2.0) + 1e-9)

    def test_mean_is_bs_position_without_exclusion(self):
        rng = np.random.default_rng(3)
        pos = draw_positions(100_000, Geometry(min_distance=0.0), rng)
        # per-axis std is 500/sqrt(12) ~ 144, so the mean sits within
        # a few times 144/sqrt(n) of the BS
        np.testing.assert_allclose(pos.mean(axis=0), [0.0, 0.0], atol=2.5)

    def test_marginals_uniform(self):
        rng = np.random.default_rng(4)
        pos = draw_positions(100_000, Geometry(min_distance=0.0), rng)
        for axis in range(2):
            ks = stats.kstest(pos[:, axis], "uniform", args=(-250.0, 500.0))
            assert ks.statistic < 0.01

    def test_deterministic(self):
        a = draw_positions(7, Geometry(), np.random.default_rng(9))
        b = draw_positions(7, Geometry(), np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)


class TestClusterAngles:
    def test_within_spread(self):
        rng = np.random.default_rng(5)
        phi = 0.3
        draws = draw_cluster_angles(phi, 10_000, rng)
        assert np.all(np.abs(draws - phi) <= np.deg2rad(40.0))

    def test_zero_spread_returns_nominal(self):
        rng = np.random.default_rng(6)
        out = draw_cluster_angles(0.7, 1, rng, spread_deg=0.0)
        np.testing.assert_allclose(out, [0.7], atol=1e-15)

    def test_mean_is_nominal(self):
        rng = np.random.default_rng(7)
        phi = -0.4
        draws = draw_cluster_angles(phi, 1_000_000, rng)
        assert abs(draws.mean() - phi) <= 1e-3


class TestDropUes:
    def test_fields_consistent(self):
        rng = np.random.default_rng(8)
        ues = drop_ues(10, Geometry(), rng)
        assert len(ues) == 10
        for ue in ues:
            assert ue.distance == pytest.approx(np.hypot(*ue.position))
            assert ue.distance >= 15.0
            expected_beta = 10.0 ** (pathloss_db(ue.distance, ue.shadow_db) / 10.0)
            assert ue.beta == pytest.approx(expected_beta, rel=1e-12)
            assert ue.nominal_angle == pytest.approx(
                np.arctan2(ue.position[0], ue.position[1])
            )
            assert np.all(
                np.abs(ue.cluster_angles - ue.nominal_angle) <= np.deg2rad(40.0)
            )
            assert ue.cluster_angles.shape == (6,)

    def test_shadow_standard_deviation(self):
        rng = np.random.default_rng(9)
        ues = drop_ues(100_000, Geometry(), rng, n_clusters=1)
        sd = np.std([ue.shadow_db for ue in ues])
        assert abs(sd - 7.0) <= 0.1

    def test_deterministic(self):
        a = drop_ues(5, Geometry(), np.random.default_rng(10))
        b = drop_ues(5, Geometry(), np.random.default_rng(10))
        for ua, ub in zip(a, b):
            np.testing.assert_array_equal(ua.position, ub.position)
            np.testing.assert_array_equal(ua.cluster_angles, ub.cluster_angles)
            assert ua.beta == ub.beta
