"""Cell geometry, UE placement, pathloss, shadowing, scattering angles.

The cell is a square centered on the BS. UE positions are drawn uniformly
over the square with a small disk around the BS removed; large-scale
fading follows a log-distance model with lognormal shadowing.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryInfeasible, NonPositiveDistance

# log-distance pathloss constants, distance in meters, result in dB
PATHLOSS_REF_DB = -35.3
PATHLOSS_EXPONENT_DB = 37.6


@dataclass(frozen=True)
class Geometry:
    """Square cell of side `side` meters, BS at `bs_position`."""

    side: float = 500.0
    min_distance: float = 15.0
    bs_position: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.side <= 0.0:
            raise GeometryInfeasible(f"side {self.side} must be positive")
        if self.min_distance < 0.0:
            raise GeometryInfeasible(
                f"min_distance {self.min_distance} must be nonnegative"
            )
        # the removed disk must not swallow the square
        if self.min_distance >= self.side / 2.0:
            raise GeometryInfeasible(
                f"min_distance {self.min_distance} leaves almost no area "
                f"in a side-{self.side} square"
            )


@dataclass(frozen=True)
class UEDrop:
    """Large-scale state of one UE for one realization."""

    position: np.ndarray          # (2,) meters relative to the BS
    distance: float               # meters
    nominal_angle: float          # radians from array broadside
    shadow_db: float
    beta: float                   # linear large-scale fading coefficient
    cluster_angles: np.ndarray    # (n_clusters,) radians


def pathloss_db(distance, shadow_db=0.0):
    """Large-scale fading in dB: log-distance loss plus a shadowing term."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0.0):
        raise NonPositiveDistance(f"distance must be positive, got {distance}")
    return PATHLOSS_REF_DB - PATHLOSS_EXPONENT_DB * np.log10(d) + shadow_db


def draw_positions(k, geometry, rng, max_batches=1000):
    """Uniform positions over the square minus the inner disk.

    Rejection sampling in batches; the acceptance ratio is near one for
    the default geometry so this loop runs once or twice in practice.
    """
    accepted = np.empty((0, 2))
    half = geometry.side / 2.0
    for _ in range(max_batches):
        need = k - accepted.shape[0]
        if need <= 0:
            break
        batch = rng.uniform(-half, half, size=(2 * need + 8, 2))
        d = np.hypot(batch[:, 0], batch[:, 1])
        keep = batch[d >= geometry.min_distance]
        accepted = np.vstack([accepted, keep])
    if accepted.shape[0] < k:
        raise GeometryInfeasible(
            f"could not place {k} UEs after {max_batches} batches"
        )
    return accepted[:k] + np.asarray(geometry.bs_position)


def draw_cluster_angles(nominal_angle, n_clusters, rng, spread_deg=40.0):
    """Scattering cluster angles, uniform around the nominal direction."""
    spread = np.deg2rad(spread_deg)
    return rng.uniform(nominal_angle - spread, nominal_angle + spread, n_clusters)


def drop_ues(k, geometry, rng, n_clusters=6, shadow_std_db=7.0, spread_deg=40.0):
    """Draw the full large-scale state for k UEs.

    Angles are measured from the array broadside (+y axis), with the
    linear array lying along the x axis, so a UE straight ahead of the
    array is at angle 0.
    """
    pos = draw_positions(k, geometry, rng)
    rel = pos - np.asarray(geometry.bs_position)
    dist = np.hypot(rel[:, 0], rel[:, 1])
    angles = np.arctan2(rel[:, 0], rel[:, 1])
    shadow = rng.normal(0.0, shadow_std_db, size=k)
    beta = 10.0 ** (pathloss_db(dist, shadow) / 10.0)
    drops = []
    for i in range(k):
        clusters = draw_cluster_angles(angles[i], n_clusters, rng, spread_deg)
        drops.append(
            UEDrop(
                position=rel[i].copy(),
                distance=float(dist[i]),
                nominal_angle=float(angles[i]),
                shadow_db=float(shadow[i]),
                beta=float(beta[i]),
                cluster_angles=clusters,
            )
        )
    return drops
