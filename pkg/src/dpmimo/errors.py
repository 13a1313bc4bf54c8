"""Exception hierarchy for the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class DimensionMismatch(SimulationError):
    """Operands have incompatible shapes."""


class NotHermitian(SimulationError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NotPSD(SimulationError):
    """Matrix has an eigenvalue below the negative tolerance floor."""


class Singular(SimulationError):
    """Linear system is singular or numerically indefinite."""


class GeometryInfeasible(SimulationError):
    """Rejection sampling of UE positions would almost never accept."""


class NonPositiveDistance(SimulationError):
    """Pathloss evaluated at a non-positive distance."""


class PilotBudgetExceeded(SimulationError):
    """More pilot symbols requested than the coherence block provides."""


class InsufficientSamples(SimulationError):
    """Too few samples for a statistically meaningful estimate."""


class DegenerateEstimateStatistics(SimulationError):
    """Estimate covariance trace is numerically zero; precoder undefined."""


class RankDeficient(SimulationError):
    """Stacked estimate matrix is too ill-conditioned to invert."""


class TooManyUEs(SimulationError):
    """More spatial streams requested than antennas available."""


class DegenerateTrace(SimulationError):
    """Covariance trace is numerically zero while its power is nonzero."""


class IndefiniteEffectiveNoise(SimulationError):
    """Interference-plus-noise matrix estimate is not positive definite."""


class ConfigError(SimulationError):
    """Malformed configuration file or inconsistent parameter set."""
