"""System configuration, config-file parsing, and run digests."""

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError

_INT_FIELDS = {
    "m", "k", "tau_c", "tau_p", "tau_uni_p", "n_clusters",
    "seed", "drops", "mc_trials",
}


@dataclass(frozen=True)
class SystemConfig:
    """All scalar parameters of one simulation run.

    m counts polarization ports at the BS (m/2 physical dual-polarized
    elements); the uni-polarized baseline uses m/2 antennas with doubled
    powers and half the pilot length so both setups spend the same total
    pilot energy and downlink power. Powers are mW, noise is dBm.
    """

    m: int = 100
    k: int = 10
    tau_c: int = 200
    tau_p: int = None
    tau_uni_p: int = None
    xpd_db: float = 7.0
    n_clusters: int = 6
    asd_deg: float = 5.0
    sigma_sf: float = 7.0
    noise_dbm: float = -94.0
    p_kv: float = 100.0
    p_kh: float = 100.0
    rho_kv: float = 100.0
    rho_kh: float = 100.0
    p_uni: float = 200.0
    rho_uni: float = 200.0
    bandwidth_mhz: float = 20.0
    seed: int = 1
    drops: int = 200
    mc_trials: int = 1000

    def __post_init__(self):
        if self.tau_p is None:
            object.__setattr__(self, "tau_p", 2 * self.k)
        if self.tau_uni_p is None:
            object.__setattr__(self, "tau_uni_p", self.k)
        if self.m < 2 or self.m % 2 != 0:
            raise ConfigError(f"m must be an even port count >= 2, got {self.m}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.tau_p < 2 * self.k:
            raise ConfigError(
                f"tau_p {self.tau_p} cannot carry {2 * self.k} orthogonal pilots"
            )
        if self.tau_p > self.tau_c:
            raise ConfigError(f"tau_p {self.tau_p} exceeds tau_c {self.tau_c}")
        if not 1 <= self.tau_uni_p <= self.tau_c:
            raise ConfigError(f"tau_uni_p {self.tau_uni_p} outside [1, tau_c]")
        if self.tau_uni_p < self.k:
            raise ConfigError(
                f"tau_uni_p {self.tau_uni_p} cannot carry {self.k} orthogonal pilots"
            )
        for name in ("p_kv", "p_kh", "rho_kv", "rho_kh", "p_uni", "rho_uni"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.n_clusters < 1:
            raise ConfigError("n_clusters must be >= 1")
        if self.asd_deg < 0.0 or self.sigma_sf < 0.0:
            raise ConfigError("asd_deg and sigma_sf must be nonnegative")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if self.drops < 1:
            raise ConfigError("drops must be >= 1")
        if self.mc_trials < 100:
            raise ConfigError("mc_trials must be >= 100")

    @property
    def noise_var_mw(self):
        """Total receiver noise power in linear mW."""
        return 10.0 ** (self.noise_dbm / 10.0)

    @property
    def prelog_dual(self):
        return (self.tau_c - self.tau_p) / self.tau_c

    @property
    def prelog_uni(self):
        return (self.tau_c - self.tau_uni_p) / self.tau_c


def load_config(path):
    """Parse a flat key=value config file into a SystemConfig.

    Keys mirror the SystemConfig field names exactly; unknown keys are
    errors. Blank lines and #-comments are ignored.
    """
    known = {f.name for f in fields(SystemConfig)}
    values = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = int(value) if key in _INT_FIELDS else float(value)
            except ValueError as exc:
                raise ConfigError(
                    f"{path}:{lineno}: cannot parse {value!r} for {key}"
                ) from exc
    return SystemConfig(**values)


def config_digest(cfg):
    """Short stable hash identifying one parameter set."""
    canonical = ";".join(
        f"{f.name}={getattr(cfg, f.name)!r}" for f in sorted(
            fields(cfg), key=lambda f: f.name
        )
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]
