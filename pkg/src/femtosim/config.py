"""Network configuration: parameter set, validation, and the flat config-file format.

All powers are handled internally in milliwatts and all SINR thresholds in
linear scale; dB/dBm appear only in the configuration and in reports.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .radio import db_to_linear, dbm_to_mw, mw_to_dbm

COUNT_MODES = ("poisson", "fixed")
STRATEGIES = ("split", "pc", "sic")


class ConfigError(ValueError):
    """Invalid configuration value or file."""


@dataclass(frozen=True)
class NetworkConfig:
    """Scalar parameters of one simulated network.

    Defaults follow the usual two-tier simulation parameter set (25 channels
    and macro users, 5 femto users per cell, 20/25 dB SINR thresholds,
    -95 dBm noise, 400 m / 30 m radii, exponents 2 / 3 / 3.5).  `kappa_m`
    (the uplink interference margin) and `p_femto_const_dbm` are not part of
    that set; the defaults here are this package's calibrated choices and
    both are reported in every run manifest.
    """

    n_f_mean: float = 20.0            # mean femtocells per macrocell
    femtocell_count_mode: str = "poisson"
    n_channels: int = 25
    n_macro_users: int = 25
    n_femto_users_per_cell: int = 5
    beta_m_db: float = 20.0           # macro SINR threshold (dB)
    beta_f_db: float = 25.0           # femto SINR threshold (dB)
    kappa_m: float = 4.2              # BS interference margin (linear, > 1)
    noise_dbm: float = -95.0
    r_macro_m: float = 400.0
    r_femto_m: float = 30.0
    alpha: float = 2.0                # femto user -> own FAP
    psi: float = 3.0                  # macro user -> FAP
    phi: float = 3.5                  # links to the BS, femto cross-tier
    gamma: int = 5                    # channels given to the femto tier (split)
    epsilon: float = 0.0              # SIC residual fraction
    p_femto_const_dbm: float | None = None   # None: derived, see p_femto_const_mw
    min_distance_m: float = 1.0
    seed: int = 1
    replicates: int = 1000

    # -- derived linear-scale values ------------------------------------

    @property
    def beta_m(self) -> float:
        return db_to_linear(self.beta_m_db)

    @property
    def beta_f(self) -> float:
        return db_to_linear(self.beta_f_db)

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_dbm)

    @property
    def p_femto_const_mw(self) -> float:
        """Constant femto transmit power for the split scheme.

        When not set explicitly it is derived so that a cell-edge femto user
        meets the femto threshold over noise alone: beta_f * sigma^2 * r_f^alpha.
        """
        if self.p_femto_const_dbm is not None:
            return dbm_to_mw(self.p_femto_const_dbm)
        return self.beta_f * self.noise_mw * self.r_femto_m ** self.alpha

    @property
    def p_femto_const_dbm_resolved(self) -> float:
        return mw_to_dbm(self.p_femto_const_mw)

    def validate(self) -> "NetworkConfig":
        """Check every invariant; raise ConfigError naming the violated rule."""
        errs = []
        if self.n_f_mean < 0:
            errs.append("n_f_mean must be >= 0")
        if self.femtocell_count_mode not in COUNT_MODES:
            errs.append(f"femtocell_count_mode must be one of {COUNT_MODES}")
        if self.n_channels != self.n_macro_users:
            errs.append("n_channels must equal n_macro_users")
        if self.n_channels <= 0:
            errs.append("n_channels must be positive")
        if self.n_femto_users_per_cell <= 0:
            errs.append("n_femto_users_per_cell must be positive")
        if self.n_femto_users_per_cell > self.n_channels:
            errs.append("n_femto_users_per_cell must not exceed n_channels")
        if not (0 <= self.gamma <= self.n_channels):
            errs.append("gamma must lie in [0, n_channels]")
        if self.gamma != 0 and self.gamma < self.n_femto_users_per_cell:
            errs.append("gamma < n_femto_users_per_cell (split scheme requires gamma >= F)")
        if not self.kappa_m > 1.0:
            errs.append("kappa_m must be > 1 (interference budget would be empty)")
        if not (0.0 <= self.epsilon < 1.0):
            errs.append("epsilon must lie in [0, 1)")
        if not self.r_femto_m < self.r_macro_m:
            errs.append("r_femto_m must be smaller than r_macro_m")
        if self.r_femto_m <= 0:
            errs.append("r_femto_m must be positive")
        for name in ("alpha", "psi", "phi"):
            if getattr(self, name) < 2.0:
                errs.append(f"{name} must be >= 2")
        if not self.min_distance_m > 0:
            errs.append("min_distance_m must be positive")
        if not (0 <= self.seed < 2 ** 63):
            errs.append("seed must be a non-negative 63-bit integer")
        if self.replicates < 1:
            errs.append("replicates must be >= 1")
        if errs:
            raise ConfigError("; ".join(errs))
        return self

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(NetworkConfig)}
_INT_FIELDS = {"n_channels", "n_macro_users", "n_femto_users_per_cell",
               "gamma", "seed", "replicates"}
_STR_FIELDS = {"femtocell_count_mode"}
_OPTIONAL_FLOAT_FIELDS = {"p_femto_const_dbm"}


def _coerce(key: str, raw: str):
    if key in _STR_FIELDS:
        return raw
    if key in _OPTIONAL_FLOAT_FIELDS:
        if raw.lower() in ("auto", "none", "null"):
            return None
        return float(raw)
    if key in _INT_FIELDS:
        return int(raw)
    return float(raw)


def parse_config_text(text: str, source: str = "<config>") -> NetworkConfig:
    """Parse the flat `key = value` format (one parameter per line, # comments)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown parameter {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate parameter {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return NetworkConfig(**values)


def apply_overrides(config: NetworkConfig, overrides: dict[str, str]) -> NetworkConfig:
    changes = {}
    for key, raw in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown parameter {key!r} in override")
        changes[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    return config.replace(**changes)


def load_config(path: str | None, overrides: dict[str, str] | None = None,
                use_defaults: bool = False) -> NetworkConfig:
    """Load a config from a flat text file or a JSON run manifest.

    A manifest written by the experiment runner can be fed back verbatim:
    its `config` section reproduces the run exactly.
    """
    if path is None:
        if not use_defaults:
            raise ConfigError("no config file given (pass --defaults to use Table defaults)")
        config = NetworkConfig()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        if path.endswith(".json"):
            payload = json.loads(text)
            section = payload.get("config", payload)
            config = NetworkConfig(**section)
        else:
            config = parse_config_text(text, source=path)
    if overrides:
        config = apply_overrides(config, overrides)
    return config.validate()


def config_to_text(config: NetworkConfig) -> str:
    lines = []
    for f in dataclasses.fields(NetworkConfig):
        value = getattr(config, f.name)
        if value is None:
            value = "auto"
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
