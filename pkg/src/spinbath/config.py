"""Line-based ``key = value`` scenario and sweep configuration.

Example::

    # weakly coupled ring bath
    N = 16
    K = 2
    J = -5
    ce_mode = isotropic
    delta = -0.075
    bath_mode = heisenberg-like
    omega = 0.15
    seed = 1
    t_max = 30

A document with ``omega_list`` or ``seed_list`` is a sweep.  ``K = N-1``
selects the complete graph.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .model import BATH_MODES, CE_MODES, ConfigurationError, build_topology


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


_ALIASES = {"Δ": "delta", "Ω": "omega", "ε": "eps", "epsilon": "eps", "output_path": "output"}

REQUIRED = ("N", "K", "J", "ce_mode", "delta", "bath_mode", "omega", "seed")
SCENARIO_KEYS = REQUIRED + ("t_max", "dt_sample", "eps", "output", "bound")
SWEEP_KEYS = ("omega_list", "seed_list", "aggregation", "fit_window", "envelope")
SPECTRAL_BOUNDS = ("triangle", "lanczos")
ENVELOPE_FIELDS = ("re_rho23_rectified", "abs_rho23")


@dataclass(frozen=True)
class ScenarioConfig:
    N: int
    K: int
    J: float
    ce_mode: str
    delta: float
    bath_mode: str
    omega: float
    seed: int
    t_max: float = 100.0
    dt_sample: float = 0.05
    eps: float = 1e-12
    output: str | None = None
    bound: str = "triangle"

    def __post_init__(self):
        validate_scenario(self)

    def replace(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class SweepConfig:
    base: ScenarioConfig
    omegas: tuple[float, ...]
    seeds: tuple[int, ...]
    aggregation: str = "per-seed-mean"
    fit_window: tuple[float, float] = (0.02, 0.45)
    envelope: str = "abs_rho23"

    def __post_init__(self):
        if not self.omegas:
            raise ConfigError("omega_list must not be empty")
        if not self.seeds:
            raise ConfigError("seed_list must not be empty")
        if len(set(self.omegas)) != len(self.omegas):
            raise ConfigError("omega_list values must be distinct")
        if self.aggregation != "per-seed-mean":
            raise ConfigError(f"aggregation: unsupported mode {self.aggregation!r} (only per-seed-mean)")
        if self.envelope not in ENVELOPE_FIELDS:
            raise ConfigError(f"envelope: must be one of {ENVELOPE_FIELDS}")
        lo, hi = self.fit_window
        if not 0 < lo < hi:
            raise ConfigError("fit_window: need 0 < low < high")


def default_t_max(K: int, omega: float, delta: float, bath_mode: str) -> float:
    """30 in the Gaussian regime (K*omega <= |delta|), otherwise 100."""
    if bath_mode == "none" or K * omega <= abs(delta):
        return 30.0
    return 100.0


def validate_scenario(cfg: ScenarioConfig):
    if cfg.N < 2:
        raise ConfigError("N: bath needs at least 2 spins")
    if cfg.ce_mode not in CE_MODES:
        raise ConfigError(f"ce_mode: must be one of {CE_MODES}, got {cfg.ce_mode!r}")
    if cfg.bath_mode not in BATH_MODES:
        raise ConfigError(f"bath_mode: must be one of {BATH_MODES}, got {cfg.bath_mode!r}")
    if cfg.omega < 0:
        raise ConfigError("omega: must be >= 0")
    if not cfg.t_max > 0:
        raise ConfigError("t_max: must be positive")
    if not cfg.dt_sample > 0:
        raise ConfigError("dt_sample: must be positive")
    if not 0 < cfg.eps <= 1e-8:
        raise ConfigError("eps: must lie in (0, 1e-8]")
    if cfg.bound not in SPECTRAL_BOUNDS:
        raise ConfigError(f"bound: must be one of {SPECTRAL_BOUNDS}")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    try:
        build_topology(cfg.K, cfg.N)
    except ConfigurationError as exc:
        raise ConfigError(f"K: {exc}") from None


def parse_document(text: str) -> dict[str, tuple[str, int]]:
    """Raw ``{key: (value, line_number)}``; rejects malformed lines and repeats."""
    out: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = (value, lineno)
    return out


def _convert(key, value, lineno, kind):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: cannot parse {value!r}") from None


def _int(s: str) -> int:
    return int(s, 0)


def _float(s: str) -> float:
    # accept a typeset unicode minus
    return float(s.replace("−", "-"))


def load_config(text: str) -> ScenarioConfig | SweepConfig:
    """Parse and validate a configuration document."""
    raw = parse_document(text)
    unknown = sorted(set(raw) - set(SCENARIO_KEYS) - set(SWEEP_KEYS))
    if unknown:
        key = unknown[0]
        raise ConfigError(f"line {raw[key][1]}: unknown key {key!r}")
    is_sweep = "omega_list" in raw or "seed_list" in raw
    required = [k for k in REQUIRED if not (is_sweep and k in ("omega", "seed"))]
    for k in required:
        if k not in raw:
            raise ConfigError(f"missing required key {k!r}")

    def get(key, kind, default=None):
        if key not in raw:
            return default
        v, ln = raw[key]
        return _convert(key, v, ln, kind)

    N = get("N", _int)
    k_raw, k_line = raw["K"]
    K = N - 1 if k_raw.replace(" ", "").upper() == "N-1" else _convert("K", k_raw, k_line, _int)
    omegas = get("omega_list", lambda s: tuple(_float(x) for x in s.split(",") if x.strip()))
    seeds = get("seed_list", lambda s: tuple(_int(x.strip()) for x in s.split(",") if x.strip()))
    omega = get("omega", _float, omegas[0] if omegas else None)
    seed = get("seed", _int, seeds[0] if seeds else None)
    ce_mode = raw["ce_mode"][0]
    bath_mode = raw["bath_mode"][0]
    delta = get("delta", _float)
    t_max = get("t_max", _float)
    if t_max is None:
        t_max = default_t_max(K, max(omegas) if omegas else omega, delta, bath_mode)
    base = ScenarioConfig(
        N=N, K=K, J=get("J", _float), ce_mode=ce_mode, delta=delta,
        bath_mode=bath_mode, omega=omega, seed=seed, t_max=t_max,
        dt_sample=get("dt_sample", _float, 0.05), eps=get("eps", _float, 1e-12),
        output=get("output", str), bound=get("bound", str, "triangle"),
    )
    if not is_sweep:
        return base
    window = get("fit_window", lambda s: tuple(_float(x) for x in s.split(",")), (0.02, 0.45))
    if len(window) != 2:
        raise ConfigError("fit_window: expected 'low, high'")
    return SweepConfig(
        base=base,
        omegas=omegas or (omega,),
        seeds=seeds or (seed,),
        aggregation=get("aggregation", str, "per-seed-mean"),
        fit_window=window,
        envelope=get("envelope", str, "abs_rho23"),
    )


def load_config_file(path) -> ScenarioConfig | SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return load_config(fh.read())
