"""TOML configuration files.

Bead labels in config files are 1-based, matching the usual numbering of
the chain (bead 1 touches the left wall). Unknown sections or keys are
rejected. Schema::

    [chain]                       # required for custom runs
    springs = [2, 2, 1, 1, 0.1, 0.1]   # n + 1 values, walls included
    masses = [1, 1, 1, 1, 1]           # optional, default 1
    pinning = [0, 0, 0, 0, 0]          # optional, default 0
    spacing = 1.0                      # optional

    [baths]
    frictions = [1, 1, 0, 1, 1]
    temperatures = [1, 0.5, 0, 0.2, 0.1]
    hot = [1, 2]
    cold = [4, 5]

    [quadrature]
    omega_max = 20.0              # optional, default 10 x frequency scale
    points = 200001
    scheme = "trapezoid"          # or "adaptive"

    [run]
    regime = "classical"          # classical | quantum | md | effective
    reversal = "mirror"           # mirror | swap
    dump_every = 1000             # md only: thinned trajectory dump

    [md]                          # MDConfig fields; measure_bond is 1-based
    [fk]                          # amplitudes, period, phase, form
    [effective]                   # base_frictions, slope, t_hot, t_cold
    [sweep]                       # axis overrides for named experiments
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .md import FKPotentialSpec, MDConfig
from .model import BathSpec, ChainSpec, EffectiveFrictionSpec, QuadratureSpec

SCHEMA = {
    "chain": {"springs", "masses", "pinning", "spacing"},
    "baths": {"frictions", "temperatures", "hot", "cold"},
    "quadrature": {"omega_max", "points", "scheme"},
    "run": {"regime", "reversal", "dump_every"},
    "md": {"dt", "equilibration_steps", "production_steps", "realizations", "base_seed", "measure_bond", "chunk_steps"},
    "fk": {"amplitudes", "period", "phase", "form"},
    "effective": {"base_frictions", "slope", "t_hot", "t_cold"},
    "sweep": None,  # keys checked by the experiment that consumes them
}


class ConfigError(ValueError):
    pass


def check_config(cfg: dict) -> dict:
    for section, body in cfg.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        allowed = SCHEMA[section]
        if allowed is not None:
            extra = set(body) - allowed
            if extra:
                raise ConfigError(f"unknown keys in [{section}]: {sorted(extra)}")
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return check_config(cfg)


def _require(cfg: dict, section: str) -> dict:
    if section not in cfg:
        raise ConfigError(f"config needs a [{section}] section")
    return cfg[section]


def chain_from_config(cfg: dict) -> ChainSpec:
    sec = _require(cfg, "chain")
    if "springs" not in sec:
        raise ConfigError("[chain] needs springs")
    return ChainSpec.from_springs(
        sec["springs"], masses=sec.get("masses"), pinning=sec.get("pinning"), spacing=sec.get("spacing", 1.0)
    )


def baths_from_config(cfg: dict) -> BathSpec:
    sec = _require(cfg, "baths")
    missing = {"frictions", "temperatures", "hot", "cold"} - set(sec)
    if missing:
        raise ConfigError(f"[baths] is missing {sorted(missing)}")
    return BathSpec(
        sec["frictions"],
        sec["temperatures"],
        [i - 1 for i in sec["hot"]],
        [i - 1 for i in sec["cold"]],
    )


def quad_from_config(cfg: dict) -> QuadratureSpec:
    sec = cfg.get("quadrature", {})
    defaults = QuadratureSpec()
    return QuadratureSpec(
        omega_max=sec.get("omega_max", defaults.omega_max),
        points=int(sec.get("points", defaults.points)),
        scheme=sec.get("scheme", defaults.scheme),
    )


def md_from_config(cfg: dict, seed: int | None = None) -> MDConfig:
    sec = dict(cfg.get("md", {}))
    if "measure_bond" in sec:
        sec["measure_bond"] = tuple(i - 1 for i in sec["measure_bond"])
    if seed is not None:
        sec["base_seed"] = seed
    try:
        return MDConfig(**sec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [md] section: {exc}") from exc


def fk_from_config(cfg: dict) -> FKPotentialSpec | None:
    sec = cfg.get("fk")
    if sec is None:
        return None
    try:
        return FKPotentialSpec(
            sec["amplitudes"], sec.get("period", 1.0), sec.get("phase", 0.0), sec.get("form", "cosine")
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [fk] section: {exc}") from exc


def effective_from_config(cfg: dict) -> tuple[EffectiveFrictionSpec, float, float]:
    sec = _require(cfg, "effective")
    try:
        eff = EffectiveFrictionSpec(sec["base_frictions"], sec.get("slope", 0.0))
        return eff, float(sec["t_hot"]), float(sec["t_cold"])
    except KeyError as exc:
        raise ConfigError(f"[effective] is missing {exc}") from exc
