"""Run configuration: flat sectioned key-value files mirrored by CLI flags.

A config file is INI-style with sections [sim], [scenario], [forcing]; every
key can be overridden on the command line as --section.key value, and CLI
values win.  All values are parsed from strings by the same converters in
both paths, so a file and its flag equivalent cannot disagree.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

from .scenarios import ForcingSpec, ScenarioSpec


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


def _to_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _to_optional_float(s: str):
    v = s.strip().lower()
    return None if v in ("", "none") else float(s)


def _to_optional_str(s: str):
    v = s.strip()
    return None if v == "" or v.lower() == "none" else v


# section -> key -> converter; the single source of truth for file keys and
# the mirrored --section.key CLI flags
CONFIG_SCHEMA = {
    "sim": {
        "n": int,
        "nu": float,
        "T": float,
        "samples": int,
        "c_cfl": float,
        "dt_cap": _to_optional_float,
        "seed": int,
        "outdir": _to_optional_str,
        "gate_residual": float,
        "lp_gate_rel": float,
        "c_gn": _to_optional_float,
        "save_snapshots": _to_bool,
    },
    "scenario": {
        "kind": str,
        "p": float,
        "a": float,
        "gamma": float,
        "seed": int,
        "delta_coeff": float,
        "delta_exp": float,
    },
    "forcing": {
        "kind": str,
        "amplitude": float,
        "modulation": str,
        "mod_freq": float,
        "gamma": float,
        "seed": int,
        "rotation_rate": float,
    },
}


@dataclass(frozen=True)
class SimConfig:
    n: int = 128
    nu: float = 1e-3
    t_final: float = 1.0
    samples: int = 100
    c_cfl: float = 0.4
    dt_cap: float | None = None
    seed: int = 0
    outdir: str | None = None
    gate_residual: float = 1e-6
    lp_gate_rel: float = 1e-6
    c_gn: float | None = None
    save_snapshots: bool = False
    scenario: ScenarioSpec = field(default_factory=lambda: ScenarioSpec("taylor_green"))
    forcing: ForcingSpec = field(default_factory=ForcingSpec)

    @property
    def p(self) -> float:
        return self.scenario.p

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"sim.n = {self.n} must be a power of two, >= 8")
        if self.nu < 0:
            raise ConfigError(f"sim.nu = {self.nu} must be >= 0")
        if not (self.t_final > 0):
            raise ConfigError(f"sim.T = {self.t_final} must be positive")
        if self.samples < 10:
            raise ConfigError(f"sim.samples = {self.samples} must be >= 10")
        if not (0 < self.c_cfl <= 1.0):
            raise ConfigError(f"sim.c_cfl = {self.c_cfl} must lie in (0, 1]")
        if self.dt_cap is not None and not (self.dt_cap > 0):
            raise ConfigError(f"sim.dt_cap = {self.dt_cap} must be positive")
        if self.c_gn is not None and not (self.c_gn > 0):
            raise ConfigError(f"sim.c_gn = {self.c_gn} must be positive")

    @property
    def effective_dt_cap(self) -> float:
        """Hard cap dt <= T/1000, tightened further by an explicit dt_cap."""
        cap = self.t_final / 1000.0
        if self.dt_cap is not None:
            cap = min(cap, self.dt_cap)
        return cap

    @property
    def sample_times(self):
        return [i * self.t_final / self.samples for i in range(self.samples + 1)]

    def to_mapping(self) -> dict:
        """Flat section/key echo (strings) for manifests."""
        sim = {
            "n": self.n, "nu": self.nu, "T": self.t_final, "samples": self.samples,
            "c_cfl": self.c_cfl, "dt_cap": self.dt_cap, "seed": self.seed,
            "outdir": self.outdir, "gate_residual": self.gate_residual,
            "lp_gate_rel": self.lp_gate_rel, "c_gn": self.c_gn,
            "save_snapshots": self.save_snapshots,
        }
        scen = {f.name: getattr(self.scenario, f.name) for f in fields(self.scenario)}
        forc = {f.name: getattr(self.forcing, f.name) for f in fields(self.forcing)}
        return {"sim": sim, "scenario": scen, "forcing": forc}


_SIM_ATTR = {"n": "n", "nu": "nu", "T": "t_final", "samples": "samples",
             "c_cfl": "c_cfl", "dt_cap": "dt_cap", "seed": "seed", "outdir": "outdir",
             "gate_residual": "gate_residual", "lp_gate_rel": "lp_gate_rel",
             "c_gn": "c_gn", "save_snapshots": "save_snapshots"}


def build_config(values: dict) -> SimConfig:
    """Build a SimConfig from {(section, key): string_value}; unknown keys and
    unparsable values raise ConfigError naming the field."""
    parsed = {}
    for (section, key), raw in values.items():
        schema = CONFIG_SCHEMA.get(section)
        if schema is None:
            raise ConfigError(f"unknown config section [{section}]")
        conv = schema.get(key)
        if conv is None:
            raise ConfigError(f"unknown config key {section}.{key}")
        try:
            parsed[(section, key)] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from None

    sim_kwargs = {_SIM_ATTR[k]: v for (s, k), v in parsed.items() if s == "sim"}
    scen_kwargs = {k: v for (s, k), v in parsed.items() if s == "scenario"}
    forc_kwargs = {k: v for (s, k), v in parsed.items() if s == "forcing"}
    try:
        scenario = ScenarioSpec(**{"kind": "taylor_green", **scen_kwargs})
        forcing = ForcingSpec(**forc_kwargs)
        return SimConfig(scenario=scenario, forcing=forcing, **sim_kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def read_config_file(path) -> dict:
    """Read an INI config file into {(section, key): string_value}."""
    cp = configparser.ConfigParser()
    cp.optionxform = str        # keys are case-sensitive (sim.T vs sim.t)
    with open(path) as fh:
        cp.read_file(fh, source=str(path))
    values = {}
    for section in cp.sections():
        if section not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}: unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in CONFIG_SCHEMA[section]:
                raise ConfigError(f"{path}: unknown config key {section}.{key}")
            values[(section, key)] = raw
    return values


def load_config(path=None, overrides: dict | None = None) -> SimConfig:
    """Config file (optional) merged with CLI overrides (strings); CLI wins."""
    values = read_config_file(path) if path is not None else {}
    if overrides:
        values.update(overrides)
    return build_config(values)


def with_nu(config: SimConfig, nu: float, outdir=None) -> SimConfig:
    return replace(config, nu=nu, outdir=outdir if outdir is not None else config.outdir)
