"""Run configuration: flat key/value files (YAML or JSON) plus flag overrides.

All quantities are SI. Angular frequencies are in rad/s, not Hz.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .constants import DEFAULT_TRIALS
from .errors import ConfigError, DomainError
from .propagation import DEFAULT_GRID, FresnelConvention
from .spectral import make_gaussian_spectrum
from .states import SourceMode

EXPERIMENTS = ("propagation_check", "pulse_delay", "scaling", "single_run")

ALIASES = {
    "d": "distance_d",
    "eta": "reflectivity_eta",
    "N": "n_photons",
    "convention": "fresnel_convention",
    "out": "output_dir",
    "n": "grid_n",
    "extent": "grid_extent",
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    # spectral envelope (rad/s); envelope_table switches to a tabulated CSV
    omega0: float = 1.2e15
    sigma_omega: float = 1.0e13
    envelope_table: str | None = None
    # beam
    z0: float = 1.0
    # scenario
    distance_d: float = 1500.0
    reflectivity_eta: float = 1.0
    azimuth: float = 0.0
    elevation: float = 0.0
    # source
    n_photons: int = 2
    mode: str = SourceMode.ENTANGLED.value
    N_list: list = field(default_factory=lambda: [2, 4, 9, 16])
    # Monte Carlo
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    tolerance: float = 0.05
    # propagation grid
    grid_n: int = DEFAULT_GRID
    grid_extent: float | None = None
    propagation_distances_z0: list = field(default_factory=lambda: [0.5, 1.0, 3.0])
    fresnel_convention: str = FresnelConvention.STANDARD_HALF.value
    dump_fields: bool = False
    output_dir: str = "qradar_out"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FLOAT = {"omega0", "sigma_omega", "z0", "distance_d", "reflectivity_eta", "azimuth",
          "elevation", "tolerance"}
_OPT_FLOAT = {"grid_extent"}
_INT = {"n_photons", "trials", "seed", "grid_n"}
_STR = {"experiment", "mode", "fresnel_convention", "output_dir"}
_OPT_STR = {"envelope_table"}
_INT_LIST = {"N_list"}
_FLOAT_LIST = {"propagation_distances_z0"}
_BOOL = {"dump_fields"}

FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _as_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(key, f"expected a number, got {value!r}")


def _as_int(key, value):
    if isinstance(value, bool):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    number = _as_float(key, value)
    if not (math.isfinite(number) and number == int(number)):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return int(number)


def _as_bool(key, value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false", "yes", "no", "1", "0"):
        return value.lower() in ("true", "yes", "1")
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def _as_list(key, value, conv):
    if isinstance(value, str):
        value = yaml.safe_load(value) if value.strip().startswith("[") else value.split(",")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, (list, tuple)):
        raise ConfigError(key, f"expected a list, got {value!r}")
    return [conv(key, v) for v in value]


def _coerce(key, value):
    if key in _FLOAT:
        return _as_float(key, value)
    if key in _OPT_FLOAT:
        return None if value is None else _as_float(key, value)
    if key in _INT:
        return _as_int(key, value)
    if key in _STR:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if key in _OPT_STR:
        if value is not None and not isinstance(value, str):
            raise ConfigError(key, f"expected a path string, got {value!r}")
        return value
    if key in _INT_LIST:
        return _as_list(key, value, _as_int)
    if key in _FLOAT_LIST:
        return _as_list(key, value, _as_float)
    if key in _BOOL:
        return _as_bool(key, value)
    raise ConfigError(key, "unknown key")  # pragma: no cover


def _canonical(raw: Mapping[str, Any], source: str) -> dict:
    out = {}
    for key, value in raw.items():
        if not isinstance(key, str):
            raise ConfigError(str(key), f"non-string key in {source}")
        name = ALIASES.get(key, key)
        if name not in FIELDS:
            raise ConfigError(key, f"unknown key in {source}")
        if name in out:
            raise ConfigError(name, f"given twice in {source} (possibly via an alias)")
        out[name] = _coerce(name, value)
    return out


def load_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"{path} is not valid YAML/JSON: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a flat mapping of keys to values")
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(str(key), "nested sections are not supported; use flat keys")
    return data


def parse_config(path=None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Build a validated :class:`RunConfig` from a file and/or overrides.

    Overrides win over file values. Unknown keys, type mismatches and
    out-of-range values raise :class:`ConfigError` naming the key.
    """
    values = _canonical(load_config_file(path), str(path)) if path is not None else {}
    values.update(_canonical(dict(overrides or {}), "overrides"))
    if "experiment" not in values:
        raise ConfigError("experiment", f"required; one of {', '.join(EXPERIMENTS)}")
    config = RunConfig(**values)
    validate(config)
    return config


def validate(c: RunConfig) -> None:
    if c.experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {c.experiment!r}")
    if c.envelope_table is None:
        try:
            make_gaussian_spectrum(c.omega0, c.sigma_omega)
        except DomainError as exc:
            key = "omega0" if not (c.omega0 > 0 and math.isfinite(c.omega0)) else "sigma_omega"
            raise ConfigError(key, str(exc)) from exc
    elif not Path(c.envelope_table).is_file():
        raise ConfigError("envelope_table", f"file not found: {c.envelope_table}")
    _positive("z0", c.z0)
    _positive("distance_d", c.distance_d)
    if not 0.0 <= c.reflectivity_eta <= 1.0:
        raise ConfigError("reflectivity_eta", f"must lie in [0, 1], got {c.reflectivity_eta!r}")
    for key in ("azimuth", "elevation"):
        if not math.isfinite(getattr(c, key)):
            raise ConfigError(key, "must be finite")
    if c.n_photons < 1:
        raise ConfigError("n_photons", f"must be >= 1, got {c.n_photons}")
    try:
        SourceMode(c.mode)
    except ValueError:
        raise ConfigError("mode", f"must be one of {[m.value for m in SourceMode]}, got {c.mode!r}") from None
    if not c.N_list or any(n < 1 for n in c.N_list):
        raise ConfigError("N_list", f"must be a non-empty list of integers >= 1, got {c.N_list}")
    if c.trials < 2:
        raise ConfigError("trials", f"must be >= 2, got {c.trials}")
    if not 0 <= c.seed < 2**64:
        raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {c.seed}")
    _positive("tolerance", c.tolerance)
    if c.grid_n < 16 or c.grid_n & (c.grid_n - 1):
        raise ConfigError("grid_n", f"must be a power of two >= 16, got {c.grid_n}")
    if c.grid_extent is not None:
        _positive("grid_extent", c.grid_extent)
    if not c.propagation_distances_z0 or any(not (x > 0 and math.isfinite(x)) for x in c.propagation_distances_z0):
        raise ConfigError("propagation_distances_z0", "must be a non-empty list of positive numbers")
    try:
        FresnelConvention(c.fresnel_convention)
    except ValueError:
        raise ConfigError(
            "fresnel_convention",
            f"must be one of {[m.value for m in FresnelConvention]}, got {c.fresnel_convention!r}",
        ) from None
    if not c.output_dir:
        raise ConfigError("output_dir", "must not be empty")


def _positive(key, value):
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(key, f"must be positive and finite, got {value!r}")
