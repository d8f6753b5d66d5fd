"""Run configuration: a flat TOML schema with CLI overrides.

Four blocks: [constants] for the declared thick-part/section constants,
[solver] for mesh resolution, [experiment] for sweep parameters and
[output] for emission.  Every parse error names the offending key, and a
config hashes to a stable digest that output files embed for
reproducibility.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .assembly import ModelManifold, ThickPartSpec
from .sturm import MeshSpec
from .tube import FillingSlope, Tube

__all__ = ["ConfigError", "RunConfig", "load_config", "config_hash"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class RunConfig:
    # [constants] declared inputs; c2 = 0 means "compute the overlap
    # eigenvalue from the collar problem" instead of overriding it.
    c1: float = 1.0
    c2: float = 1.0
    c_prime: float = 1.0
    c_double_prime: float = 1.0
    big_c: float = 1.0
    margulis: float = 0.1
    tau: float = 2.0
    r_a_infinity: float = 1.0
    d_thick: float = 0.5
    # [solver]
    mesh_n: int = 2048
    grading: str = "geometric"
    grading_ratio: float = 0.9
    # [experiment]
    radii: tuple[float, ...] = (6.0, 12.0, 24.0, 48.0)
    core_length: float = 0.05
    k_tubes: int = 1
    slope: tuple[int, int] = (2, 1)
    i_min: int = 8
    i_max: int = 64
    ct_exponent: int = 2
    growth_exponent: float = 1.0
    min_filling_radius: float = 1.5
    constant_weights: bool = False
    # [output]
    out: str | None = None
    format: str = "csv"

    def mesh(self) -> MeshSpec:
        return MeshSpec(n=self.mesh_n, grading=self.grading, ratio=self.grading_ratio)

    def thick_part(self) -> ThickPartSpec:
        return ThickPartSpec(
            mu_thick=self.c1,
            lambda_overlap_floor=None if self.c2 == 0.0 else self.c2,
            c_prime=self.c_prime,
            c_double_prime=self.c_double_prime,
            big_C=self.big_c,
            d_thick=self.d_thick,
            R_a_infinity=self.r_a_infinity,
        )

    def manifold(self, R: float) -> ModelManifold:
        tube = Tube(R=R, l=self.core_length, slope=FillingSlope(*self.slope))
        return ModelManifold(self.thick_part(), (tube,) * self.k_tubes)


_SCHEMA: dict[str, dict[str, type]] = {
    "constants": {
        "c1": float,
        "c2": float,
        "c_prime": float,
        "c_double_prime": float,
        "big_c": float,
        "margulis": float,
        "tau": float,
        "r_a_infinity": float,
        "d_thick": float,
    },
    "solver": {
        "mesh_n": int,
        "grading": str,
        "grading_ratio": float,
    },
    "experiment": {
        "radii": list,
        "core_length": float,
        "k_tubes": int,
        "slope": list,
        "i_min": int,
        "i_max": int,
        "ct_exponent": int,
        "growth_exponent": float,
        "min_filling_radius": float,
        "constant_weights": bool,
    },
    "output": {
        "out": str,
        "format": str,
    },
}

_POSITIVE = (
    "c1",
    "c_prime",
    "c_double_prime",
    "big_c",
    "margulis",
    "tau",
    "r_a_infinity",
    "d_thick",
    "core_length",
    "growth_exponent",
    "min_filling_radius",
)


def _coerce(section: str, key: str, value, want: type):
    where = f"{section}.{key}"
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if want is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if want is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return value
    raise ConfigError(f"{where}: unsupported value {value!r}")


def _validate(cfg: RunConfig) -> RunConfig:
    for key in _POSITIVE:
        if not getattr(cfg, key) > 0:
            raise ConfigError(f"{key} must be positive, got {getattr(cfg, key)}")
    if cfg.c2 < 0:
        raise ConfigError(f"c2 must be >= 0 (0 = compute), got {cfg.c2}")
    if not cfg.radii:
        raise ConfigError("experiment.radii must be a non-empty sweep")
    if any(not isinstance(R, (int, float)) or isinstance(R, bool) or R <= 0 for R in cfg.radii):
        raise ConfigError(f"experiment.radii must be positive numbers, got {cfg.radii}")
    if len(cfg.slope) != 2:
        raise ConfigError(f"experiment.slope must be a pair, got {cfg.slope}")
    try:
        FillingSlope(*cfg.slope)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"experiment.slope: {e}") from None
    if cfg.k_tubes < 1:
        raise ConfigError(f"experiment.k_tubes must be >= 1, got {cfg.k_tubes}")
    if cfg.i_min < 1 or cfg.i_max < cfg.i_min:
        raise ConfigError(
            f"experiment.i_min/i_max must satisfy 1 <= i_min <= i_max, "
            f"got {cfg.i_min}..{cfg.i_max}"
        )
    if cfg.ct_exponent not in (1, 2):
        raise ConfigError(f"experiment.ct_exponent must be 1 or 2, got {cfg.ct_exponent}")
    if cfg.d_thick < cfg.margulis:
        raise ConfigError(
            f"d_thick must be at least the thin-part threshold margulis "
            f"({cfg.margulis}), got {cfg.d_thick}"
        )
    if cfg.format not in ("csv", "tsv"):
        raise ConfigError(f"output.format must be csv or tsv, got {cfg.format!r}")
    try:
        cfg.mesh()
    except ValueError as e:
        raise ConfigError(f"solver: {e}") from None
    return cfg


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional TOML file plus flat overrides
    (override keys are field names; None values are ignored)."""
    values: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from None
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"invalid TOML in {path}: {e}") from None
        for section, block in data.items():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section {section!r}")
            if not isinstance(block, dict):
                raise ConfigError(f"section {section!r} must be a table")
            for key, value in block.items():
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
                values[key] = _coerce(section, key, value, _SCHEMA[section][key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in RunConfig.__dataclass_fields__:
            raise ConfigError(f"unknown config key {key}")
        values[key] = value
    if "radii" in values:
        values["radii"] = tuple(float(R) for R in values["radii"])
    if "slope" in values:
        slope = values["slope"]
        if not isinstance(slope, (list, tuple)) or len(slope) != 2:
            raise ConfigError(f"experiment.slope must be a pair, got {slope!r}")
        values["slope"] = (slope[0], slope[1])
    return _validate(RunConfig(**values))


def config_hash(cfg: RunConfig) -> str:
    """Stable digest of a config: sha256 of its canonical JSON form.

    The output path is excluded so identical experiments hash identically
    wherever they are written."""
    payload = dataclasses.asdict(cfg)
    payload.pop("out")
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
