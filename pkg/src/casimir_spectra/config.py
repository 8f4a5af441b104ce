"""Run configuration: unit parsing, material presets and config files.

Every user-facing quantity is a string with an optional unit suffix and is
converted to SI here, at the boundary. ``RunConfig`` keeps the raw strings
too, so a run can be written out and replayed exactly.
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .materials import VACUUM, Material, Model, ev_to_angular_frequency
from .quadrature import QuadratureSpec


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12}
_TEMPERATURE = {"K": 1.0}
_NUMBER = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"


def _split(text: str, field_name: str):
    m = re.fullmatch(_NUMBER + r"\s*(\S*)", text.strip())
    if not m:
        raise ConfigError(field_name, f"cannot parse {text!r}")
    return float(m.group(1)), m.group(2)


def parse_length(text: str, field_name: str = "gap") -> float:
    value, unit = _split(text, field_name)
    if unit not in _LENGTH and unit != "":
        raise ConfigError(field_name, f"unknown length unit {unit!r}")
    return value * _LENGTH.get(unit, 1.0)


def parse_temperature(text: str, field_name: str = "temp") -> float:
    value, unit = _split(text, field_name)
    if unit not in _TEMPERATURE and unit != "":
        raise ConfigError(field_name, f"unknown temperature unit {unit!r}")
    return value


def parse_frequency(text: str, field_name: str) -> float:
    """Angular frequency in rad/s; ``eV`` values are converted via ``E / hbar``."""
    value, unit = _split(text, field_name)
    if unit == "eV":
        if not value > 0:
            raise ConfigError(field_name, "must be positive")
        return ev_to_angular_frequency(value)
    if unit in ("", "rad/s"):
        return value
    raise ConfigError(field_name, f"unknown frequency unit {unit!r}")


def parse_gaps(text: str, points: int = 5) -> Tuple[float, ...]:
    """``"162nm"``, ``"162nm,400nm"`` or the inclusive range ``"162nm..750nm"``."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = parse_length(lo_s), parse_length(hi_s)
        if points < 2:
            raise ConfigError("gap_points", "a range needs at least 2 points")
        if not lo < hi:
            raise ConfigError("gap", "range must be strictly increasing")
        gaps = tuple(float(x) for x in np.linspace(lo, hi, points))
    else:
        gaps = tuple(parse_length(part) for part in text.split(","))
        if any(b <= a for a, b in zip(gaps, gaps[1:])):
            raise ConfigError("gap", "gap list must be strictly increasing")
    if not all(g > 0 for g in gaps):
        raise ConfigError("gap", "separations must be positive")
    return gaps


def load_presets(path: Optional[Path] = None) -> Dict[str, Material]:
    parser = configparser.ConfigParser()
    if path is None:
        parser.read_string(resources.files(__package__).joinpath("presets.cfg").read_text())
    else:
        parser.read(path)
    return {name: _material_from(dict(parser[name]), name) for name in parser.sections()}


def _material_from(fields: Dict[str, str], label: str) -> Material:
    model_name = fields.get("model", "drude").strip().lower()
    try:
        model = Model(model_name)
    except ValueError:
        raise ConfigError("model", f"unknown model {model_name!r} in {label}") from None
    if model is Model.VACUUM:
        return VACUUM
    if "omega_p" not in fields:
        raise ConfigError("omega_p", f"missing for {label}")
    wp = parse_frequency(fields["omega_p"], "omega_p")
    nu = parse_frequency(fields.get("nu", "0"), "nu") if model is Model.DRUDE else 0.0
    if not wp > 0:
        raise ConfigError("omega_p", "must be positive")
    if not nu >= 0:
        raise ConfigError("nu", "must be non-negative")
    return Material(model, wp, nu)


DEFAULTS = {
    "temp": "300K",
    "format": "pretty",
    "rel_tol": "1e-7",
    "gap_points": "5",
    "fraction": "0.9",
    "grid": "200",
    "var": "v",
}

KEYS = ("preset", "model", "omega_p", "nu", "epsilon", "gap", "gap_points", "temp",
        "radius", "format", "rel_tol", "fraction", "grid", "var")


@dataclass
class RunConfig:
    material: Material
    material_label: str
    gaps: Tuple[float, ...]
    temperature: float
    radius: Optional[float]
    output_format: str
    quadrature: QuadratureSpec
    fraction: float
    grid: int
    variable: str
    raw: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_raw(cls, raw: Dict[str, str], presets: Optional[Dict[str, Material]] = None) -> "RunConfig":
        unknown = set(raw) - set(KEYS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        merged = dict(DEFAULTS)
        merged.update({k: v for k, v in raw.items() if v is not None})

        inline = any(k in merged for k in ("model", "omega_p", "nu"))
        sources = [k for k in ("preset", "epsilon") if k in merged] + (["inline"] if inline else [])
        if len(sources) != 1:
            raise ConfigError("preset", "give exactly one of --preset, --epsilon vacuum, "
                                        "or an inline material (--omega-p/--nu/--model)")
        if "preset" in merged:
            presets = load_presets() if presets is None else presets
            name = merged["preset"]
            if name not in presets:
                raise ConfigError("preset", f"unknown preset {name!r}; known: {', '.join(sorted(presets))}")
            material, label = presets[name], name
        elif "epsilon" in merged:
            if merged["epsilon"].strip().lower() not in ("vacuum", "1"):
                raise ConfigError("epsilon", "only 'vacuum' is supported")
            material, label = VACUUM, "vacuum"
        else:
            fields = {k: merged[k] for k in ("model", "omega_p", "nu") if k in merged}
            material, label = _material_from(fields, "inline material"), "inline"

        if "gap" not in merged:
            raise ConfigError("gap", "required")
        try:
            points = int(merged["gap_points"])
        except ValueError:
            raise ConfigError("gap_points", "must be an integer") from None
        gaps = parse_gaps(merged["gap"], points)
        temperature = parse_temperature(merged["temp"])
        if not temperature > 0:
            raise ConfigError("temp", "must be positive")
        radius = parse_length(merged["radius"], "radius") if "radius" in merged else None
        if radius is not None and not radius > 0:
            raise ConfigError("radius", "must be positive")
        fmt = merged["format"]
        if fmt not in ("csv", "json", "pretty"):
            raise ConfigError("format", f"must be csv, json or pretty, got {fmt!r}")
        try:
            spec = QuadratureSpec(rel_tol=float(merged["rel_tol"]))
        except ValueError as exc:
            raise ConfigError("rel_tol", str(exc)) from None
        try:
            fraction = float(merged["fraction"])
            grid = int(merged["grid"])
        except ValueError:
            raise ConfigError("fraction", "fraction must be a number and grid an integer") from None
        if not 0 < fraction < 1:
            raise ConfigError("fraction", "must lie in (0, 1)")
        if grid < 2:
            raise ConfigError("grid", "need at least 2 grid points")
        variable = merged["var"]
        if variable not in ("v", "u", "omega", "k_perp"):
            raise ConfigError("var", f"unknown spectral variable {variable!r}")
        return cls(material, label, gaps, temperature, radius, fmt, spec, fraction, grid,
                   variable, {k: merged[k] for k in KEYS if k in merged})


def read_config_file(path: Path) -> Dict[str, str]:
    """Flat ``key = value`` text, or a JSON document previously written by the CLI."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        data = data.get("config", data)
        return {str(k): str(v) for k, v in data.items()}
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}", "expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
