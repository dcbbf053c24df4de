"""
Run configuration loading.

Configurations are JSON objects whose physical quantities are strings with explicit
unit suffixes ("28 dBm", "1 ms", "0.01 MHz"). Bare numbers are accepted only for
dimensionless fields (counts, Nakagami m, Rician kappa, path-loss exponents).

Precedence: preset < config file < command-line overrides, merged key by key.
"""

import json
import math
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

from config import PRESET_ALIASES, PRESET_NAMES, PRESETS, SPEED_OF_LIGHT_M_S
from radio.detect import DetectorKind
from radio.topology import DistancePolicy, TopologyError
from simulation.scenario import (
    Architecture,
    EnergyMode,
    FadingKind,
    FadingLaw,
    PlacementMetric,
    ScenarioSpec,
    SimulationError,
    SweepMode,
)
from utils.logging import get_logger
from utils.units import UnitError, linear_to_db, parse_quantity, to_si

logger = get_logger(__name__)

COMMANDS = ("ber", "outage", "energy", "diversity", "place")

# Defaults a command needs when neither preset nor config provides them
COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "diversity": {
        "fading": [
            {"name": "rayleigh", "m_ce_tag": 1, "m_tag_reader": 1},
        ],
    },
    "place": {
        "fading": [{"name": "rayleigh", "m_ce_tag": 1, "m_tag_reader": 1}],
        "architectures": ["multistatic"],
    },
}

# Monte-Carlo size field that --trials overrides, per command
TRIALS_FIELD = {
    "ber": "trials",
    "outage": "topologies",
    "energy": "topologies",
    "place": "t_max",
}

# Sweep dimension per command (and BER mode)
_SWEEP_DIMENSION = {
    ("ber", SweepMode.FIXED_SNR): "ratio",
    ("ber", SweepMode.POWER_SWEEP): "power",
    ("outage", None): "ratio",
    ("energy", None): "power",
}


class ConfigError(Exception):
    """Invalid run configuration; carries the offending field and, for syntax errors, the line."""

    def __init__(
        self, message: str, field: str | None = None, line: int | None = None, column: int | None = None
    ):
        self.message = message
        self.field = field
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        if self.field:
            return f"{self.field}: {self.message}"
        return self.message


# =============================================================================
# Loading and merging
# =============================================================================


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON run configuration; syntax errors report line and column."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}", field=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    return data


def merge_config(
    command: str,
    preset: str | None = None,
    file_config: dict[str, Any] | None = None,
    overrides: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Preset, then config file, then overrides; later sources win key by key."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command '{command}'", field="command")

    merged: dict[str, Any] = dict(COMMAND_DEFAULTS.get(command, {}))
    if preset is not None:
        name = PRESET_ALIASES.get(preset, preset)
        if name not in PRESETS:
            raise ConfigError(
                f"unknown preset '{preset}' (known: {', '.join(PRESET_NAMES)})", field="preset"
            )
        merged.update(PRESETS[name])
    merged.update(file_config or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    declared = merged.pop("command", command)
    if declared != command:
        raise ConfigError(f"configuration is for '{declared}', not '{command}'", field="command")
    return merged


# =============================================================================
# Field parsers
# =============================================================================


def _quantity(value: Any, dimension: str, field: str) -> float:
    return parse_quantity_checked(value, dimension, field).value


def _number(value: Any, field: str, minimum: float | None = None) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"expected a number, got {value!r}", field=field)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=field)
    return float(value)


def _integer(value: Any, field: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=field)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=field)
    return value


def _enum(enum_cls: type, value: Any, field: str):
    try:
        return enum_cls(value)
    except ValueError as e:
        choices = ", ".join(str(m) for m in enum_cls)
        raise ConfigError(f"expected one of {choices}, got {value!r}", field=field) from e


def _enum_list(enum_cls: type, value: Any, field: str) -> tuple:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list", field=field)
    return tuple(_enum(enum_cls, v, f"{field}[{i}]") for i, v in enumerate(value))


def _range(value: Any, field: str, minimum: float = 0.0) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected [low, high]", field=field)
    lo = _number(value[0], f"{field}[0]", minimum)
    hi = _number(value[1], f"{field}[1]", minimum)
    if lo > hi:
        raise ConfigError(f"low {lo} exceeds high {hi}", field=field)
    return lo, hi


def _point(value: Any, field: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected a point [x, y] with length units", field=field)
    return (_quantity(value[0], "length", f"{field}[0]"), _quantity(value[1], "length", f"{field}[1]"))


def parse_sweep(value: Any, dimension: str, field: str = "sweep") -> tuple[float, ...]:
    """
    Sweep given as {"start", "stop", "step"} (inclusive, in the written unit) or as a list.

    Returns SI values. An empty sweep is an error.
    """
    if isinstance(value, list):
        values = tuple(_quantity(v, dimension, f"{field}[{i}]") for i, v in enumerate(value))
    elif isinstance(value, dict):
        missing = [k for k in ("start", "stop", "step") if k not in value]
        if missing:
            raise ConfigError(f"missing {', '.join(missing)}", field=field)
        parsed = {k: parse_quantity_checked(value[k], dimension, f"{field}.{k}") for k in ("start", "stop", "step")}
        units = {q.unit for q in parsed.values()}
        if len(units) != 1:
            raise ConfigError(f"start, stop and step must share one unit, got {sorted(units)}", field=field)
        unit = units.pop()
        start, stop, step = (parsed[k].display_value for k in ("start", "stop", "step"))
        if not step > 0:
            raise ConfigError("step must be > 0", field=f"{field}.step")
        count = math.floor((stop - start) / step + 1e-9) + 1
        grid = start + step * np.arange(max(count, 0))
        values = tuple(to_si(float(v), unit) for v in grid)
    else:
        raise ConfigError("expected {start, stop, step} or a list of quantities", field=field)
    if not values:
        raise ConfigError("sweep is empty", field=field)
    return values


def parse_quantity_checked(value: Any, dimension: str, field: str):
    try:
        return parse_quantity(value, dimension)
    except UnitError as e:
        raise ConfigError(str(e), field=field) from e


def parse_fading(entry: Any, field: str) -> FadingLaw:
    """
    One fading law: fixed Rician kappas, fixed Nakagami m values, kappa_range or m_range.
    """
    if not isinstance(entry, dict):
        raise ConfigError("expected an object", field=field)
    name = entry.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("every fading law needs a name", field=f"{field}.name")
    keys = set(entry) - {"name"}
    try:
        if keys == {"kappa_ce_tag", "kappa_tag_reader"}:
            return FadingLaw.rician(
                name,
                _number(entry["kappa_ce_tag"], f"{field}.kappa_ce_tag", 0.0),
                _number(entry["kappa_tag_reader"], f"{field}.kappa_tag_reader", 0.0),
            )
        if keys == {"m_ce_tag", "m_tag_reader"}:
            return FadingLaw(
                name=name,
                m_ce_tag=_number(entry["m_ce_tag"], f"{field}.m_ce_tag", 0.5),
                m_tag_reader=_number(entry["m_tag_reader"], f"{field}.m_tag_reader", 0.5),
            )
        if keys == {"kappa_range"}:
            lo, hi = _range(entry["kappa_range"], f"{field}.kappa_range")
            return FadingLaw(name=name, kind=FadingKind.KAPPA_UNIFORM, low=lo, high=hi)
        if keys == {"m_range"}:
            lo, hi = _range(entry["m_range"], f"{field}.m_range", 0.5)
            return FadingLaw(name=name, kind=FadingKind.M_UNIFORM, low=lo, high=hi)
    except SimulationError as e:
        raise ConfigError(str(e), field=field) from e
    raise ConfigError(
        "expected kappa_ce_tag+kappa_tag_reader, m_ce_tag+m_tag_reader, kappa_range or m_range",
        field=field,
    )


# =============================================================================
# Scenario
# =============================================================================

# key -> (ScenarioSpec field, parser)
_SIMPLE_FIELDS: dict[str, tuple[str, Callable[[Any, str], Any]]] = {
    "tags": ("n_tags", _integer),
    "slots": ("n_slots", _integer),
    "trials": ("trials", _integer),
    "topologies": ("topologies", _integer),
    "realizations": ("realizations", _integer),
    "mc_draws": ("mc_draws", _integer),
    "t_max": ("t_max", _integer),
    "placement_topologies": ("placement_topologies", _integer),
    "diversity_points": ("diversity_points", lambda v, f: _integer(v, f, 2)),
    "shard_size": ("shard_size", _integer),
    "seed": ("seed", lambda v, f: _integer(v, f, 0)),
    "tx_power": ("tx_power", lambda v, f: _quantity(v, "power", f)),
    "theta": ("theta", lambda v, f: _quantity(v, "ratio", f)),
    "theta_h": ("theta_h", lambda v, f: _quantity(v, "power", f)),
    "noise_density": ("noise_density", lambda v, f: _quantity(v, "power_density", f)),
    "bit_duration": ("bit_duration", lambda v, f: _quantity(v, "time", f)),
    "epsilon": ("epsilon", lambda v, f: _quantity(v, "time", f)),
    "subcarrier_base": ("base_freq", lambda v, f: _quantity(v, "frequency", f)),
    "subcarrier_spacing": ("spacing", lambda v, f: _quantity(v, "frequency", f)),
    "reflection_gap": ("reflection_gap", lambda v, f: _number(v, f, 0.0)),
    "scattering_efficiency": ("scattering_efficiency", lambda v, f: _number(v, f, 0.0)),
    "path_loss_exponent_range": ("ple_range", _range),
    "reader": ("reader", _point),
    "mode": ("mode", lambda v, f: _enum(SweepMode, v, f)),
    "energy_mode": ("energy_mode", lambda v, f: _enum(EnergyMode, v, f)),
    "distance_policy": ("distance_policy", lambda v, f: _enum(DistancePolicy, v, f)),
    "placement_metric": ("placement_metric", lambda v, f: _enum(PlacementMetric, v, f)),
    "architectures": ("architectures", lambda v, f: _enum_list(Architecture, v, f)),
    "detectors": ("detectors", lambda v, f: _enum_list(DetectorKind, v, f)),
}

_OTHER_KEYS = {
    "sweep",
    "fading",
    "grid",
    "emitters",
    "carrier_frequency",
    "diversity_window",
    "exhaustive",
    "analytic_only",
}


def build_scenario(command: str, raw: dict[str, Any]) -> ScenarioSpec:
    """
    Turn a merged JSON-shaped configuration into a ScenarioSpec.

    Raises:
        ConfigError: With the dotted field path of the first invalid entry
    """
    unknown = sorted(set(raw) - set(_SIMPLE_FIELDS) - _OTHER_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}", field=unknown[0])

    kwargs: dict[str, Any] = {"command": command}
    for key, (name, parser) in _SIMPLE_FIELDS.items():
        if key in raw:
            kwargs[name] = parser(raw[key], key)

    mode = kwargs.get("mode", SweepMode.FIXED_SNR)
    if command in ("ber", "outage", "energy"):
        if "sweep" not in raw:
            raise ConfigError("missing sweep", field="sweep")
        dimension = _SWEEP_DIMENSION[(command, mode if command == "ber" else None)]
        kwargs["sweep"] = parse_sweep(raw["sweep"], dimension)
    else:
        kwargs["sweep"] = ()

    if "fading" in raw:
        if not isinstance(raw["fading"], list) or not raw["fading"]:
            raise ConfigError("expected a non-empty list of fading laws", field="fading")
        kwargs["fadings"] = tuple(parse_fading(e, f"fading[{i}]") for i, e in enumerate(raw["fading"]))

    if "grid" in raw:
        grid = raw["grid"]
        if not isinstance(grid, dict) or set(grid) != {"side", "step"}:
            raise ConfigError('expected {"side": ..., "step": ...}', field="grid")
        kwargs["grid_side"] = _quantity(grid["side"], "length", "grid.side")
        kwargs["grid_step"] = _quantity(grid["step"], "length", "grid.step")

    needs_geometry = command in ("outage", "energy", "place") or mode == SweepMode.POWER_SWEEP
    if needs_geometry and "grid_side" not in kwargs:
        raise ConfigError(f"command '{command}' needs a grid", field="grid")
    if command in ("outage", "energy", "place") and "tx_power" not in kwargs:
        raise ConfigError(f"command '{command}' needs a transmit power", field="tx_power")

    if "emitters" in raw:
        if not isinstance(raw["emitters"], list):
            raise ConfigError("expected a list of points", field="emitters")
        kwargs["emitters"] = tuple(_point(p, f"emitters[{i}]") for i, p in enumerate(raw["emitters"]))

    if "carrier_frequency" in raw:
        kwargs["wavelength"] = SPEED_OF_LIGHT_M_S / _quantity(
            raw["carrier_frequency"], "frequency", "carrier_frequency"
        )

    if "diversity_window" in raw:
        window = raw["diversity_window"]
        if not isinstance(window, list) or len(window) != 2:
            raise ConfigError('expected ["<lo> dB", "<hi> dB"]', field="diversity_window")
        kwargs["diversity_window"] = tuple(
            float(linear_to_db(_quantity(w, "ratio", f"diversity_window[{i}]")))
            for i, w in enumerate(window)
        )

    for flag in ("exhaustive", "analytic_only"):
        if flag in raw:
            if not isinstance(raw[flag], bool):
                raise ConfigError("expected true or false", field=flag)
            kwargs[flag] = raw[flag]

    try:
        spec = ScenarioSpec(**kwargs)
        if spec.grid_side is not None:
            _ = spec.grid
    except (SimulationError, TopologyError) as e:
        raise ConfigError(str(e)) from e

    logger.debug("Resolved %s scenario: %d sweep points", command, len(spec.sweep))
    return spec


def load_scenario(
    command: str,
    preset: str | None = None,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> ScenarioSpec:
    """Resolve preset, config file and overrides into a ScenarioSpec."""
    file_config = load_config_file(config_path) if config_path is not None else None
    raw = merge_config(command, preset, file_config, overrides)
    return build_scenario(command, raw)
