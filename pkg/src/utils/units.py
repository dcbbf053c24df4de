"""
Unit conversions between logarithmic (dB, dBm) and linear SI quantities.

Quantities in run configurations carry explicit unit suffixes ("28 dBm", "1 ms",
"0.01 MHz", "-169 dBm/Hz"). parse_quantity turns such a string into a float in SI
units together with its physical dimension.
"""

import re
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np


class UnitError(ValueError):
    """Raised when a quantity string cannot be parsed or has the wrong dimension."""

    pass


def db_to_linear(value_db):
    """Convert a power ratio in dB to linear scale."""
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    """Convert a linear power ratio to dB."""
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def dbm_to_watts(value_dbm):
    """Convert a power in dBm to watts."""
    return db_to_linear(value_dbm) * 1e-3


def watts_to_dbm(value_w):
    """Convert a power in watts to dBm."""
    return linear_to_db(np.asarray(value_w, dtype=float) * 1e3)


@dataclass(frozen=True)
class Quantity:
    """A parsed physical quantity in SI units."""

    value: float
    dimension: str
    unit: str

    @property
    def display_value(self) -> float:
        """Value expressed back in the unit it was written in."""
        return from_si(self.value, self.unit)


# unit suffix -> (dimension, to-SI converter, from-SI converter)
_UNITS: dict[str, tuple[str, Callable, Callable]] = {
    "dB": ("ratio", lambda v: 10 ** (v / 10), lambda v: 10 * np.log10(v)),
    "dBm": ("power", lambda v: 10 ** (v / 10) * 1e-3, lambda v: 10 * np.log10(v * 1e3)),
    "dBW": ("power", lambda v: 10 ** (v / 10), lambda v: 10 * np.log10(v)),
    "W": ("power", lambda v: v, lambda v: v),
    "mW": ("power", lambda v: v * 1e-3, lambda v: v * 1e3),
    "dBm/Hz": (
        "power_density",
        lambda v: 10 ** (v / 10) * 1e-3,
        lambda v: 10 * np.log10(v * 1e3),
    ),
    "W/Hz": ("power_density", lambda v: v, lambda v: v),
    "Hz": ("frequency", lambda v: v, lambda v: v),
    "kHz": ("frequency", lambda v: v * 1e3, lambda v: v / 1e3),
    "MHz": ("frequency", lambda v: v * 1e6, lambda v: v / 1e6),
    "GHz": ("frequency", lambda v: v * 1e9, lambda v: v / 1e9),
    "s": ("time", lambda v: v, lambda v: v),
    "ms": ("time", lambda v: v * 1e-3, lambda v: v / 1e-3),
    "us": ("time", lambda v: v * 1e-6, lambda v: v / 1e-6),
    "m": ("length", lambda v: v, lambda v: v),
    "cm": ("length", lambda v: v * 1e-2, lambda v: v / 1e-2),
    "km": ("length", lambda v: v * 1e3, lambda v: v / 1e3),
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)\s*$")


def known_units() -> list[str]:
    """List the accepted unit suffixes."""
    return sorted(_UNITS)


def unit_dimension(unit: str) -> str:
    """Return the physical dimension of a unit suffix."""
    if unit not in _UNITS:
        raise UnitError(f"unknown unit {unit!r} (known: {', '.join(known_units())})")
    return _UNITS[unit][0]


def to_si(value: float, unit: str) -> float:
    """Convert a value written in the given unit to SI."""
    unit_dimension(unit)
    return float(_UNITS[unit][1](value))


def from_si(value: float, unit: str) -> float:
    """Express an SI value in the given unit."""
    unit_dimension(unit)
    return float(_UNITS[unit][2](value))


def parse_quantity(text: str, dimension: str | None = None) -> Quantity:
    """
    Parse a unit-suffixed quantity string.

    Args:
        text: e.g. "28 dBm", "-169 dBm/Hz", "0.01 MHz", "1 ms"
        dimension: Expected dimension ("power", "ratio", "time", ...); None accepts any

    Returns:
        Quantity in SI units

    Raises:
        UnitError: On malformed strings, unknown units or dimension mismatch
    """
    if not isinstance(text, str):
        raise UnitError(f"expected a quantity string with a unit suffix, got {text!r}")

    match = _QUANTITY_RE.match(text)
    if match is None:
        raise UnitError(f"cannot parse quantity {text!r}; expected '<number> <unit>'")

    number, unit = float(match.group(1)), match.group(2)
    found = unit_dimension(unit)

    if dimension is not None and found != dimension:
        expected = ", ".join(u for u, spec in _UNITS.items() if spec[0] == dimension)
        raise UnitError(f"expected unit {expected}, got {unit!r}")

    if unit in {"W", "mW", "W/Hz", "Hz", "kHz", "MHz", "GHz", "s", "ms", "us"} and number <= 0:
        raise UnitError(f"{text!r} must be positive")

    return Quantity(value=float(_UNITS[unit][1](number)), dimension=found, unit=unit)
