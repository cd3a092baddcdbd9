"""Plain-text ``key = value`` run configuration.

Every key has a documented default; unknown keys and out-of-range values are
errors reported with the offending line number.  :func:`format_config`
echoes a configuration in the same syntax, and parsing the echo gives back an
equal configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .interferometer import ExperimentConfig
from .spectral import FilterSpec


@dataclass(frozen=True)
class RunConfig:
    # interferometer
    pair_number: int = 2
    gamma: float = 1.0
    bs_transmission: float = 1 / math.sqrt(2)
    signal_wavelength: float = 632.8  # nm
    idler_wavelength: float = 1016.4  # nm
    scan_start: float = 0.0  # nm
    scan_stop: float = 2033.0  # nm
    scan_points: int = 200
    position_convention: str = "optical_path"
    detector_semantics: str = "threshold"
    # spectral model
    pump_center: float = 390.0  # nm
    pump_bandwidth: float = 0.5  # nm, intensity FWHM
    phasematch_width: float = 2.0e13  # rad/s, amplitude std
    grid_size: int = 256
    filter_center: float = 632.8  # nm
    filter_fwhm: float = 2.0  # nm
    filter_shape: str = "gaussian"
    envelope_start: float = -150000.0  # nm
    envelope_stop: float = 150000.0  # nm
    envelope_points: int = 61
    fringe_half_window: float = 1016.4  # nm, central fringe scan is +- this
    fringe_points: int = 200
    # emission / fitting
    gain_epsilon: float = 0.01
    total_events: int = 100000
    fit_input: str = ""

    def __post_init__(self):
        _CHECKS = {
            "pair_number": lambda v: v in (1, 2),
            "gamma": lambda v: 0.0 <= v <= 1.0,
            "bs_transmission": lambda v: 0.0 <= v <= 1.0,
            "signal_wavelength": lambda v: v > 0,
            "idler_wavelength": lambda v: v > 0,
            "scan_points": lambda v: v >= 1,
            "position_convention": lambda v: v in ("optical_path", "mirror_displacement"),
            "detector_semantics": lambda v: v in ("threshold", "number_resolving"),
            "pump_center": lambda v: v > 0,
            "pump_bandwidth": lambda v: v > 0,
            "phasematch_width": lambda v: v > 0,
            "grid_size": lambda v: v >= 8,
            "filter_center": lambda v: v > 0,
            "filter_fwhm": lambda v: v > 0,
            "filter_shape": lambda v: v in ("gaussian", "rectangular"),
            "envelope_points": lambda v: v >= 4,
            "fringe_half_window": lambda v: v > 0,
            "fringe_points": lambda v: v >= 8,
            "gain_epsilon": lambda v: 0.0 <= v < 1.0,
            "total_events": lambda v: v >= 0,
        }
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{f.name}: value must be finite, got {value}")
            check = _CHECKS.get(f.name)
            if check is not None and not check(value):
                raise ConfigError(f"{f.name}: value {value!r} is out of range")

    def experiment(self, positions=None) -> ExperimentConfig:
        if positions is None:
            positions = np.linspace(self.scan_start, self.scan_stop, self.scan_points)
        return ExperimentConfig(
            pair_number=self.pair_number,
            gamma=self.gamma,
            bs_transmission=self.bs_transmission,
            signal_wavelength=self.signal_wavelength,
            idler_wavelength=self.idler_wavelength,
            scan_positions=tuple(np.asarray(positions, dtype=float).tolist()),
            position_convention=self.position_convention,
            detector_semantics=self.detector_semantics,
        )

    def filter_spec(self) -> FilterSpec:
        return FilterSpec(self.filter_center, self.filter_fwhm, self.filter_shape)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str, lineno: int):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: cannot parse {raw!r} as {kind}") from None
    return raw


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = (_convert(key, raw, lineno), lineno)
    try:
        return RunConfig(**{k: v for k, (v, _) in values.items()})
    except ConfigError as exc:
        bad = str(exc).split(":", 1)[0]
        where = f"{source}:{values[bad][1]}" if bad in values else source
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(path: str | Path) -> RunConfig:
    """Read a config file; raises OSError if it cannot be read."""
    path = Path(path)
    return parse_config_text(path.read_text(), str(path))


def format_config(config: RunConfig) -> str:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
