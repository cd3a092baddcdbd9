"""Zou-Wang-Mandel nonlinear interferometer with one or two photon pairs.

Topology: crystal NL1 emits into (S1, I1), crystal NL2 into (S2, I2).  The
idler I1 picks up the phase ``phi_i``, is aligned onto I2 with amplitude
overlap ``gamma`` (the rest leaks into ancilla A1), and the signals S1, S2 meet
on a beam splitter whose outputs are watched by detectors D1 (the S1 port)
and D2 (the S2 port).  Idler and ancilla modes are never detected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, DomainError
from .fock import AtLeast, Exactly, FockState, ModeRegistry, apply_creation, detection_probability, vacuum
from .optics import (
    BeamSplitterSpec,
    OverlapSpec,
    apply_beam_splitter,
    apply_overlap,
    stimulated_gain_ratio,
    stimulated_pair_gain_ratio,
)

SIGNAL_WAVELENGTH_NM = 632.8
IDLER_WAVELENGTH_NM = 1016.4
SETUP_MODES = ("S1", "S2", "I1", "I2", "A1")
IDLER_MODES = ("I1", "I2", "A1")


def _default_positions() -> tuple[float, ...]:
    return tuple(np.linspace(0.0, 2033.0, 200).tolist())


@dataclass(frozen=True)
class ExperimentConfig:
    pair_number: int = 2
    gamma: float = 1.0
    bs_transmission: float = 1 / math.sqrt(2)
    signal_wavelength: float = SIGNAL_WAVELENGTH_NM
    idler_wavelength: float = IDLER_WAVELENGTH_NM
    scan_positions: tuple[float, ...] = field(default_factory=_default_positions)
    position_convention: Literal["optical_path", "mirror_displacement"] = "optical_path"
    detector_semantics: Literal["threshold", "number_resolving"] = "threshold"

    def __post_init__(self):
        if self.pair_number not in (1, 2):
            raise ConfigError(f"pair_number must be 1 or 2, got {self.pair_number}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.bs_transmission <= 1.0:
            raise ConfigError(f"bs_transmission must lie in [0, 1], got {self.bs_transmission}")
        for name in ("signal_wavelength", "idler_wavelength"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        positions = tuple(float(x) for x in self.scan_positions)
        if not all(math.isfinite(x) for x in positions):
            raise ConfigError("scan positions must be finite")
        object.__setattr__(self, "scan_positions", positions)
        if self.position_convention not in ("optical_path", "mirror_displacement"):
            raise ConfigError(f"unknown position_convention {self.position_convention!r}")
        if self.detector_semantics not in ("threshold", "number_resolving"):
            raise ConfigError(f"unknown detector_semantics {self.detector_semantics!r}")

    def registry(self) -> ModeRegistry:
        wl = {"S1": self.signal_wavelength, "S2": self.signal_wavelength,
              "I1": self.idler_wavelength, "I2": self.idler_wavelength}
        return ModeRegistry.from_labels(SETUP_MODES, wl)

    def path_difference(self, position: float | np.ndarray):
        """Optical path difference (nm) for a scan position."""
        return 2.0 * position if self.position_convention == "mirror_displacement" else position

    def idler_phase(self, position: float | np.ndarray):
        return 2.0 * np.pi * self.path_difference(position) / self.idler_wavelength


@dataclass(frozen=True)
class PointResult:
    singles_d1: float
    singles_d2: float
    coincidence: float


@dataclass(frozen=True)
class ScanResult:
    positions: np.ndarray
    singles_d1: np.ndarray
    singles_d2: np.ndarray
    coincidence: np.ndarray

    def __post_init__(self):
        cols = [np.asarray(getattr(self, k), dtype=float) for k in self.columns()]
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise DomainError("scan columns must have equal length")
        for k, c in zip(self.columns(), cols):
            object.__setattr__(self, k, c)

    @staticmethod
    def columns() -> tuple[str, ...]:
        return ("positions", "singles_d1", "singles_d2", "coincidence")

    def __len__(self) -> int:
        return len(self.positions)


def n00n_pair_state(n: int, phi_i: float, registry: ModeRegistry | None = None, n_max: int | None = None) -> FockState:
    """``(e^{i n phi}|n>_S1|n>_I1 + |n>_S2|n>_I2) / sqrt(2)`` for any n >= 1."""
    if int(n) != n or n < 1:
        raise DomainError(f"pair number must be a positive integer, got {n}")
    registry = registry or ExperimentConfig().registry()
    n_max = max(6, 2 * n) if n_max is None else n_max
    occ1 = [0] * len(registry)
    occ2 = [0] * len(registry)
    occ1[registry.index("S1")] = occ1[registry.index("I1")] = n
    occ2[registry.index("S2")] = occ2[registry.index("I2")] = n
    amp = 1 / math.sqrt(2)
    return FockState(registry, {tuple(occ1): amp * cmath.exp(1j * n * phi_i), tuple(occ2): amp}, n_max)


def build_pair_state(n: int, phi_i: float, registry: ModeRegistry | None = None) -> FockState:
    """Normalized source state for one (n=1) or two (n=2) SPDC pairs.

    For two pairs the three operator terms (both pairs from NL1, both from
    NL2, one from each) carry weights ``e^{2i phi}/2``, ``1/2`` and ``e^{i phi}``.
    """
    registry = registry or ExperimentConfig().registry()
    if n == 1:
        return n00n_pair_state(1, phi_i, registry)
    if n != 2:
        raise DomainError(f"build_pair_state supports n in {{1, 2}}, got {n}")
    vac = vacuum(registry)
    both_nl1 = apply_creation(apply_creation(vac, "S1", 2), "I1", 2).scale(0.5 * cmath.exp(2j * phi_i))
    both_nl2 = apply_creation(apply_creation(vac, "S2", 2), "I2", 2).scale(0.5)
    cross = vac
    for mode in ("S1", "S2", "I1", "I2"):
        cross = apply_creation(cross, mode)
    cross = cross.scale(cmath.exp(1j * phi_i))
    return (both_nl1 + both_nl2 + cross).normalize()


def propagate(state: FockState, gamma: float, bs_transmission: float) -> FockState:
    """Idler overlap followed by the signal beam splitter; output renormalized."""
    state = apply_overlap(state, OverlapSpec("I1", "I2", gamma, "A1"))
    state = apply_beam_splitter(state, BeamSplitterSpec("S1", "S2", bs_transmission))
    return state.normalize()


def detector_readout(state: FockState, semantics: str = "threshold") -> PointResult:
    pred = AtLeast(1) if semantics == "threshold" else Exactly(1)
    return PointResult(
        singles_d1=detection_probability(state, {"S1": pred}, IDLER_MODES),
        singles_d2=detection_probability(state, {"S2": pred}, IDLER_MODES),
        coincidence=detection_probability(state, {"S1": pred, "S2": pred}, IDLER_MODES),
    )


def run_point(config: ExperimentConfig, phi_i: float) -> PointResult:
    state = build_pair_state(config.pair_number, phi_i, config.registry())
    out = propagate(state, config.gamma, config.bs_transmission)
    return detector_readout(out, config.detector_semantics)


def scan(config: ExperimentConfig) -> ScanResult:
    if not config.scan_positions:
        raise DomainError("scan needs at least one position")
    positions = np.asarray(config.scan_positions, dtype=float)
    points = [run_point(config, float(phi)) for phi in config.idler_phase(positions)]
    return ScanResult(
        positions,
        np.array([p.singles_d1 for p in points]),
        np.array([p.singles_d2 for p in points]),
        np.array([p.coincidence for p in points]),
    )


def phase_visibility(config: ExperimentConfig, channel: str = "coincidence", samples: int = 72) -> float:
    """(max - min)/(max + min) of a detector channel over the idler phase.

    A uniform phase sweep brackets the extrema, which are then polished with a
    bounded scalar search on the exact point model.
    """
    def value(phi: float) -> float:
        return getattr(run_point(config, phi), channel)

    phis = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    vals = np.array([value(p) for p in phis])
    step = phis[1] - phis[0]

    def polished(f, i: int) -> float:
        res = minimize_scalar(f, bounds=(phis[i] - step, phis[i] + step),
                              method="bounded", options={"xatol": 1e-12})
        return float(res.fun)

    hi = max(vals.max(), -polished(lambda p: -value(p), int(np.argmax(vals))))
    lo = min(vals.min(), polished(value, int(np.argmin(vals))))
    if hi + lo == 0:
        return 0.0
    return float((hi - lo) / (hi + lo))


def hom_cross_term_check(bs_transmission: float = 1 / math.sqrt(2)) -> float:
    """Coincidence probability of the isolated one-pair-per-crystal term."""
    registry = ExperimentConfig().registry()
    state = vacuum(registry)
    for mode in ("S1", "S2", "I1", "I2"):
        state = apply_creation(state, mode)
    state = apply_beam_splitter(state, BeamSplitterSpec("S1", "S2", bs_transmission))
    return detection_probability(state, {"S1": AtLeast(1), "S2": AtLeast(1)}, IDLER_MODES)


@dataclass(frozen=True)
class EmissionRates:
    singles_rate_s2: float
    pair_rate_s2: float


def emission_check(gain_epsilon: float, blocked: bool) -> EmissionRates:
    """Per-pulse single and two-photon emission probabilities into S2.

    Blocked, NL2 emits spontaneously (``eps^2`` and ``eps^4``).  Unblocked, the
    I1 light reaching NL2 carries mean occupancy ``eps^2``, which is the only
    possible seed for stimulated emission.
    """
    eps = float(gain_epsilon)
    if not math.isfinite(eps) or eps < 0:
        raise DomainError(f"gain_epsilon must be finite and >= 0, got {gain_epsilon}")
    singles, pairs = eps ** 2, eps ** 4
    if blocked:
        return EmissionRates(singles, pairs)
    mu = eps ** 2
    return EmissionRates(singles * stimulated_gain_ratio(mu), pairs * stimulated_pair_gain_ratio(mu))
