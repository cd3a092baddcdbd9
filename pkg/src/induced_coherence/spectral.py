"""Joint spectral amplitude of the photon pairs and the resulting delay envelope.

The JSA is a double Gaussian on a uniform (signal x idler) angular-frequency
grid::

    f(ws, wi) = exp(-(vs + vi)^2 / (2 sp^2)) * exp(-vs^2 / (2 spm^2))

with ``vs``, ``vi`` the detunings from the grid centres, ``sp`` the pump
amplitude width and ``spm`` the phase-matching width.  Phase matching is taken
to depend on the signal detuning only (idler group velocity matched to the
pump), so a very broadband pump gives a separable state.  A narrow pump gives
the strong frequency anti-correlation of type-II pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.optimize import brentq

from .errors import CoverageError, DegenerateOutputError, DomainError
from .interferometer import ExperimentConfig, ScanResult, run_point

DEFAULT_PUMP_CENTER_NM = 390.0
DEFAULT_PUMP_BANDWIDTH_NM = 0.5
DEFAULT_PHASEMATCH_WIDTH = 2.0e13  # rad/s, amplitude standard deviation
DEFAULT_GRID_SIZE = 256
GRID_SPAN_SIGMAS = 4.0
COVERAGE_SIGMAS = 3.0

_FWHM_PER_SIGMA = 2.0 * math.sqrt(math.log(2.0))  # intensity FWHM of exp(-x^2/(2 s^2)) amplitude


def wavelength_to_omega(wavelength_nm):
    return 2.0 * np.pi * SPEED_OF_LIGHT / (np.asarray(wavelength_nm, dtype=float) * 1e-9)


def omega_to_wavelength(omega):
    return 2.0 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float) * 1e9


def bandwidth_nm_to_sigma(center_nm: float, fwhm_nm: float) -> float:
    """Amplitude std (rad/s) of a Gaussian whose intensity FWHM is ``fwhm_nm``."""
    d_omega = 2.0 * np.pi * SPEED_OF_LIGHT * fwhm_nm * 1e-9 / (center_nm * 1e-9) ** 2
    return d_omega / _FWHM_PER_SIGMA


@dataclass(frozen=True)
class SpectralGrid:
    signal_axis: np.ndarray
    idler_axis: np.ndarray

    def __post_init__(self):
        for name in ("signal_axis", "idler_axis"):
            ax = np.asarray(getattr(self, name), dtype=float)
            if ax.ndim != 1 or len(ax) < 2:
                raise DomainError(f"{name} needs at least two points")
            d = np.diff(ax)
            if np.any(d <= 0):
                raise DomainError(f"{name} must be strictly increasing")
            if np.max(np.abs(d - d.mean())) > 1e-9 * abs(d.mean()) + 1e-6:
                raise DomainError(f"{name} must be uniformly spaced")
            ax.setflags(write=False)
            object.__setattr__(self, name, ax)

    @classmethod
    def centered(cls, signal_center: float, idler_center: float, signal_half_span: float,
                 idler_half_span: float, n_s: int = DEFAULT_GRID_SIZE, n_i: int = DEFAULT_GRID_SIZE):
        return cls(np.linspace(signal_center - signal_half_span, signal_center + signal_half_span, n_s),
                   np.linspace(idler_center - idler_half_span, idler_center + idler_half_span, n_i))

    @property
    def d_signal(self) -> float:
        return float(self.signal_axis[1] - self.signal_axis[0])

    @property
    def d_idler(self) -> float:
        return float(self.idler_axis[1] - self.idler_axis[0])

    @property
    def signal_center(self) -> float:
        return float(0.5 * (self.signal_axis[0] + self.signal_axis[-1]))

    @property
    def idler_center(self) -> float:
        return float(0.5 * (self.idler_axis[0] + self.idler_axis[-1]))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.signal_axis), len(self.idler_axis)

    def refined(self, factor: int = 2) -> SpectralGrid:
        """Same spans with ``factor`` times as many points per axis."""
        return SpectralGrid(
            np.linspace(self.signal_axis[0], self.signal_axis[-1], factor * len(self.signal_axis)),
            np.linspace(self.idler_axis[0], self.idler_axis[-1], factor * len(self.idler_axis)),
        )


def default_grid(pump_center: float = DEFAULT_PUMP_CENTER_NM,
                 pump_bandwidth: float = DEFAULT_PUMP_BANDWIDTH_NM,
                 phasematch_width: float = DEFAULT_PHASEMATCH_WIDTH,
                 signal_wavelength: float = 632.8,
                 size: int = DEFAULT_GRID_SIZE) -> SpectralGrid:
    """Grid spanning +-4 sigma of the signal and idler marginals; idler centre fixed by energy conservation."""
    ws = float(wavelength_to_omega(signal_wavelength))
    wi = float(wavelength_to_omega(pump_center)) - ws
    sp = bandwidth_nm_to_sigma(pump_center, pump_bandwidth)
    return SpectralGrid.centered(ws, wi, GRID_SPAN_SIGMAS * phasematch_width,
                                 GRID_SPAN_SIGMAS * math.hypot(sp, phasematch_width), size, size)


@dataclass(frozen=True)
class JointSpectralAmplitude:
    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise DomainError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def cell(self) -> float:
        return self.grid.d_signal * self.grid.d_idler

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell)

    @property
    def jsi(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def normalized(self) -> JointSpectralAmplitude:
        n = self.norm_sq
        if n == 0:
            raise DegenerateOutputError("cannot normalize an all-zero JSA")
        return replace(self, values=self.values / math.sqrt(n))

    def idler_marginal(self) -> np.ndarray:
        return self.jsi.sum(axis=0) * self.grid.d_signal

    def signal_marginal(self) -> np.ndarray:
        return self.jsi.sum(axis=1) * self.grid.d_idler


def build_jsa(grid: SpectralGrid | None = None,
              pump_center: float = DEFAULT_PUMP_CENTER_NM,
              pump_bandwidth: float = DEFAULT_PUMP_BANDWIDTH_NM,
              phasematch_width: float = DEFAULT_PHASEMATCH_WIDTH) -> JointSpectralAmplitude:
    """Normalized double-Gaussian JSA.

    ``pump_bandwidth`` is the intensity FWHM of the pump in nm;
    ``phasematch_width`` is the amplitude standard deviation (rad/s) of the
    phase-matching factor along the signal detuning.
    """
    if not pump_bandwidth > 0 or not phasematch_width > 0:
        raise DomainError("pump_bandwidth and phasematch_width must be > 0")
    if grid is None:
        grid = default_grid(pump_center, pump_bandwidth, phasematch_width)
    wp = float(wavelength_to_omega(pump_center))
    mismatch = grid.signal_center + grid.idler_center - wp
    if abs(mismatch) > max(grid.d_signal, grid.d_idler):
        raise DomainError(
            f"grid centres violate energy conservation by {mismatch:.3e} rad/s "
            f"(more than one grid cell)"
        )
    sp = bandwidth_nm_to_sigma(pump_center, pump_bandwidth)
    _check_coverage(grid.signal_axis, grid.signal_center, COVERAGE_SIGMAS * phasematch_width, "signal", "phase matching")
    _check_coverage(grid.idler_axis, grid.idler_center, COVERAGE_SIGMAS * math.hypot(sp, phasematch_width),
                    "idler", "pump envelope")

    vs = (grid.signal_axis - grid.signal_center)[:, None]
    vi = (grid.idler_axis - grid.idler_center)[None, :]
    pump = np.exp(-((vs + vi + grid.signal_center + grid.idler_center - wp) ** 2) / (2 * sp ** 2))
    phasematch = np.exp(-(vs ** 2) / (2 * phasematch_width ** 2))
    return JointSpectralAmplitude(grid, pump * phasematch).normalized()


def _check_coverage(axis: np.ndarray, center: float, half_width: float, arm: str, factor: str) -> None:
    if axis[0] > center - half_width or axis[-1] < center + half_width:
        raise CoverageError(
            f"{arm} axis [{axis[0]:.4e}, {axis[-1]:.4e}] rad/s does not cover "
            f"+-{COVERAGE_SIGMAS:g} sigma of the {factor} factor ({half_width:.4e} rad/s)"
        )


@dataclass(frozen=True)
class FilterSpec:
    center_wavelength: float = 632.8  # nm
    fwhm: float = 2.0  # nm
    shape: Literal["gaussian", "rectangular"] = "gaussian"

    def __post_init__(self):
        if not self.fwhm > 0:
            raise DomainError(f"filter fwhm must be > 0, got {self.fwhm}")
        if not self.center_wavelength > 0:
            raise DomainError(f"filter centre must be > 0, got {self.center_wavelength}")
        if self.shape not in ("gaussian", "rectangular"):
            raise DomainError(f"unknown filter shape {self.shape!r}")

    def amplitude(self, omega) -> np.ndarray:
        """Field transmission (square root of the intensity transmission)."""
        lam = omega_to_wavelength(omega)
        x = lam - self.center_wavelength
        if self.shape == "gaussian":
            return np.exp(-2.0 * math.log(2.0) * x ** 2 / self.fwhm ** 2)
        return (np.abs(x) <= self.fwhm / 2).astype(float)


def apply_filter(jsa: JointSpectralAmplitude, which_arm: Literal["signal", "idler"], filt: FilterSpec,
                 renormalize: bool = True) -> JointSpectralAmplitude:
    if which_arm == "signal":
        profile = filt.amplitude(jsa.grid.signal_axis)[:, None]
    elif which_arm == "idler":
        profile = filt.amplitude(jsa.grid.idler_axis)[None, :]
    else:
        raise DomainError(f"which_arm must be 'signal' or 'idler', got {which_arm!r}")
    out = replace(jsa, values=jsa.values * profile)
    if out.norm_sq <= 1e-12 * jsa.norm_sq:
        raise DegenerateOutputError(
            f"{filt.shape} filter at {filt.center_wavelength} nm transmits nothing on the {which_arm} arm"
        )
    return out.normalized() if renormalize else out


@dataclass(frozen=True)
class SchmidtResult:
    schmidt_number: float
    purity: float
    singular_values: np.ndarray


def schmidt_analysis(jsa: JointSpectralAmplitude) -> SchmidtResult:
    s = np.linalg.svd(jsa.values * math.sqrt(jsa.cell), compute_uv=False)
    weights = s ** 2 / np.sum(s ** 2)
    purity = float(np.sum(weights ** 2))
    return SchmidtResult(1.0 / purity, purity, s)


def jsi_correlation(jsa: JointSpectralAmplitude) -> float:
    """Pearson correlation of signal and idler frequency under the JSI."""
    w = jsa.jsi / jsa.jsi.sum()
    vs = (jsa.grid.signal_axis - jsa.grid.signal_center)[:, None]
    vi = (jsa.grid.idler_axis - jsa.grid.idler_center)[None, :]
    ms, mi = np.sum(w * vs), np.sum(w * vi)
    cov = np.sum(w * (vs - ms) * (vi - mi))
    return float(cov / math.sqrt(np.sum(w * (vs - ms) ** 2) * np.sum(w * (vi - mi) ** 2)))


@dataclass(frozen=True)
class Envelope:
    delays: np.ndarray  # s
    visibility: np.ndarray


def coincidence_envelope(jsa: JointSpectralAmplitude, delays) -> Envelope:
    """Idler-mode coherence factor versus delay.

    ``V(tau) = |sum_i m(wi) exp(i wi tau)| / sum_i m(wi)`` with ``m`` the idler
    marginal of the (filtered) JSI, so ``V(0) = 1`` exactly.
    """
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    m = jsa.idler_marginal()
    vi = jsa.grid.idler_axis - jsa.grid.idler_center
    phase = np.exp(1j * np.outer(delays, vi))
    vis = np.abs(phase @ m) / m.sum()
    return Envelope(delays, np.minimum(vis, 1.0))


def envelope_half_width(jsa: JointSpectralAmplitude) -> float:
    """Delay (s) at which the coherence factor first falls to 1/2."""
    def f(tau: float) -> float:
        return float(coincidence_envelope(jsa, [tau]).visibility[0]) - 0.5

    m = jsa.idler_marginal()
    vi = jsa.grid.idler_axis - jsa.grid.idler_center
    spread = math.sqrt(np.sum(m * vi ** 2) / m.sum())
    hi = 1.0 / spread
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6 / spread:
            raise DomainError("coherence factor never falls to 1/2")
    return brentq(f, 0.0, hi, xtol=1e-22, rtol=1e-13)


def fringe_with_envelope(config: ExperimentConfig, jsa: JointSpectralAmplitude, mirror_positions) -> ScanResult:
    """Interferometer scan with the idler overlap reduced by temporal mismatch.

    At each position the static overlap ``config.gamma`` is multiplied by the
    coherence factor at delay ``tau = path difference / c``.
    """
    positions = np.atleast_1d(np.asarray(mirror_positions, dtype=float))
    if positions.size == 0:
        raise DomainError("fringe_with_envelope needs at least one position")
    delays = config.path_difference(positions) * 1e-9 / SPEED_OF_LIGHT
    coherence = coincidence_envelope(jsa, delays).visibility
    phases = config.idler_phase(positions)
    rows = [run_point(replace(config, gamma=float(config.gamma * v)), float(phi))
            for v, phi in zip(coherence, phases)]
    return ScanResult(
        positions,
        np.array([r.singles_d1 for r in rows]),
        np.array([r.singles_d2 for r in rows]),
        np.array([r.coincidence for r in rows]),
    )


def write_jsa_csv(jsa: JointSpectralAmplitude, path: str | Path, comments: Sequence[str] = ()) -> None:
    """Matrix CSV: optional ``# `` comment lines, two axis rows, then one row of complex values per signal frequency."""
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        # axes at full precision so the uniform-spacing check survives the round trip
        w.writerow(["signal_axis_rad_per_s"] + [repr(float(x)) for x in jsa.grid.signal_axis])
        w.writerow(["idler_axis_rad_per_s"] + [repr(float(x)) for x in jsa.grid.idler_axis])
        for i, row in enumerate(jsa.values):
            w.writerow([f"row{i}"] + [f"{z.real:.12g}{z.imag:+.12g}j" for z in row])


def read_jsa_csv(path: str | Path) -> JointSpectralAmplitude:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 3 or rows[0][0] != "signal_axis_rad_per_s" or rows[1][0] != "idler_axis_rad_per_s":
        raise DomainError(f"{path}: not a JSA matrix CSV")
    grid = SpectralGrid(np.array(rows[0][1:], dtype=float), np.array(rows[1][1:], dtype=float))
    values = np.array([[complex(x) for x in r[1:]] for r in rows[2:]])
    return JointSpectralAmplitude(grid, values)
