"""Fringe fitting, visibility extraction and synthetic count generation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit, least_squares

from .errors import DomainError, FitError
from .interferometer import ScanResult

PERIODOGRAM_POINTS = 200


@dataclass(frozen=True)
class FitResult:
    """Parameters of ``offset + amplitude * cos(2 pi x / period + phase)``."""

    offset: float
    amplitude: float
    period: float
    phase: float
    visibility: float
    residual_rms: float
    covariance_diag: tuple[float, ...]
    period_determinate: bool = True

    def model(self, x):
        if not self.period_determinate:
            return np.full_like(np.asarray(x, dtype=float), self.offset)
        return sinusoid(x, self.offset, self.amplitude, self.period, self.phase)


def sinusoid(x, offset, amplitude, period, phase):
    return offset + amplitude * np.cos(2 * np.pi * np.asarray(x, dtype=float) / period + phase)


def _linear_fit(x: np.ndarray, y: np.ndarray, period: float):
    """Least squares for offset, a, b in ``offset + a cos(kx) + b sin(kx)``."""
    k = 2 * np.pi / period
    design = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(resid @ resid)


def _sweep(x, y, periods):
    costs = np.array([_linear_fit(x, y, p)[1] for p in periods])
    return int(np.argmin(costs))


def fit_sinusoid(positions, values, period_hint: float | None = None, fix_period: bool = False,
                 max_nfev: int = 2000) -> FitResult:
    """Least-squares sinusoid fit.

    With a free period the start value comes from a log-spaced periodogram
    (200 trial periods, a decade either side of the hint, or between the
    Nyquist period and 1/1.5 of the span without one), polished by a local
    sweep and finally by a nonlinear fit of all four parameters.
    """
    x = np.asarray(positions, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("positions and values must be 1-D arrays of equal length")
    if len(x) < 8:
        raise FitError(f"need at least 8 points, got {len(x)}")
    order = np.argsort(x)
    x, y = x[order], y[order]
    span = float(x[-1] - x[0])
    if span <= 0:
        raise FitError("positions must span a non-zero range")
    if fix_period and period_hint is None:
        raise FitError("fix_period requires a period_hint")

    scale = max(float(np.max(np.abs(y))), 1e-300)
    if np.ptp(y) <= 1e-12 * scale:
        return FitResult(float(np.mean(y)), 0.0, float("nan"), 0.0, 0.0,
                         float(np.sqrt(np.mean((y - y.mean()) ** 2))), (), period_determinate=False)

    if period_hint is not None and span < 1.5 * period_hint:
        raise FitError(f"span {span:g} covers fewer than 1.5 periods of the hint {period_hint:g}")

    if fix_period:
        period = float(period_hint)
    else:
        nyquist = 2.0 * float(np.min(np.diff(x)[np.diff(x) > 0]))
        if period_hint is not None:
            lo, hi = period_hint / 10.0, period_hint * 10.0
        else:
            lo, hi = nyquist, span / 1.5
        lo, hi = max(lo, nyquist), min(hi, 2.0 * span)
        if not lo < hi:
            raise FitError("no admissible trial periods for this sampling")
        coarse = np.geomspace(lo, hi, PERIODOGRAM_POINTS)
        i = _sweep(x, y, coarse)
        fine = np.geomspace(coarse[max(i - 1, 0)], coarse[min(i + 1, len(coarse) - 1)], PERIODOGRAM_POINTS)
        period = float(fine[_sweep(x, y, fine)])

    (c0, a, b), _ = _linear_fit(x, y, period)
    amp0, ph0 = math.hypot(a, b), math.atan2(-b, a)
    if fix_period:
        def resid(p):
            return sinusoid(x, p[0], p[1], period, p[2]) - y
        p0 = [c0, amp0, ph0]
    else:
        def resid(p):
            return sinusoid(x, p[0], p[1], p[3], p[2]) - y
        p0 = [c0, amp0, ph0, period]
    sol = least_squares(resid, p0, method="trf", x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=max_nfev)
    if sol.status <= 0:
        raise FitError(f"sinusoid fit did not converge: {sol.message} (nfev={sol.nfev}, start={p0})")
    offset, amp, phase = sol.x[:3]
    period = float(sol.x[3]) if not fix_period else period
    if period <= 0:
        raise FitError(f"fit converged to non-positive period {period}")
    if amp < 0:
        amp, phase = -amp, phase + math.pi
    phase = float((phase + math.pi) % (2 * math.pi) - math.pi)
    if not fix_period and span < 1.5 * period:
        raise FitError(f"span {span:g} covers fewer than 1.5 fitted periods ({period:g})")

    dof = max(len(x) - len(p0), 1)
    rss = float(sol.fun @ sol.fun)
    try:
        cov = np.linalg.inv(sol.jac.T @ sol.jac) * rss / dof
        cov_diag = tuple(float(v) for v in np.diag(cov))
    except np.linalg.LinAlgError:
        cov_diag = tuple(float("nan") for _ in p0)
    vis = float(amp / offset) if offset > 0 else float("nan")
    return FitResult(float(offset), float(amp), period, phase, vis, math.sqrt(rss / len(x)), cov_diag)


def visibility(max_count: float, min_count: float) -> float:
    if not (max_count >= min_count >= 0 and max_count > 0):
        raise DomainError(f"need max >= min >= 0 and max > 0, got max={max_count}, min={min_count}")
    return (max_count - min_count) / (max_count + min_count)


@dataclass(frozen=True)
class EnvelopeFit:
    center: float
    width_fwhm: float
    peak_visibility: float


def gaussian(x, peak, center, sigma):
    return peak * np.exp(-((np.asarray(x, dtype=float) - center) ** 2) / (2 * sigma ** 2))


def fit_envelope(extrema) -> EnvelopeFit:
    """Gaussian fit of the visibility built from ``(position, max, min)`` triples."""
    rows = [tuple(map(float, r)) for r in extrema]
    if len(rows) < 4:
        raise FitError(f"need at least 4 extrema pairs, got {len(rows)}")
    x = np.array([r[0] for r in rows])
    v = np.array([visibility(r[1], r[2]) for r in rows])
    if np.ptp(v) <= 1e-12 * max(v.max(), 1e-300):
        raise FitError("all visibilities are equal; envelope width is undefined")
    w = np.clip(v, 0, None)
    c0 = float(np.sum(w * x) / np.sum(w))
    s0 = float(np.sqrt(np.sum(w * (x - c0) ** 2) / np.sum(w))) or float(np.ptp(x))
    try:
        with warnings.catch_warnings():
            # exact data make the covariance singular; only the parameters are used
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(gaussian, x, v, p0=[v.max(), c0, s0], xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"envelope fit did not converge: {exc}") from exc
    peak, center, sigma = popt
    return EnvelopeFit(float(center), float(2 * math.sqrt(2 * math.log(2)) * abs(sigma)), float(peak))


def classical_product(singles_d1, singles_d2):
    """Pointwise product of two singles scans given as ``(positions, values)`` pairs."""
    (x1, y1), (x2, y2) = singles_d1, singles_d2
    x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or not np.allclose(x1, x2, rtol=0, atol=1e-9 * max(1.0, np.abs(x1).max())):
        raise DomainError("singles scans must share the same positions")
    return x1, np.asarray(y1, dtype=float) * np.asarray(y2, dtype=float)


@dataclass(frozen=True)
class HarmonicContent:
    offset: float
    fundamental: float  # amplitude at the period
    second: float  # amplitude at period / 2

    @property
    def second_harmonic_visibility(self) -> float:
        return self.second / self.offset if self.offset > 0 else float("nan")


def harmonic_content(positions, values, period: float) -> HarmonicContent:
    """Offset and cosine amplitudes at ``period`` and ``period / 2`` by linear least squares."""
    x = np.asarray(positions, dtype=float)
    k = 2 * np.pi / period
    design = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x), np.cos(2 * k * x), np.sin(2 * k * x)])
    c, *_ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    return HarmonicContent(float(c[0]), float(math.hypot(c[1], c[2])), float(math.hypot(c[3], c[4])))


@dataclass(frozen=True)
class ProductComparison:
    classical: HarmonicContent
    quantum: HarmonicContent


def compare_with_coincidence(scan: ScanResult, period: float) -> ProductComparison:
    """Side-by-side harmonic content of the singles product and the coincidence trace."""
    x, prod = classical_product((scan.positions, scan.singles_d1), (scan.positions, scan.singles_d2))
    return ProductComparison(harmonic_content(x, prod, period), harmonic_content(x, scan.coincidence, period))


def synthesize_counts(scan: ScanResult, total_events: int, seed: int) -> ScanResult:
    """Poisson counts with mean ``total_events * probability`` at every point and channel."""
    if total_events < 0:
        raise DomainError(f"total_events must be >= 0, got {total_events}")
    rng = np.random.default_rng(seed)
    cols = {}
    for name in ("singles_d1", "singles_d2", "coincidence"):
        p = getattr(scan, name)
        if np.any(p < 0) or np.any(p > 1 + 1e-12):
            raise DomainError(f"{name} contains values outside [0, 1]")
        cols[name] = rng.poisson(total_events * np.clip(p, 0, None)).astype(float)
    return ScanResult(scan.positions.copy(), **cols)
