"""Coincidence-visibility envelope versus idler mirror displacement.

Evaluates the fringe extrema at the five mirror positions used in the
temporal-mismatch measurement (plus a denser sweep), fits a Gaussian envelope
and prints the carrier period of the central fringe.

    python scripts/envelope_scan.py --filter-fwhm 2.0
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, replace

import numpy as np

from induced_coherence.fringes import fit_envelope, fit_sinusoid
from induced_coherence.interferometer import ExperimentConfig, run_point
from induced_coherence.spectral import (
    FilterSpec,
    SPEED_OF_LIGHT,
    apply_filter,
    build_jsa,
    coincidence_envelope,
    fringe_with_envelope,
    schmidt_analysis,
)

MEASURED_POSITIONS_UM = (-35.0, -15.0, 0.0, 15.0, 35.0)


@dataclass(frozen=True)
class EnvelopeRun:
    pump_bandwidth: float = 0.5  # nm FWHM
    phasematch_width: float = 2.0e13  # rad/s
    filter_fwhm: float = 2.0  # nm
    sweep_um: float = 80.0
    sweep_points: int = 33


def extrema(exp: ExperimentConfig, coherence: float) -> tuple[float, float]:
    phis = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    vals = [run_point(replace(exp, gamma=exp.gamma * coherence), p).coincidence for p in phis]
    return max(vals), min(vals)


def run(cfg: EnvelopeRun) -> None:
    exp = ExperimentConfig(pair_number=2, position_convention="mirror_displacement")
    jsa = build_jsa(pump_bandwidth=cfg.pump_bandwidth, phasematch_width=cfg.phasematch_width)
    filtered = apply_filter(jsa, "signal", FilterSpec(fwhm=cfg.filter_fwhm))
    print(f"Schmidt number: {schmidt_analysis(jsa).schmidt_number:.3f} raw, "
          f"{schmidt_analysis(filtered).schmidt_number:.3f} filtered")

    sweep = np.linspace(-cfg.sweep_um, cfg.sweep_um, cfg.sweep_points) * 1e3
    delays = exp.path_difference(sweep) * 1e-9 / SPEED_OF_LIGHT
    rows = []
    for x, v in zip(sweep, coincidence_envelope(filtered, delays).visibility):
        hi, lo = extrema(exp, v)
        rows.append((x, hi, lo))
    env = fit_envelope(rows)
    print(f"envelope centre {env.center / 1e3:+.3f} um, FWHM {env.width_fwhm / 1e3:.2f} um, "
          f"peak visibility {env.peak_visibility:.4f}")

    print("mirror position (um)   visibility")
    for um in MEASURED_POSITIONS_UM:
        tau = exp.path_difference(um * 1e3) * 1e-9 / SPEED_OF_LIGHT
        hi, lo = extrema(exp, coincidence_envelope(filtered, [tau]).visibility[0])
        print(f"{um:>18.1f}   {(hi - lo) / (hi + lo):.4f}")

    fine = np.linspace(-508.2, 508.2, 200)
    central = fringe_with_envelope(exp, filtered, fine)
    carrier = fit_sinusoid(exp.path_difference(central.positions), central.coincidence, period_hint=508.2)
    print(f"central fringe period {carrier.period:.4f} nm of optical path")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pump-bandwidth", type=float, default=EnvelopeRun.pump_bandwidth)
    p.add_argument("--phasematch-width", type=float, default=EnvelopeRun.phasematch_width)
    p.add_argument("--filter-fwhm", type=float, default=EnvelopeRun.filter_fwhm)
    a = p.parse_args()
    run(EnvelopeRun(a.pump_bandwidth, a.phasematch_width, a.filter_fwhm))


if __name__ == "__main__":
    main()
