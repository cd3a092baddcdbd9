"""Command-line front end.

    python -m induced_coherence --scenario scan --config run.cfg --out results/

Exit codes: 0 ok, 1 configuration error, 2 physics/domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, format_config, parse_config, parse_config_text
from .errors import ConfigError, DomainError
from .fringes import compare_with_coincidence, fit_envelope, fit_sinusoid, synthesize_counts
from .interferometer import ScanResult, emission_check, hom_cross_term_check, run_point, scan
from .optics import stimulated_gain_ratio
from .spectral import (
    SPEED_OF_LIGHT,
    apply_filter,
    build_jsa,
    coincidence_envelope,
    default_grid,
    envelope_half_width,
    fringe_with_envelope,
    jsi_correlation,
    schmidt_analysis,
    write_jsa_csv,
)

SCENARIOS = ("scan", "envelope", "hom", "emission", "fit", "jsa")
FORMATS = ("csv", "json")
OUTPUT_ENV = "INDUCED_COHERENCE_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3
SCAN_HEADER = ("position_nm", "singles_d1", "singles_d2", "coincidence")


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    config_path: str | None
    output_dir: str
    seed: int = 0
    format: str = "csv"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; choose from {', '.join(FORMATS)}")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class _Writer:
    """Emits data files with the shared provenance header."""

    def __init__(self, manifest: RunManifest, config: RunConfig):
        self.manifest = manifest
        self.config = config
        self.out = Path(manifest.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def header_lines(self) -> list[str]:
        lines = [f"induced-coherence {__version__}", f"scenario = {self.manifest.scenario}",
                 f"seed = {self.manifest.seed}"]
        return lines + format_config(self.config).splitlines()

    def header_dict(self) -> dict:
        return {"toolkit": f"induced-coherence {__version__}", "scenario": self.manifest.scenario,
                "seed": self.manifest.seed, "config": asdict(self.config)}

    def table(self, stem: str, columns: dict[str, np.ndarray], extra: dict | None = None) -> None:
        if self.manifest.format == "json":
            payload = {"header": self.header_dict(), "columns": columns}
            if extra:
                payload.update(extra)
            self._json(stem, payload)
            return
        path = self.out / f"{stem}.csv"
        with open(path, "w", newline="") as fh:
            for line in self.header_lines():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(columns))
            for row in zip(*columns.values()):
                w.writerow([_fmt(v) for v in row])
        self.written.append(path)

    def scan(self, stem: str, result: ScanResult, extra: dict | None = None) -> None:
        cols = dict(zip(SCAN_HEADER, (result.positions, result.singles_d1, result.singles_d2, result.coincidence)))
        self.table(stem, cols, extra)

    def summary(self, summary: dict) -> None:
        if self.manifest.format == "json":
            self._json("summary", {"header": self.header_dict(), "summary": summary})
            return
        path = self.out / "summary.csv"
        with open(path, "w", newline="") as fh:
            for line in self.header_lines():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in summary.items():
                w.writerow([k, _fmt(v)])
        self.written.append(path)

    def _json(self, stem: str, payload: dict) -> None:
        path = self.out / f"{stem}.json"
        path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
        self.written.append(path)


def _fit_summary(prefix: str, fit) -> dict:
    return {f"{prefix}_period_nm": fit.period, f"{prefix}_visibility": fit.visibility,
            f"{prefix}_offset": fit.offset, f"{prefix}_amplitude": fit.amplitude,
            f"{prefix}_phase_rad": fit.phase, f"{prefix}_residual_rms": fit.residual_rms}


def _scenario_scan(cfg: RunConfig, w: _Writer) -> dict:
    exp = cfg.experiment()
    result = scan(exp)
    single = scan(replace(exp, pair_number=1))
    coinc_fit = fit_sinusoid(result.positions, result.coincidence)
    singles_fit = fit_sinusoid(single.positions, single.singles_d1)
    summary = {
        "pair_number": exp.pair_number,
        "gamma": exp.gamma,
        **_fit_summary("coincidence", coinc_fit),
        **_fit_summary("single_pair_singles", singles_fit),
        "period_ratio": coinc_fit.period / singles_fit.period,
        "hom_cross_term_coincidence": hom_cross_term_check(exp.bs_transmission),
    }
    comparison = compare_with_coincidence(single, exp.idler_wavelength)
    summary["classical_product_2phi_visibility"] = comparison.classical.second_harmonic_visibility
    w.scan("scan", result)
    return summary


def _scenario_envelope(cfg: RunConfig, w: _Writer) -> dict:
    exp = cfg.experiment()
    jsa = build_jsa(default_grid(cfg.pump_center, cfg.pump_bandwidth, cfg.phasematch_width,
                                 cfg.signal_wavelength, cfg.grid_size),
                    cfg.pump_center, cfg.pump_bandwidth, cfg.phasematch_width)
    filtered = apply_filter(jsa, "signal", cfg.filter_spec())

    coarse = np.linspace(cfg.envelope_start, cfg.envelope_stop, cfg.envelope_points)
    delays = exp.path_difference(coarse) * 1e-9 / SPEED_OF_LIGHT
    coherence = coincidence_envelope(filtered, delays).visibility
    # Sample one full fringe at 16 phases around each coarse position.
    phis = np.linspace(0.0, 2 * np.pi, 16, endpoint=False)
    maxima, minima = [], []
    for v in coherence:
        vals = [run_point(replace(exp, gamma=float(exp.gamma * v)), float(p)).coincidence for p in phis]
        maxima.append(max(vals))
        minima.append(min(vals))
    env = fit_envelope(list(zip(coarse, maxima, minima)))
    w.table("envelope", {"position_nm": coarse, "coherence": coherence,
                         "coincidence_max": np.array(maxima), "coincidence_min": np.array(minima)})

    fine = np.linspace(-cfg.fringe_half_window, cfg.fringe_half_window, cfg.fringe_points)
    central = fringe_with_envelope(exp, filtered, fine)
    carrier = fit_sinusoid(central.positions, central.coincidence)
    w.scan("envelope_fringe", central)
    half_delay = envelope_half_width(filtered)
    half_path = half_delay * SPEED_OF_LIGHT * 1e9
    scale = 0.5 if exp.position_convention == "mirror_displacement" else 1.0
    return {
        "carrier_period_nm": carrier.period,
        "carrier_visibility": carrier.visibility,
        "envelope_center_nm": env.center,
        "envelope_fwhm_nm": env.width_fwhm,
        "envelope_peak_visibility": env.peak_visibility,
        "coherence_half_width_s": half_delay,
        "coherence_half_width_position_nm": half_path * scale,
        "schmidt_number_filtered": schmidt_analysis(filtered).schmidt_number,
    }


def _scenario_hom(cfg: RunConfig, w: _Writer) -> dict:
    t = cfg.bs_transmission
    return {
        "cross_term_coincidence_50_50": hom_cross_term_check(),
        "cross_term_coincidence_configured": hom_cross_term_check(t),
        "expected_configured": (t * t - (1 - t * t)) ** 2,
        "cross_term_coincidence_no_bs": hom_cross_term_check(1.0),
    }


def _scenario_emission(cfg: RunConfig, w: _Writer) -> dict:
    eps = cfg.gain_epsilon
    blocked, unblocked = emission_check(eps, True), emission_check(eps, False)
    singles_ratio = unblocked.singles_rate_s2 / blocked.singles_rate_s2 if eps > 0 else 1.0
    pair_ratio = unblocked.pair_rate_s2 / blocked.pair_rate_s2 if eps > 0 else 1.0
    return {
        "gain_epsilon": eps,
        "singles_rate_blocked": blocked.singles_rate_s2,
        "singles_rate_unblocked": unblocked.singles_rate_s2,
        "pair_rate_blocked": blocked.pair_rate_s2,
        "pair_rate_unblocked": unblocked.pair_rate_s2,
        "singles_ratio": singles_ratio,
        "pair_ratio": pair_ratio,
        "stimulated_gain_ratio": stimulated_gain_ratio(eps ** 2),
    }


def read_scan_csv(path: str | Path) -> ScanResult:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    if not rows or tuple(rows[0]) != SCAN_HEADER:
        raise DomainError(f"{path}: expected header {','.join(SCAN_HEADER)}")
    try:
        data = np.array(rows[1:], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != 4:
        raise DomainError(f"{path}: expected 4 columns")
    return ScanResult(*data.T)


def _scenario_fit(cfg: RunConfig, w: _Writer) -> dict:
    if cfg.fit_input:
        data = read_scan_csv(cfg.fit_input)
        source = cfg.fit_input
    else:
        data = synthesize_counts(scan(cfg.experiment()), cfg.total_events, w.manifest.seed)
        w.scan("counts", data)
        source = "synthetic"
    summary = {"source": source, "points": len(data)}
    for name in ("singles_d1", "singles_d2", "coincidence"):
        summary.update(_fit_summary(name, fit_sinusoid(data.positions, getattr(data, name))))
    return summary


def _scenario_jsa(cfg: RunConfig, w: _Writer) -> dict:
    jsa = build_jsa(default_grid(cfg.pump_center, cfg.pump_bandwidth, cfg.phasematch_width,
                                 cfg.signal_wavelength, cfg.grid_size),
                    cfg.pump_center, cfg.pump_bandwidth, cfg.phasematch_width)
    filtered = apply_filter(jsa, "signal", cfg.filter_spec())
    for stem, j in (("jsa", jsa), ("jsa_filtered", filtered)):
        path = w.out / f"{stem}.csv"
        write_jsa_csv(j, path, w.header_lines())
        w.written.append(path)
    raw, filt = schmidt_analysis(jsa), schmidt_analysis(filtered)
    return {
        "jsi_correlation": jsi_correlation(jsa),
        "schmidt_number": raw.schmidt_number,
        "purity": raw.purity,
        "schmidt_number_filtered": filt.schmidt_number,
        "purity_filtered": filt.purity,
        "coherence_half_width_s": envelope_half_width(filtered),
    }


_RUNNERS = {
    "scan": _scenario_scan,
    "envelope": _scenario_envelope,
    "hom": _scenario_hom,
    "emission": _scenario_emission,
    "fit": _scenario_fit,
    "jsa": _scenario_jsa,
}


def run(manifest: RunManifest, stdout=None) -> int:
    """Execute one scenario; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = sys.stderr
    try:
        cfg = parse_config(manifest.config_path) if manifest.config_path else parse_config_text("")
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=stderr)
        return EXIT_IO
    print("# resolved configuration", file=stdout)
    print(format_config(cfg), end="", file=stdout)
    try:
        writer = _Writer(manifest, cfg)
        summary = _RUNNERS[manifest.scenario](cfg, writer)
        writer.summary(summary)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=stderr)
        return EXIT_IO
    print("# summary", file=stdout)
    for k, v in summary.items():
        print(f"{k} = {_fmt(v)}", file=stdout)
    for path in writer.written:
        print(f"# wrote {path}", file=stdout)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def main(argv=None) -> int:
    parser = _Parser(prog="induced-coherence", description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", required=True, choices=SCENARIOS)
    parser.add_argument("--config", default=None, help="key = value config file (defaults if omitted)")
    parser.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or ./out)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", default="csv", choices=FORMATS)
    args = parser.parse_args(argv)
    out = args.out or os.environ.get(OUTPUT_ENV) or "out"
    manifest = RunManifest(args.scenario, args.config, out, args.seed, args.format)
    return run(manifest)


if __name__ == "__main__":
    raise SystemExit(main())
