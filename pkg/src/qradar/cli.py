"""Command-line front end.

    qradar <experiment> [--config FILE] [--seed S] [--out DIR] [--trials T]
                        [--set KEY=VALUE ...]

Writes ``summary.json`` (and ``scaling.csv`` for ranging experiments) to the
output directory. Exit status: 0 success, 2 configuration error, 3 failed
physics check; 1 for anything unexpected. Failures print a JSON error
document to stderr and leave ``error.json`` in the output directory.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .beam import BeamGeometry
from .config import EXPERIMENTS, RunConfig, parse_config
from .constants import SPEED_OF_LIGHT
from .errors import ConfigError, QRadarError
from .propagation import (
    FresnelConvention,
    default_extent,
    field_to_text,
    on_axis_pulse_amplitude,
    propagate_grid,
    pulse_peak_time,
    relative_l2_error,
    sample_gaussian_to_grid,
)
from .ranging import (
    BLOCK_TRIALS,
    SCALING_COLUMNS,
    Scenario,
    enhancement_ratios,
    estimate_range,
    sample_batch,
    scaling_experiment,
    scaling_row,
)
from .spectral import load_envelope_csv, make_gaussian_spectrum, temporal_width
from .states import TABLE_KNOTS, PhotonSource, SourceMode, single_arrival_density

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_PHYSICS = 3

PROPAGATION_L2_TOL = 1e-3
SEMIGROUP_TOL = 1e-6
PEAK_TOL_WIDTHS = 1e-3
CLT_SIGMAS = 4.0


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory and rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)  # mkstemp creates 0600; artifacts are meant to be shared
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def scaling_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCALING_COLUMNS)
    for row in rows:
        writer.writerow([repr(float(row[c])) if isinstance(row[c], float) else row[c] for c in SCALING_COLUMNS])
    return buf.getvalue()


def _envelope(config: RunConfig):
    if config.envelope_table is not None:
        return load_envelope_csv(config.envelope_table)
    return make_gaussian_spectrum(config.omega0, config.sigma_omega)


def _scenario(config: RunConfig) -> Scenario:
    return Scenario(config.distance_d, config.reflectivity_eta, (config.azimuth, config.elevation))


def _check(value, threshold, passed=None):
    if passed is None:
        passed = bool(value < threshold)
    return {"value": value, "threshold": threshold, "passed": bool(passed)}


def _propagation_check(config: RunConfig, out: Path):
    env_omega = config.omega0 if config.envelope_table is None else _envelope(config).omega0
    geom = BeamGeometry(config.z0)
    conv = FresnelConvention(config.fresnel_convention)
    cases, checks, files = [], {}, []
    for k, frac in enumerate(config.propagation_distances_z0):
        d = frac * config.z0
        extent = config.grid_extent or default_extent(geom, env_omega, 0.0, d)
        start = sample_gaussian_to_grid(geom, env_omega, 0.0, config.grid_n, extent)
        numeric = propagate_grid(start, d, conv)
        analytic = sample_gaussian_to_grid(geom, env_omega, d, config.grid_n, extent)
        composed = propagate_grid(propagate_grid(start, d / 3.0, conv), 2.0 * d / 3.0, conv)
        case = {
            "d_over_z0": frac,
            "d_m": d,
            "grid_extent_m": extent,
            "relative_l2_error": relative_l2_error(numeric, analytic),
            "semigroup_error": relative_l2_error(composed, numeric),
            "power_ratio": numeric.power() / start.power(),
        }
        cases.append(case)
        checks[f"l2_error[{frac:g}z0]"] = _check(case["relative_l2_error"], PROPAGATION_L2_TOL)
        checks[f"semigroup[{frac:g}z0]"] = _check(case["semigroup_error"], SEMIGROUP_TOL)
        if config.dump_fields:
            if k == 0:
                files.extend(_dump(start, out, "field_z0"))
            files.extend(_dump(numeric, out, f"field_z{d:.6g}"))
    results = {
        "omega_rad_per_s": env_omega,
        "waist_radius_m": geom.waist_radius(env_omega),
        "grid_n": config.grid_n,
        "cases": cases,
    }
    return results, checks, files


def _dump(grid, out: Path, stem: str):
    path = out / f"{stem}.csv"
    csv_text, header_text = field_to_text(grid)
    write_atomic(path, csv_text)
    write_atomic(path.with_suffix(".json"), header_text)
    return [path.name, path.with_suffix(".json").name]


def _pulse_delay(config: RunConfig, out: Path):
    env = _envelope(config)
    geom = BeamGeometry(config.z0)
    d = config.distance_d
    dtau = temporal_width(env)
    expected = 2.0 * d / SPEED_OF_LIGHT
    peak = pulse_peak_time(env, geom, d, d)
    a_peak = abs(on_axis_pulse_amplitude(env, geom, d, d, peak)) ** 2
    a_off = abs(on_axis_pulse_amplitude(env, geom, d, d, peak + dtau)) ** 2
    source = PhotonSource(1, SourceMode.INDEPENDENT, env, geom)
    density = single_arrival_density(source, 2.0 * d)
    batch = sample_batch(source, Scenario(d, 1.0), config.trials, config.seed)
    mc_mean = float(np.mean(batch.detected_statistics()))
    band = CLT_SIGMAS * dtau / math.sqrt(config.trials)
    results = {
        "peak_time_s": peak,
        "expected_peak_time_s": expected,
        "density_center_s": density.center,
        "density_width_s": density.width,
        "temporal_width_s": dtau,
        "intensity_ratio_at_one_width": a_off / a_peak,
        "monte_carlo_mean_s": mc_mean,
        "monte_carlo_band_s": band,
        "trials": config.trials,
    }
    checks = {"peak_offset_widths": _check(abs(peak - density.center) / dtau, PEAK_TOL_WIDTHS)}
    checks["monte_carlo_offset_s"] = _check(abs(mc_mean - density.center), band)
    if env.is_gaussian:
        checks["intensity_ratio_error"] = _check(abs(results["intensity_ratio_at_one_width"] - math.exp(-0.5)), 1e-6)
    return results, checks, []


def _scaling(config: RunConfig, out: Path):
    env = _envelope(config)
    rows = scaling_experiment(
        config.N_list, config.trials, _scenario(config), env, config.seed, BeamGeometry(config.z0)
    )
    write_atomic(out / "scaling.csv", scaling_csv(rows))
    ratios = enhancement_ratios(rows)
    checks = {}
    for n, r in sorted(ratios.items()):
        dev = abs(r * math.sqrt(n) - 1.0)
        checks[f"enhancement[N={n}]"] = _check(dev, config.tolerance)
    results = {
        "rows": rows,
        "enhancement": [
            {"N": n, "entangled_over_independent": r, "expected": 1.0 / math.sqrt(n)}
            for n, r in sorted(ratios.items())
        ],
    }
    return results, checks, ["scaling.csv"]


def _single_run(config: RunConfig, out: Path):
    env = _envelope(config)
    source = PhotonSource(config.n_photons, SourceMode(config.mode), env, BeamGeometry(config.z0))
    scenario = _scenario(config)
    row = scaling_row(source, scenario, config.trials, config.seed)
    write_atomic(out / "scaling.csv", scaling_csv([row]))
    est = estimate_range(sample_batch(source, scenario, config.trials, config.seed))
    results = {
        "d_hat_m": est.d_hat,
        "std_error_m": est.std_error,
        "n_effective": est.n_effective,
        "estimator": est.estimator,
        "detection_fraction": row["detection_fraction"],
        "empirical_sigma_s": row["empirical_sigma_s"],
        "predicted_sigma_s": row["predicted_sigma_s"],
    }
    checks = {"bias_in_std_errors": _check(abs(est.d_hat - config.distance_d) / est.std_error, CLT_SIGMAS)}
    return results, checks, ["scaling.csv"]


RUNNERS = {
    "propagation_check": _propagation_check,
    "pulse_delay": _pulse_delay,
    "scaling": _scaling,
    "single_run": _single_run,
}


def conventions(config: RunConfig) -> dict:
    return {
        "fresnel_convention": config.fresnel_convention,
        "fourier_sign": "pulse(t) = integral exp(-i omega t) phi(omega) d omega",
        "delay": "pulse peaks at t = +(z + d) / c",
        "width_measure": "standard deviation of |pulse(t)|^2",
        "speed_of_light_m_per_s": SPEED_OF_LIGHT,
        "rng": f"numpy PCG64, SeedSequence(seed, spawn_key=(block,)), {BLOCK_TRIALS} trials per block",
        "tabulated_density_knots": TABLE_KNOTS,
    }


def run(config: RunConfig) -> int:
    """Execute one experiment and write its artifacts; returns the exit status."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results, checks, files = RUNNERS[config.experiment](config, out)
    passed = all(c["passed"] for c in checks.values())
    summary = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "experiment": config.experiment,
        "status": "ok" if passed else "physics_check_failed",
        "seed": config.seed,
        "config": config.to_dict(),
        "conventions": conventions(config),
        "results": results,
        "checks": checks,
        "artifacts": sorted(files + ["summary.json"]),
    }
    write_atomic(out / "summary.json", dumps(summary))
    return EXIT_OK if passed else EXIT_PHYSICS


def _error_doc(exc: BaseException, code: int) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        err["key"] = exc.key
        err["message"] = exc.message
    return {"schema_version": SCHEMA_VERSION, "status": "error", "exit_code": code, "error": err}


def _parse_set(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(item, "--set expects KEY=VALUE")
        key, value = item.split("=", 1)
        out[key.strip()] = _literal(value.strip())
    return out


def _literal(text):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qradar", description=__doc__.split("\n\n")[0])
    p.add_argument("experiment", nargs="?", choices=EXPERIMENTS,
                   help="experiment to run (overrides the config file's value)")
    p.add_argument("--config", help="flat YAML/JSON file of configuration keys")
    p.add_argument("--seed", type=int, help="64-bit RNG seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--trials", help="Monte Carlo trials per cell (default 1e5)")
    p.add_argument("--d", dest="distance_d", help="target distance in metres")
    p.add_argument("--eta", dest="reflectivity_eta", help="per-photon survival probability")
    p.add_argument("--N", dest="n_photons", help="photons per probe (single_run)")
    p.add_argument("--N-list", dest="N_list", help="comma-separated N values (scaling)")
    p.add_argument("--mode", choices=[m.value for m in SourceMode])
    p.add_argument("--convention", dest="fresnel_convention", choices=[c.value for c in FresnelConvention])
    p.add_argument("--dump-fields", action="store_true", default=None, help="write field_z*.csv dumps")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any configuration key")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out
    try:
        overrides = _parse_set(args.set)
        for key in ("experiment", "seed", "trials", "distance_d", "reflectivity_eta", "n_photons",
                    "N_list", "mode", "fresnel_convention", "dump_fields"):
            value = getattr(args, key)
            if value is not None:
                overrides[key] = value
        if args.out is not None:
            overrides["output_dir"] = args.out
        config = parse_config(args.config, overrides)
        out_dir = config.output_dir
        code = run(config)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG, out_dir)
    except QRadarError as exc:
        return _fail(exc, EXIT_PHYSICS, out_dir)
    except Exception as exc:  # noqa: BLE001 - always emit the error document
        return _fail(exc, EXIT_UNEXPECTED, out_dir)
    return code


def _fail(exc, code, out_dir):
    text = dumps(_error_doc(exc, code))
    sys.stderr.write(text)
    if out_dir:
        try:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            write_atomic(Path(out_dir) / "error.json", text)
        except OSError:
            pass
    return code


if __name__ == "__main__":
    sys.exit(main())
