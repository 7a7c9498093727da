"""Command-line front end: ``mimcavity {map,scan,spectrum,align,calibrate}``.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .beam_geometry import AlignmentGeometry, alignment_table, lens_tolerance
from .cavity_model import (
    dispersive_slope,
    frequency_response,
    reflectance_map,
)
from .config import (
    ConfigError,
    alignment_geometry,
    cavity_config,
    detection_config,
    load_config,
    map_axes,
    membrane_config,
    parse_modes,
)
from .noise_model import (
    FrequencyNoiseTable,
    gain_from_shot_noise,
    membrane_mode,
    quantum_efficiency,
    signal_psd,
    synthesize_trace,
)
from .polarimetry import lock_scan

SCHEMA_VERSION = 1

UNITS = {"dz_m": "m", "dz_c": "m", "laser_detuning": "Hz"}


def _open_out(path):
    if path is None or str(path) == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_csv(path, kind: str, header: list[str], rows, meta: dict | None = None):
    fh, close = _open_out(path)
    try:
        fh.write(f"# mimcavity {kind} schema v{SCHEMA_VERSION}\n")
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.10g}" for v in row])
    finally:
        if close:
            fh.close()


def cmd_map(args) -> int:
    cfg = load_config(args.config)
    cavity = cavity_config(cfg)
    ax1, ax2 = map_axes(cfg)
    grid = reflectance_map(cavity, ax1, ax2)
    v1, v2 = ax1.values(), ax2.values()
    rows = ((v1[i], v2[j], grid[i, j]) for i in range(len(v1)) for j in range(len(v2)))
    meta = {
        "axis1": f"{ax1.variable} [{UNITS[ax1.variable]}] {ax1.start:g}..{ax1.stop:g} n={ax1.points}",
        "axis2": f"{ax2.variable} [{UNITS[ax2.variable]}] {ax2.start:g}..{ax2.stop:g} n={ax2.points}",
    }
    header = [f"{ax1.variable}_{UNITS[ax1.variable]}", f"{ax2.variable}_{UNITS[ax2.variable]}", "reflectance"]
    _write_csv(args.out, "map", header, rows, meta)
    return 0


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    cavity = cavity_config(cfg)
    det = detection_config(cfg)
    start = cfg.require("scan", "dz_c_start_m")
    stop = cfg.require("scan", "dz_c_stop_m")
    points = cfg.get("scan", "points", 2001)
    if points < 2:
        raise ConfigError("[scan] needs at least two points")
    if abs(stop - start) < cavity.wavelength / 2:
        print("warning: scan spans less than one free spectral range", file=sys.stderr)
    dz = np.linspace(start, stop, points)
    trace = lock_scan(
        cavity, det.alpha, dz, input_power=det.input_power, phi0=cfg.get("scan", "phi0_rad", 0.0),
        gain=det.g_el, efficiency=det.efficiency,
    )
    rows = zip(trace.dz_c, trace.total_power, trace.error_signal)
    meta = {"qwp_angle_rad": f"{trace.qwp_angle:.10g}", "hwp_angle_rad": f"{trace.hwp_angle:.10g}"}
    _write_csv(args.out, "scan", ["dz_c_m", "power_W", "error_V"], rows, meta)
    return 0


def _load_frequency_noise(path: Path) -> FrequencyNoiseTable:
    """Two-column CSV (f_Hz, G_ff); ``#`` comments and one header row allowed."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        float(lines[0].split(",")[0])
    except (IndexError, ValueError):
        lines = lines[1:]
    data = np.loadtxt(lines, delimiter=",", ndmin=2)
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise ValueError("need at least two rows of f_Hz, G_ff")
    return FrequencyNoiseTable(data[:, 0], data[:, 1])


def build_spectrum(cfg):
    """Spectrum model and frequency grid described by a run configuration."""
    det = detection_config(cfg)
    mc = membrane_config(cfg)
    modes = parse_modes(cfg.get("spectrum", "modes", "1,1"))
    couplings = cfg.get("spectrum", "mode_coupling")
    weights = [1.0] * len(modes) if couplings is None else [float(v) for v in couplings.split()]
    if len(weights) != len(modes):
        raise ConfigError("[spectrum] mode_coupling needs one value per mode")
    mech = [membrane_mode(mc, m, n, w) for (m, n), w in zip(modes, weights)]

    chi = cfg.get("spectrum", "chi_per_m")
    chi_f = cfg.get("spectrum", "chi_f_per_Hz")
    if chi is None or chi_f is None:
        cavity = cavity_config(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if chi is None:
                chi = dispersive_slope(cavity).chi
            if chi_f is None:
                chi_f = frequency_response(cavity).chi_f

    noise_file = cfg.get("spectrum", "frequency_noise_file")
    laser = None
    if noise_file:
        path = Path(noise_file)
        if not path.is_absolute():
            path = cfg.base_dir / path
        try:
            laser = _load_frequency_noise(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"[spectrum] frequency_noise_file: {exc}") from exc

    model = signal_psd(mech, chi, det, chi_f=chi_f, laser_noise=laser, overlap=cfg.get("spectrum", "overlap", 1.0))
    f = np.linspace(cfg.get("spectrum", "f_start_Hz", 1e3), cfg.get("spectrum", "f_stop_Hz", 1.25e6),
                    cfg.get("spectrum", "points", 2500))
    return model, f, det


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    model, f, det = build_spectrum(cfg)
    cols = [model.one_sided(f, label) for label in ("thermal", "shot", "electronic", "freqnoise")]
    total = model.one_sided(f)
    rows = zip(f, total, *cols)
    header = ["f_Hz", "G_total_V2perHz", "G_thermal", "G_shot", "G_electronic", "G_freqnoise"]
    _write_csv(args.out, "spectrum", header, rows)
    if args.trace:
        duration = cfg.get("spectrum", "duration_s", 0.2)
        x = synthesize_trace(model, det.sampling_rate, duration, seed=args.seed,
                             highpass=cfg.get("spectrum", "highpass_Hz"))
        t = np.arange(len(x)) / det.sampling_rate
        out = Path(args.out) if args.out not in (None, "-") else Path("spectrum.csv")
        trace_path = out.with_name(out.stem + "_trace.csv")
        _write_csv(trace_path, "trace", ["t_s", "U_V"], zip(t, x),
                   {"seed": args.seed, "sampling_rate_Hz": det.sampling_rate})
    return 0


def cmd_align(args) -> int:
    cfg = load_config(args.config)
    g = alignment_geometry(cfg)
    start = cfg.get("alignment", "dz_start_m", -2e-3)
    stop = cfg.get("alignment", "dz_stop_m", 2e-3)
    points = cfg.get("alignment", "dz_points", 41)
    rows = alignment_table(g, np.linspace(start, stop, points))
    target = cfg.get("alignment", "target_overlap", 0.95)
    tol = lens_tolerance(target, g)
    _write_csv(args.out, "align", ["dz_m", "fringe_frequency_per_m", "overlap"], rows,
               {"target_overlap": target, "lens_tolerance_m": f"{tol:.6g}"})
    if args.out not in (None, "-"):
        print(f"lens tolerance for overlap >= {target:g}: +/-{tol * 1e3:.3f} mm")
    return 0


def cmd_calibrate(args) -> int:
    g_el = gain_from_shot_noise(args.slope, args.responsivity)
    eta = quantum_efficiency(args.responsivity, args.wavelength)
    print(f"g_el = {g_el:.4g} V/Hz")
    print(f"eta  = {eta:.4g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mimcavity", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", required=True, help="INI run configuration")
        sp.add_argument("--out", default=None, help="output CSV (default stdout)")
        sp.set_defaults(func=func)
        return sp

    with_config("map", cmd_map, "reflectance map over two scan variables")
    with_config("scan", cmd_scan, "polarimeter lock-scan traces")
    sp = with_config("spectrum", cmd_spectrum, "detected noise spectrum")
    sp.add_argument("--trace", action="store_true", help="also write a synthesised voltage trace")
    sp.add_argument("--seed", type=int, default=0)
    with_config("align", cmd_align, "lens alignment tolerance table")

    sp = sub.add_parser("calibrate", help="gain and quantum efficiency from a shot-noise slope")
    sp.add_argument("--slope", type=float, required=True, help="G_UU / P_d in V^2 Hz^-1 W^-1")
    sp.add_argument("--responsivity", type=float, default=0.56, help="A/W")
    sp.add_argument("--wavelength", type=float, default=795e-9, help="m")
    sp.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
