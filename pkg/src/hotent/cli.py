"""Command-line driver: sectioned config in, deterministic CSV/JSON-lines out.

Usage::

    hotent run CONFIG_OR_RECIPE [--out DIR] [--format csv|jsonl]
    hotent recipes                 # list bundled recipes
    hotent show RECIPE             # print a bundled recipe

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 overflow-guard termination (partial output written).
"""
from __future__ import annotations

import argparse
import configparser
import csv
import difflib
import io
import json
import math
import os
import re
import sys
import time
from importlib import resources

import numpy as np

from . import __version__, kernels
from .quadrature import QuadratureError

__all__ = ["main", "run", "load_config", "ConfigError", "SCHEMA", "COLUMNS"]

SCHEMA_VERSION = 1

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_GUARD = 0, 2, 3, 4

MODES = ("evolve", "scan", "amplifier", "energy", "cl")

# section -> key -> (type, default, description)
SCHEMA = {
    "run": {
        "mode": (str, "evolve", "one of evolve, scan, amplifier, energy, cl"),
        "name": (str, "run", "label stored in the manifest"),
    },
    "system": {
        "m": (float, 1.0, "oscillator mass"),
        "omega": (float, 1.0, "oscillator frequency"),
        "gamma1": (float, 0.0025, "damping constant of oscillator 1"),
        "gamma2": (float, 0.0025, "damping constant of oscillator 2"),
        "beta_bath1": (float, 0.2, "inverse temperature of bath 1"),
        "beta_bath2": (float, 0.2, "inverse temperature of bath 2"),
    },
    "drive": {
        "c0": (float, 0.0, "constant coupling offset"),
        "c1": (float, 0.5, "drive amplitude"),
        "omega_d": (float, 1.996, "drive angular frequency"),
    },
    "initial": {
        "kind": (str, "thermal", "thermal or squeezed"),
        "beta_osc1": (float, 2e4, "initial inverse temperature of oscillator 1 (inf allowed)"),
        "beta_osc2": (float, 2e4, "initial inverse temperature of oscillator 2 (inf allowed)"),
        "eta": (float, 0.0, "squeeze parameter (squeezed kind)"),
        "theta": (float, 0.0, "squeeze phase (squeezed kind)"),
        "nbar1": (float, 0.0, "thermal occupation 1 (squeezed kind)"),
        "nbar2": (float, 0.0, "thermal occupation 2 (squeezed kind)"),
    },
    "numerics": {
        "steps_per_period": (int, 4096, "RK4 steps per drive period"),
        "sample_stride": (int, 256, "record every n-th step"),
        "t_end": (float, 400.0, "final time"),
        "workers": (int, 1, "worker processes for scans"),
    },
    "scan": {
        "c1_min": (float, 0.0, "smallest drive amplitude"),
        "c1_max": (float, 1.0, "largest drive amplitude"),
        "n_c1": (int, 100, "grid points in c1"),
        "omega_d_min": (float, 1.5, "smallest drive frequency"),
        "omega_d_max": (float, 2.5, "largest drive frequency"),
        "n_omega_d": (int, 100, "grid points in omega_d"),
    },
    "amplifier": {
        "m": (float, 1.0, "mass"),
        "omega": (float, 1.0, "oscillator frequency"),
        "g": (float, 0.02, "amplification constant"),
        "c0": (float, 0.2, "constant coupling"),
        "gamma": (float, 0.02, "bath coupling, e^2 = 8 pi m gamma"),
        "beta": (float, 0.1, "bath inverse temperature"),
        "cutoff": (float, 1000.0, "bath frequency cutoff"),
        "eta": (float, 2.0, "initial two-mode squeeze"),
        "theta": (float, 0.0, "initial squeeze phase"),
        "nbar": (float, 0.0, "initial thermal occupation of both modes"),
        "kernel": (str, "quantum", "quantum, classical or vacuum noise kernel"),
        "t_end": (float, 30.0, "final time"),
        "n_samples": (int, 301, "number of equally spaced samples from t = 0"),
        "tolerance": (float, 1e-8, "quadrature panel tolerance"),
    },
    "cl": {
        "gamma": (float, 0.5, "damping constant"),
        "omega_p": (float, 1.0, "bare frequency"),
        "beta": (float, 0.01, "bath inverse temperature"),
        "omega_c": (float, 50.0, "split frequency"),
        "cutoff": (float, 1000.0, "bath frequency cutoff"),
        "kind": (str, "damped", "damped or inverted"),
        "t_start": (float, 0.001, "first sample time (> 0)"),
        "t_end": (float, 20.0, "last sample time"),
        "n_samples": (int, 200, "number of equally spaced samples"),
        "tolerance": (float, 1e-8, "quadrature panel tolerance"),
    },
    "output": {
        "directory": (str, "out", "output directory (created if missing)"),
        "format": (str, "csv", "csv or jsonl"),
    },
}

SECTIONS_BY_MODE = {
    "evolve": ("run", "system", "drive", "initial", "numerics", "output"),
    "energy": ("run", "system", "drive", "initial", "numerics", "output"),
    "scan": ("run", "system", "drive", "numerics", "scan", "output"),
    "amplifier": ("run", "amplifier", "output"),
    "cl": ("run", "cl", "output"),
}

COV_COLUMNS = ["s_x1x1", "s_x2x2", "s_x1x2", "s_x1p1", "s_x2p2",
               "s_x1p2", "s_x2p1", "s_p1p1", "s_p2p2", "s_p1p2"]

COLUMNS = {
    "evolve": ["t", "E_N", "log_delta_pt", "log_det_sigma"] + COV_COLUMNS,
    "scan": ["c1", "omega_d", "max_modulus", "classification"],
    "energy": ["t", "U", "P_xi1", "P_xi2", "P_gamma1", "P_gamma2", "P_drive", "residual"],
    "cl": ["t", "P_exact", "P_thermal", "P_vacuum", "P_cl"],
    "amplifier": ["t", "s_xx_plus", "s_xp_plus", "s_pp_plus", "s_xx_minus", "s_xp_minus",
                  "s_pp_minus", "lambda_small_sq", "lambda_big_sq", "E_N", "eta_eff",
                  "nbar_eff", "T_eff"],
}

DATA_FILE = {"evolve": "evolve", "scan": "scan", "energy": "energy", "cl": "cl",
             "amplifier": "amplifier"}


class ConfigError(ValueError):
    """Invalid configuration (exit code 2)."""


# ---------------------------------------------------------------------------
# configuration

def _key_lines(text):
    """Map (section, key) -> line number for error messages."""
    out = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", s)
        if m:
            section = m.group(1).strip()
            out.setdefault((section, None), lineno)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            out.setdefault((section, m.group(1).strip().lower()), lineno)
    return out


def _nearest(name, candidates):
    match = difflib.get_close_matches(name, list(candidates), n=1, cutoff=0.5)
    return match[0] if match else None


def _convert(section, key, raw, typ, lineno):
    where = "[%s] %s (line %s)" % (section, key, lineno)
    try:
        if typ is float:
            v = float(raw)
            if math.isnan(v):
                raise ValueError
            return v
        if typ is int:
            return int(raw)
        return str(raw).strip()
    except ValueError:
        raise ConfigError("%s: cannot parse %r as %s" % (where, raw, typ.__name__)) from None


def load_config(text, source="<string>"):
    """Parse and validate a config; returns ``{section: {key: value}}`` with defaults."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",),
                                       comment_prefixes=("#", ";"), default_section="__none__")
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("%s: %s" % (source, exc)) from None
    lines = _key_lines(text)
    resolved = {s: {k: spec[1] for k, spec in keys.items()} for s, keys in SCHEMA.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            hint = _nearest(section, SCHEMA)
            raise ConfigError("%s line %s: unknown section [%s]%s" % (
                source, lines.get((section, None), "?"), section,
                "; did you mean [%s]?" % hint if hint else ""))
        for key, raw in parser.items(section):
            lineno = lines.get((section, key), "?")
            if key not in SCHEMA[section]:
                hint = _nearest(key, SCHEMA[section])
                raise ConfigError("%s line %s: unknown key '%s' in [%s]%s" % (
                    source, lineno, key, section,
                    "; did you mean '%s'?" % hint if hint else ""))
            typ = SCHEMA[section][key][0]
            resolved[section][key] = _convert(section, key, raw, typ, lineno)
    mode = resolved["run"]["mode"].lower()
    if mode not in MODES:
        hint = _nearest(mode, MODES)
        raise ConfigError("[run] mode: unknown mode %r%s" % (
            mode, "; did you mean %r?" % hint if hint else ""))
    resolved["run"]["mode"] = mode
    fmt = resolved["output"]["format"].lower()
    if fmt not in ("csv", "jsonl"):
        raise ConfigError("[output] format must be csv or jsonl, got %r" % fmt)
    resolved["output"]["format"] = fmt
    return resolved


def recipe_names():
    files = resources.files("hotent").joinpath("recipes")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def recipe_text(name):
    path = resources.files("hotent").joinpath("recipes", name + ".cfg")
    if not path.is_file():
        raise ConfigError("no bundled recipe %r (available: %s)" % (name, ", ".join(recipe_names())))
    return path.read_text(encoding="utf-8")


def _read_source(arg):
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read(), arg
    name = os.path.splitext(os.path.basename(arg))[0]
    if name in recipe_names():
        return recipe_text(name), "recipe:%s" % name
    raise ConfigError("config file %r not found and not a bundled recipe" % (arg,))


# ---------------------------------------------------------------------------
# output

def _fmt(v):
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _json_value(v):
    if isinstance(v, str):
        return v
    v = float(v)
    return v if math.isfinite(v) else _fmt(v)


def write_table(path_base, fmt, columns, rows):
    """Write rows as CSV (shortest round-trip floats) or JSON lines."""
    path = path_base + (".csv" if fmt == "csv" else ".jsonl")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        else:
            for row in rows:
                fh.write(json.dumps({c: _json_value(v) for c, v in zip(columns, row)}) + "\n")
    return path


# ---------------------------------------------------------------------------
# modes

def _system(cfg):
    from .model import SystemParams
    s = cfg["system"]
    return SystemParams(s["m"], s["omega"], s["gamma1"], s["gamma2"], s["beta_bath1"], s["beta_bath2"])


def _protocol(cfg):
    from .model import DriveProtocol
    d = cfg["drive"]
    return DriveProtocol(d["c0"], d["c1"], d["omega_d"])


def _initial(cfg, params):
    from .model import ThermalProduct, TwoModeSqueezedThermal, build_initial_covariance
    i = cfg["initial"]
    kind = i["kind"].lower()
    if kind == "thermal":
        state = ThermalProduct(i["beta_osc1"], i["beta_osc2"])
    elif kind == "squeezed":
        state = TwoModeSqueezedThermal(i["eta"], i["theta"], i["nbar1"], i["nbar2"])
    else:
        raise ConfigError("[initial] kind must be thermal or squeezed, got %r" % kind)
    return build_initial_covariance(state, params)


def _evolve(cfg):
    from .dynamics import evolve
    params, protocol = _system(cfg), _protocol(cfg)
    n = cfg["numerics"]
    traj = evolve(_initial(cfg, params), params, protocol, n["t_end"],
                  n["steps_per_period"], n["sample_stride"])
    return traj


def run_evolve(cfg):
    from .entanglement import spectrum_arrays
    traj = _evolve(cfg)
    r = spectrum_arrays(traj.packed, traj.log_det)
    rows = (list(x) for x in np.column_stack(
        [traj.times, r["E_N"], r["log_delta_pt"], r["log_det_sigma"], traj.packed]))
    summary = {"samples": len(traj), "t_final": float(traj.times[-1]),
               "E_N_final": float(r["E_N"][-1]),
               "gap_final": float(r["log_delta_pt"][-1] - r["log_det_sigma"][-1]),
               "terminated_early": traj.terminated_early, "reason": traj.reason,
               "kernel_backend": traj.backend}
    return rows, summary, traj.terminated_early


def run_energy(cfg):
    from .energetics import power_decomposition
    traj = _evolve(cfg)
    budget = power_decomposition(traj)
    rows = (list(x) for x in budget.table())
    summary = {"samples": len(traj), "t_final": float(traj.times[-1]),
               "relative_residual": budget.relative_residual(),
               "terminated_early": traj.terminated_early, "reason": traj.reason,
               "kernel_backend": traj.backend}
    return rows, summary, traj.terminated_early


def run_scan(cfg):
    from .stability import Classification, expected_monodromy_det, scan_phase_diagram
    params = _system(cfg)
    s, n = cfg["scan"], cfg["numerics"]
    res = scan_phase_diagram(params, (s["c1_min"], s["c1_max"]), s["n_c1"],
                             (s["omega_d_min"], s["omega_d_max"]), s["n_omega_d"],
                             cfg["drive"]["c0"], n["steps_per_period"], n["workers"])
    rows, counts = [], {c.value: 0 for c in Classification}
    det_dev = 0.0
    for c1, wd, v in res.rows():
        rows.append([c1, wd, v.max_modulus, v.classification.value])
        counts[v.classification.value] += 1
        if v.classification is not Classification.FAILED:
            expected = expected_monodromy_det(params, v.period)
            det_dev = max(det_dev, abs(v.det_monodromy / expected - 1.0))
    total = len(rows)
    summary = {"points": total, "counts": counts,
               "marginal_fraction": counts["Marginal"] / total,
               "max_det_law_deviation": det_dev}
    return rows, summary, False


def run_amplifier(cfg):
    from .amplifier import AmplifierParams, amplifier_effective_history, evolve_amplifier_covariance
    from .squeezed import SqueezeSpec
    a = cfg["amplifier"]
    params = AmplifierParams(a["m"], a["omega"], a["g"], a["c0"], a["gamma"], a["beta"], a["cutoff"])
    times = np.linspace(0.0, a["t_end"], a["n_samples"])
    traj = evolve_amplifier_covariance(params, SqueezeSpec(a["eta"], a["theta"], a["nbar"], a["nbar"]),
                                       times, kernel=a["kernel"], tol=a["tolerance"])
    h = amplifier_effective_history(traj)
    table = np.column_stack([times, traj.plus, traj.minus, h.lambda_small_sq, h.lambda_big_sq,
                             h.E_N, h.eta_eff, h.nbar_eff, h.T_eff])
    slope = float(np.polyfit(times, h.eta_eff, 1)[0]) if len(times) > 1 else float("nan")
    summary = {"samples": len(times), "temperature_crossing_time": h.temperature_crossing_time,
               "separability_time": h.separability_time, "eta_eff_slope": slope}
    return (list(x) for x in table), summary, False


def run_cl(cfg):
    from .cl_analysis import ClSetup, cl_constant, noise_power_exact, noise_power_split_band
    c = cfg["cl"]
    setup = ClSetup(c["gamma"], c["omega_p"], c["beta"], c["omega_c"], c["cutoff"], c["kind"].lower())
    if not 0 < c["t_start"] <= c["t_end"]:
        raise ConfigError("[cl] need 0 < t_start <= t_end")
    times = np.linspace(c["t_start"], c["t_end"], c["n_samples"])
    exact = noise_power_exact(setup, times, c["tolerance"])
    thermal, vacuum = noise_power_split_band(setup, times, c["tolerance"])
    table = np.column_stack([times, exact, thermal, vacuum, np.full_like(times, cl_constant(setup))])
    summary = {"samples": len(times), "cl_constant": cl_constant(setup), "Omega": setup.Omega}
    return (list(x) for x in table), summary, False


RUNNERS = {"evolve": run_evolve, "energy": run_energy, "scan": run_scan,
           "amplifier": run_amplifier, "cl": run_cl}


def run(config_arg, out_dir=None, fmt=None, stream=sys.stderr):
    """Execute a configuration; returns the exit status."""
    start = time.perf_counter()
    try:
        text, source = _read_source(config_arg)
        cfg = load_config(text, source)
        if out_dir is not None:
            cfg["output"]["directory"] = out_dir
        if fmt is not None:
            if fmt not in ("csv", "jsonl"):
                raise ConfigError("format must be csv or jsonl")
            cfg["output"]["format"] = fmt
        mode = cfg["run"]["mode"]
        rows, summary, guard_hit = RUNNERS[mode](cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=stream)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print("config error: %s" % exc, file=stream)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, QuadratureError) as exc:
        print("numerical failure (%s): %s" % (type(exc).__name__, exc), file=stream)
        return EXIT_NUMERIC

    out = cfg["output"]["directory"]
    os.makedirs(out, exist_ok=True)
    data_path = write_table(os.path.join(out, DATA_FILE[mode]), cfg["output"]["format"],
                            COLUMNS[mode], rows)
    status = EXIT_GUARD if guard_hit else EXIT_OK
    manifest = {
        "tool": "hotent",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "source": source,
        "mode": mode,
        "config": {s: cfg[s] for s in SECTIONS_BY_MODE[mode]},
        "columns": COLUMNS[mode],
        "data_file": os.path.basename(data_path),
        "kernel_backend": kernels.BACKEND,
        "summary": summary,
        "exit_status": status,
        "wall_time_s": time.perf_counter() - start,
    }
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    if guard_hit:
        print("%s (partial output written to %s)" % (summary.get("reason", ""), out), file=stream)
    return status


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, float):
        return _fmt(o)
    raise TypeError(type(o).__name__)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="hotent", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config file or bundled recipe")
    p_run.add_argument("config", help="path to a .cfg file or a bundled recipe name")
    p_run.add_argument("--out", help="output directory (overrides [output] directory)")
    p_run.add_argument("--format", choices=("csv", "jsonl"), help="output format override")
    sub.add_parser("recipes", help="list bundled recipes")
    p_show = sub.add_parser("show", help="print a bundled recipe")
    p_show.add_argument("name")
    p_keys = sub.add_parser("keys", help="list all config keys with defaults")
    p_keys.add_argument("section", nargs="?")
    args = ap.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.out, args.format)
    if args.command == "recipes":
        for name in recipe_names():
            first = recipe_text(name).splitlines()[0].lstrip("# ").strip()
            print("%-6s %s" % (name, first))
        return EXIT_OK
    if args.command == "show":
        try:
            sys.stdout.write(recipe_text(args.name))
        except ConfigError as exc:
            print(exc, file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    if args.command == "keys":
        for section, keys in SCHEMA.items():
            if args.section and section != args.section:
                continue
            print("[%s]" % section)
            for k, (typ, default, doc) in keys.items():
                print("  %-18s %-6s default=%-10s %s" % (k, typ.__name__, default, doc))
        return EXIT_OK
    return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
