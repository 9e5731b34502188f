"""Command-line interface: presets, sweeps, and deterministic file emission.

Parameter precedence is defaults < preset < config file < explicit flags.
Every run writes a manifest.json next to its outputs; passing that manifest
back as --config re-resolves the identical parameters, so re-running a
subcommand from its manifest reproduces the data files byte-for-byte (for
stochastic runs via the recorded seed).

Exit codes: 0 success; 1 bad input; 2 solver did not converge; 3 degenerate
steady state (G = 0); 4 at least one sweep point failed; 5 Monte Carlo hit an
absorbing configuration; 6 a mandatory feasibility check failed; 7 no
crossover root in range.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import CircuitParams, validate
from .crossover import kc_closed, kc_implicit, kc_numeric
from .equilibria import equilibrium_comparison
from .errors import (AbsorbingState, DegenerateSteadyState, FlaggedConstituent,
                     NoCrossoverRoot, NotConverged, PhotonFridgeError)
from .gillespie import sample_steady
from .meanfield import (SolverOptions, adapt_cutoff, staggering_diagnostic,
                        steady_state)
from .model import (_CONFIG_KEYS, PhysicalInputs, default_k_max,
                    dimensionless_from_physical, mode_numbers,
                    read_config_mapping, thermal_energy, thermal_occupations)
from .output import RunManifest, write_csv, write_json, write_manifest
from .presets import load_preset, preset_names
from .teff import teff_range, teff_table

EXIT_BAD_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_DEGENERATE = 3
EXIT_SWEEP_FAILURE = 4
EXIT_ABSORBING = 5
EXIT_VALIDATE_FAILED = 6
EXIT_NO_CROSSOVER = 7

MC_K_MAX_LIMIT = 64

_CIRCUIT_KEYS = {
    "waveguide_impedance_ohm", "waste_impedance_ohm", "josephson_energy_ghz",
    "drive_amplitude", "snail_count", "coupling_capacitance_pf",
    "line_capacitance_pf",
}
_REQUIRED_CIRCUIT_KEYS = {
    "waveguide_impedance_ohm", "waste_impedance_ohm", "josephson_energy_ghz",
    "drive_amplitude", "snail_count",
}

_SWEEP_AXES = ("big_g", "omega_w_over_delta", "support_temperature",
               "t_low_over_t")


def _add_common_flags(parser: argparse.ArgumentParser):
    run = parser.add_argument_group("run")
    run.add_argument("--config", help="TOML/JSON parameter file or a manifest")
    run.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=int, default=None,
                     help="master seed for stochastic runs")
    run.add_argument("--extended-precision", action="store_true",
                     help="evaluate thermal reference sums at 50 digits")
    over = parser.add_argument_group("parameter overrides")
    over.add_argument("--support-temperature-mk", type=float, default=None)
    over.add_argument("--waste-temperature-mk", type=float, default=None)
    over.add_argument("--mode-spacing-mhz", type=float, default=None)
    over.add_argument("--omega-w-over-delta", type=float, default=None)
    over.add_argument("--quality-factor", type=float, default=None)
    over.add_argument("--coupling-g-mhz", type=float, default=None)
    over.add_argument("--waste-decay-mhz", type=float, default=None)
    over.add_argument("--k-max", type=int, default=None)
    over.add_argument("--big-g", type=float, default=None)
    over.add_argument("--waveguide-impedance-ohm", type=float, default=None)
    over.add_argument("--waste-impedance-ohm", type=float, default=None)
    over.add_argument("--josephson-energy-ghz", type=float, default=None)
    over.add_argument("--epsilon", dest="drive_amplitude", type=float,
                      default=None, help="flux drive strength")
    over.add_argument("--snail-count", type=int, default=None)
    over.add_argument("--coupling-capacitance-pf", type=float, default=None)
    over.add_argument("--line-capacitance-pf", type=float, default=None)


def _resolve_params(args):
    """Merge preset, config file, and flag overrides into one mapping."""
    merged = {}
    preset_data = {}
    if args.preset:
        preset_data = load_preset(args.preset)
        merged.update(preset_data["params"])
    if args.config:
        mapping = read_config_mapping(args.config)
        unknown = {k for k in mapping
                   if k not in _CONFIG_KEYS | _CIRCUIT_KEYS}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(mapping)
    for key in sorted(_CONFIG_KEYS | _CIRCUIT_KEYS):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if not merged:
        raise ValueError("no parameters given; use --preset and/or --config")
    return merged, preset_data


def _build_inputs(merged: dict, need_circuit: bool = False):
    phys = {k: v for k, v in merged.items() if k in _CONFIG_KEYS}
    circ = {k: v for k, v in merged.items() if k in _CIRCUIT_KEYS}
    if phys.get("k_max") is not None:
        phys["k_max"] = int(phys["k_max"])
    missing = _REQUIRED_CIRCUIT_KEYS - set(circ)
    if need_circuit and missing:
        raise ValueError(f"validate needs circuit parameters; missing: "
                         f"{sorted(missing)}")
    if not missing:
        if circ.get("snail_count") is not None:
            circ["snail_count"] = int(circ["snail_count"])
        return CircuitParams(**phys, **circ)
    return PhysicalInputs(**phys)


def _resolved_dict(merged: dict, spec) -> dict:
    resolved = dict(merged)
    resolved["k_max"] = spec.k_max
    resolved["big_g"] = spec.big_g
    return resolved


def _manifest(args, subcommand, resolved, settings, outputs, t0):
    manifest = RunManifest(
        subcommand=subcommand,
        version=__version__,
        resolved_params=resolved,
        settings=settings,
        outputs=tuple(str(o) for o in outputs),
        wall_clock_s=time.perf_counter() - t0,
    )
    write_manifest(args.out, manifest)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_steady(args) -> int:
    t0 = time.perf_counter()
    merged, _ = _resolve_params(args)
    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    opts = SolverOptions()
    if inputs.k_max is None:
        spec = adapt_cutoff(spec, opts)
    report = steady_state(spec, opts)
    out = _outdir(args)

    n = report.occupations
    n_th = thermal_occupations(spec)
    k = mode_numbers(spec)
    currents = np.append(report.currents, 0.0)  # zero boundary current
    csv_path = write_csv(
        out / "steady.csv",
        "steady-v1",
        ["k", "n_k", "n_th_k", "E_k", "J_k_kplus1"],
        ((int(k[i]), n[i], n_th[i], k[i] * n[i], currents[i])
         for i in range(spec.k_max)),
    )
    e_th = thermal_energy(spec, extended=args.extended_precision)
    summary = {
        "x": spec.x, "theta": spec.theta, "r": spec.r,
        "big_g": spec.big_g, "k_max": spec.k_max,
        "n_1": float(n[0]),
        "total_number": report.total_number,
        "total_energy": report.total_energy,
        "thermal_energy": e_th,
        "energy_mismatch_rel": abs(report.total_energy - e_th) / e_th,
        "condensate_fraction": report.condensate_fraction,
        "staggering": staggering_diagnostic(n),
        "converged": report.converged,
        "iterations": report.iterations,
        "residual": report.residual,
    }
    json_path = write_json(out / "summary.json", summary)
    _manifest(args, "steady", _resolved_dict(merged, spec),
              {"extended_precision": args.extended_precision},
              [csv_path.name, json_path.name], t0)
    return 0


def _grid_from(args, sweep_defaults: dict) -> np.ndarray:
    if args.values:
        return np.array([float(v) for v in args.values.split(",")])
    if args.grid_start is not None or args.grid_stop is not None:
        if args.grid_start is None or args.grid_stop is None:
            raise ValueError("--grid-start and --grid-stop go together")
        points = args.grid_points or 50
        if args.grid_log:
            return np.geomspace(args.grid_start, args.grid_stop, points)
        return np.linspace(args.grid_start, args.grid_stop, points)
    if "values" in sweep_defaults:
        return np.array([float(v) for v in sweep_defaults["values"]])
    if "grid_start" in sweep_defaults:
        start = float(sweep_defaults["grid_start"])
        stop = float(sweep_defaults["grid_stop"])
        points = int(sweep_defaults["grid_points"])
        if sweep_defaults.get("grid_log", False):
            return np.geomspace(start, stop, points)
        return np.linspace(start, stop, points)
    raise ValueError("no sweep grid: pass --values or --grid-start/stop")


def _spec_variant(base_spec, inputs, axis: str, value: float):
    """One sweep point; support-temperature changes rescale x at fixed theta."""
    if axis == "big_g":
        spec = base_spec.__class__(
            x=base_spec.x, theta=base_spec.theta, r=base_spec.r,
            big_g=value, k_max=base_spec.k_max)
    elif axis == "omega_w_over_delta":
        spec = base_spec.__class__(
            x=base_spec.x, theta=base_spec.theta, r=value,
            big_g=base_spec.big_g, k_max=base_spec.k_max)
    elif axis == "t_low_over_t":
        spec = base_spec.__class__(
            x=base_spec.x, theta=base_spec.theta, r=base_spec.theta / value,
            big_g=base_spec.big_g, k_max=base_spec.k_max)
    elif axis == "support_temperature":
        x = base_spec.x * inputs.support_temperature_mk / value
        k_max = inputs.k_max if inputs.k_max is not None else default_k_max(x)
        spec = base_spec.__class__(
            x=x, theta=base_spec.theta, r=base_spec.r,
            big_g=base_spec.big_g, k_max=k_max)
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    return spec


def _run_condense(args, merged, spec, grid, t0) -> int:
    curve = equilibrium_comparison(spec, grid)
    out = _outdir(args)
    csv_path = write_csv(
        out / "condense.csv",
        "condense-v1",
        ["t_low_over_t", "fraction_energy_constrained",
         "mu_energy_constrained", "fraction_fixed_n", "mu_fixed_n", "n_ph"],
        ((curve.t_grid[i], curve.fraction_energy[i], curve.mu_energy[i],
          curve.fraction_number[i], curve.mu_number[i], curve.n_ph_energy[i])
         for i in range(curve.t_grid.size)),
    )
    summary = {
        "x": curve.x, "k_max": curve.k_max,
        "t_grid_len": int(curve.t_grid.size),
        "max_fraction_energy": float(np.max(curve.fraction_energy)),
    }
    json_path = write_json(out / "summary.json", summary)
    _manifest(args, "condense", _resolved_dict(merged, spec),
              {"axis": "t_low_over_t", "ideal_g0": True,
               "grid": [float(v) for v in grid]},
              [csv_path.name, json_path.name], t0)
    return 0


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    merged, preset_data = _resolve_params(args)
    sweep_defaults = preset_data.get("sweep", {})
    axis = args.axis or sweep_defaults.get("axis")
    if axis not in _SWEEP_AXES:
        raise ValueError(f"--axis must be one of {', '.join(_SWEEP_AXES)}")
    grid = _grid_from(args, sweep_defaults)
    if grid.size == 0 or (grid.size > 1 and not
                          (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0))):
        raise ValueError("sweep grid must be nonempty and strictly monotone")
    ideal = args.ideal_g0 or bool(sweep_defaults.get("ideal_g0", False))

    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    if ideal:
        if axis != "t_low_over_t":
            raise ValueError("--ideal-g0 runs on the t_low_over_t axis")
        ascending = np.sort(np.asarray(grid, dtype=float))
        return _run_condense(args, merged, spec, ascending, t0)

    teff_k = ([int(v) for v in args.teff_k.split(",")] if args.teff_k
              else [int(v) for v in sweep_defaults.get("teff_k", [])])
    opts = SolverOptions()
    occupation_rows = []
    summary_rows = []
    failures = []
    prev = None  # (k_max, occupations) warm start
    for value in grid:
        point = _spec_variant(spec, inputs, axis, float(value))
        init = prev[1] if prev is not None and prev[0] == point.k_max else None
        try:
            report = steady_state(point, opts, init=init)
        except PhotonFridgeError as err:
            failures.append({"axis_value": float(value), "error": str(err)})
            summary_rows.append([axis, float(value)] + [math.nan] * 5
                                + [math.nan] * len(teff_k) + [False])
            prev = None
            continue
        n = report.occupations
        prev = (point.k_max, n)
        n_th = thermal_occupations(point)
        for i in range(point.k_max):
            occupation_rows.append(
                [axis, float(value), i + 1, n[i], n_th[i], (i + 1) * n[i]])
        teff_values = []
        for big_k in teff_k:
            try:
                teff_values.append(teff_range(point, n, big_k))
            except (FlaggedConstituent, ValueError):
                teff_values.append(math.nan)
        summary_rows.append(
            [axis, float(value), float(n[0]), report.total_number,
             report.total_energy, report.condensate_fraction,
             staggering_diagnostic(n)] + teff_values + [True])

    out = _outdir(args)
    occ_path = write_csv(
        out / "sweep_occupations.csv", "sweep-occupations-v1",
        ["axis", "axis_value", "k", "n_k", "n_th_k", "E_k"],
        occupation_rows)
    summary_header = (["axis", "axis_value", "n_1", "n_ph", "e_ph",
                       "condensate_fraction", "staggering"]
                      + [f"teff_over_t_K{k}" for k in teff_k] + ["converged"])
    sum_path = write_csv(out / "sweep_summary.csv", "sweep-summary-v1",
                         summary_header, summary_rows)
    json_path = write_json(out / "summary.json", {
        "axis": axis, "points": int(grid.size),
        "failed_points": failures,
    })
    _manifest(args, "sweep", _resolved_dict(merged, spec),
              {"axis": axis, "grid": [float(v) for v in grid],
               "teff_k": teff_k, "ideal_g0": False},
              [occ_path.name, sum_path.name, json_path.name], t0)
    return EXIT_SWEEP_FAILURE if failures else 0


def cmd_condense(args) -> int:
    t0 = time.perf_counter()
    merged, preset_data = _resolve_params(args)
    sweep_defaults = preset_data.get("sweep", {})
    grid = np.sort(np.asarray(_grid_from(args, sweep_defaults), dtype=float))
    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    return _run_condense(args, merged, spec, grid, t0)


def cmd_teff(args) -> int:
    t0 = time.perf_counter()
    merged, preset_data = _resolve_params(args)
    teff_defaults = preset_data.get("teff", {})
    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    opts = SolverOptions()
    if inputs.k_max is None:
        spec = adapt_cutoff(spec, opts)
    report = steady_state(spec, opts)
    n = report.occupations

    k_limit = args.k_limit or teff_defaults.get("k_limit") or min(
        spec.k_max - 1, 64)
    k_limit = min(int(k_limit), spec.k_max - 1)
    table = teff_table(spec, n, k_limit=k_limit)
    out = _outdir(args)
    csv_path = write_csv(
        out / "teff.csv", "teff-v1",
        ["k", "omega_over_delta", "teff_over_t", "inversion_flag"],
        ((k, float(k), float(table.per_k[k - 1]), table.flags[k - 1])
         for k in range(1, k_limit + 1)),
    )
    spectral_k = ([int(v) for v in args.teff_k.split(",")] if args.teff_k
                  else [int(v) for v in teff_defaults.get("spectral_k",
                                                          [2, 5, 15])])
    averages = {}
    for big_k in spectral_k:
        if not 1 <= big_k <= k_limit:
            averages[str(big_k)] = None
            continue
        try:
            averages[str(big_k)] = table.spectral_average(big_k)
        except FlaggedConstituent as err:
            averages[str(big_k)] = {"flagged_k": err.k, "value": None}
    summary = {
        "x": spec.x, "theta": spec.theta, "r": spec.r, "big_g": spec.big_g,
        "k_max": spec.k_max,
        "t_low_over_t": spec.t_low_over_t,
        "support_temperature_mk": inputs.support_temperature_mk,
        "teff_over_t_at_K": averages,
    }
    json_path = write_json(out / "summary.json", summary)
    _manifest(args, "teff", _resolved_dict(merged, spec),
              {"k_limit": k_limit, "spectral_k": spectral_k},
              [csv_path.name, json_path.name], t0)
    return 0


def cmd_mc(args) -> int:
    t0 = time.perf_counter()
    merged, preset_data = _resolve_params(args)
    mc_defaults = preset_data.get("mc", {})
    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    if spec.k_max > MC_K_MAX_LIMIT:
        raise ValueError(
            f"stochastic runs are limited to k_max <= {MC_K_MAX_LIMIT} "
            f"(got {spec.k_max}); set k_max explicitly")

    trajectories = args.trajectories or int(mc_defaults.get("trajectories", 16))
    burn_in = args.burn_in if args.burn_in is not None else \
        mc_defaults.get("burn_in")
    interval = args.interval if args.interval is not None else \
        float(mc_defaults.get("sample_interval", 1.0))
    samples = args.samples or int(mc_defaults.get("samples_per_trajectory", 100))
    seed = args.seed if args.seed is not None else int(mc_defaults.get("seed", 1))

    estimate = sample_steady(
        spec, trajectories,
        burn_in_time=float(burn_in) if burn_in is not None else None,
        sample_interval=interval,
        samples_per_trajectory=samples,
        master_seed=seed,
        threads=args.threads,
        hist_cap=args.hist_cap,
    )
    mf = steady_state(spec)
    diff = estimate.mean_occupations - mf.occupations
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(estimate.stderr_occupations > 0,
                     diff / estimate.stderr_occupations, np.inf)

    out = _outdir(args)
    csv_path = write_csv(
        out / "mc.csv", "mc-v1",
        ["k", "mc_mean", "mc_stderr", "mf_n_k", "z", "g2", "g2_stderr"],
        ((i + 1, estimate.mean_occupations[i], estimate.stderr_occupations[i],
          mf.occupations[i], float(z[i]), estimate.g2[i],
          estimate.g2_stderr[i]) for i in range(spec.k_max)),
    )
    hist_path = write_json(out / "histograms.json", {
        "hist_cap": estimate.histograms.shape[1],
        "masses": estimate.histograms,
    })
    summary = {
        "sample_count": estimate.sample_count,
        "master_seed": estimate.master_seed,
        "trajectories": trajectories,
        "burn_in": float(burn_in) if burn_in is not None else 20.0 / spec.big_g,
        "sample_interval": interval,
        "max_abs_z": float(np.nanmax(np.abs(z))),
    }
    json_path = write_json(out / "summary.json", summary)
    _manifest(args, "mc", _resolved_dict(merged, spec),
              {"trajectories": trajectories, "seed": seed,
               "burn_in": summary["burn_in"], "sample_interval": interval,
               "samples_per_trajectory": samples,
               "hist_cap": args.hist_cap},
              [csv_path.name, hist_path.name, json_path.name], t0)
    return 0


def cmd_crossover(args) -> int:
    t0 = time.perf_counter()
    merged, _ = _resolve_params(args)
    inputs = _build_inputs(merged)
    spec = dimensionless_from_physical(inputs)
    values = {}
    notes = {}
    for name, fn in (("kc_implicit", kc_implicit), ("kc_closed", kc_closed),
                     ("kc_numeric", kc_numeric)):
        try:
            values[name] = fn(spec)
        except (NoCrossoverRoot, PhotonFridgeError, ValueError) as err:
            values[name] = None
            notes[name] = str(err)
    out = _outdir(args)
    payload = {
        "x": spec.x, "theta": spec.theta, "r": spec.r, "big_g": spec.big_g,
        "k_max": spec.k_max, **values,
    }
    if notes:
        payload["notes"] = notes
    json_path = write_json(out / "crossover.json", payload)
    _manifest(args, "crossover", _resolved_dict(merged, spec), {},
              [json_path.name], t0)
    if any(v is None for v in values.values()):
        print("crossover: no root in range for at least one method",
              file=sys.stderr)
        return EXIT_NO_CROSSOVER
    return 0


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    merged, _ = _resolve_params(args)
    params = _build_inputs(merged, need_circuit=True)
    report = validate(params, target_n1=args.target_n1, n_ph=args.n_ph)
    for line in report.lines():
        print(line)
    out = _outdir(args)
    payload = {
        "phase_zpf_waveguide": report.phase_zpf_waveguide,
        "phase_zpf_waste": report.phase_zpf_waste,
        "coupling_g_rad_per_s": report.coupling_g,
        "coupling_g_mhz": report.coupling_g / (2.0 * math.pi * 1e6),
        "big_g_derived": report.big_g_derived,
        "n_ph": report.n_ph,
        "target_n1": report.target_n1,
        "shifts_rad_per_s": {
            "self_kerr": report.shifts.self_kerr,
            "waveguide_cross_kerr": report.shifts.waveguide_cross_kerr,
            "waste_cross_kerr": report.shifts.waste_cross_kerr,
            "lamb": report.shifts.lamb,
            "total": report.shifts.total,
        },
        "checks": [
            {"name": c.name, "inequality": c.inequality, "value": c.value,
             "threshold": c.threshold, "margin": c.margin,
             "passed": c.passed, "advisory": c.advisory, "note": c.note}
            for c in report.checks
        ],
        "passed": report.passed,
    }
    json_path = write_json(out / "validate.json", payload)
    _manifest(args, "validate", dict(merged), {}, [json_path.name], t0)
    return 0 if report.passed else EXIT_VALIDATE_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonfridge",
        description="Steady states of a 1D photon gas under engineered "
                    "number-conserving cooling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_steady = sub.add_parser("steady", help="solve one steady state")
    _add_common_flags(p_steady)
    p_steady.set_defaults(func=cmd_steady)

    p_sweep = sub.add_parser("sweep", help="solve along a parameter grid")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--axis", choices=_SWEEP_AXES, default=None)
    p_sweep.add_argument("--values", help="comma-separated grid values")
    p_sweep.add_argument("--grid-start", type=float, default=None)
    p_sweep.add_argument("--grid-stop", type=float, default=None)
    p_sweep.add_argument("--grid-points", type=int, default=None)
    p_sweep.add_argument("--grid-log", action="store_true")
    p_sweep.add_argument("--teff-k", help="comma-separated spectral ranges")
    p_sweep.add_argument("--ideal-g0", action="store_true",
                         help="idealized G=0+ engineered equilibria instead "
                              "of finite-G solves")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cond = sub.add_parser(
        "condense", help="condensation curves in the idealized G=0+ limit "
                         "(sweep --ideal-g0)")
    _add_common_flags(p_cond)
    p_cond.add_argument("--values", help="comma-separated t_low/T values")
    p_cond.add_argument("--grid-start", type=float, default=None)
    p_cond.add_argument("--grid-stop", type=float, default=None)
    p_cond.add_argument("--grid-points", type=int, default=None)
    p_cond.add_argument("--grid-log", action="store_true")
    p_cond.set_defaults(func=cmd_condense)

    p_teff = sub.add_parser("teff", help="effective-temperature table")
    _add_common_flags(p_teff)
    p_teff.add_argument("--k-limit", type=int, default=None)
    p_teff.add_argument("--teff-k", help="comma-separated spectral ranges")
    p_teff.set_defaults(func=cmd_teff)

    p_mc = sub.add_parser("mc", help="Monte Carlo sampling (small systems)")
    _add_common_flags(p_mc)
    p_mc.add_argument("--trajectories", type=int, default=None)
    p_mc.add_argument("--burn-in", type=float, default=None)
    p_mc.add_argument("--interval", type=float, default=None)
    p_mc.add_argument("--samples", type=int, default=None)
    p_mc.add_argument("--hist-cap", type=int, default=512)
    p_mc.set_defaults(func=cmd_mc)

    p_cross = sub.add_parser("crossover", help="cooled-mode-number estimates")
    _add_common_flags(p_cross)
    p_cross.set_defaults(func=cmd_crossover)

    p_val = sub.add_parser("validate", help="circuit feasibility checks")
    _add_common_flags(p_val)
    p_val.add_argument("--target-n1", type=float, default=None)
    p_val.add_argument("--n-ph", type=float, default=None)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except DegenerateSteadyState as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except AbsorbingState as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ABSORBING
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
