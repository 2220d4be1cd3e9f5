"""Command-line front end.

Subcommands: ``dns``, ``scan-alpha``, ``scan-height``, ``optimize``,
``bound``, ``simulate``, ``presets``, ``overlay-merge``.  Every report
path writes delimited output (CSV + JSON metadata) and, unless
``--no-plot`` is given, a static figure next to it.

Exit codes: 0 success, 1 usage or input error, 2 numerical-convergence
failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, bounds, optimizer, plots, serialize
from .constants import DEFAULT_CONSTANTS, CslParams
from .geometry import (HalfCylinder, HomogeneousDisk, InvalidGeometryError,
                       PeriodicAnnulus, SectorRing, TwoAnnuli,
                       moment_of_inertia)
from .kernel import QuadratureConvergenceError, SeriesConvergenceError
from .langevin import TrajectoryConfig, estimate_psd, simulate, validate_spectrum
from .presets import PRESETS, get_preset, preset_names
from .spectrum import (NoiseBudget, axial_factor_y, angular_psd,
                       csl_torque_dns, radial_factor_p, thermal_torque_dns)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

_OUT_ENV = "CSLROT_OUT"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# config files
# ----------------------------------------------------------------------

_GEOMETRY_KEYS = {
    "preset", "kind", "rho", "delta_rho", "r_inner", "r_outer", "n_sectors",
    "alpha", "height", "radius", "r_core", "r_outer_total",
    "ring_inner_r", "ring_inner_R", "ring_inner_n",
    "ring_outer_r", "ring_outer_R", "ring_outer_n",
}
_CSL_KEYS = {"rc_list", "rc_min", "rc_max", "points_per_decade",
             "lambda_ref", "omega_c"}
_NOISE_KEYS = {"temperature", "gamma", "inertia", "omega0", "s_th_override"}
_RUN_KEYS = {"output_dir", "tolerance", "plot", "seed"}


@dataclass
class RunConfig:
    """Parsed configuration: geometry source, parameter grid, noise, run."""

    geometry_preset: str | None = None
    geometry_inline: dict | None = None
    rc_list: list[float] | None = None
    rc_min: float | None = None
    rc_max: float | None = None
    points_per_decade: int = 25
    lambda_ref: float = 1.0
    omega_c: float | None = None
    noise: dict = field(default_factory=dict)
    output_dir: str = "."
    tolerance: float = 1e-6
    plot: bool = True
    seed: int = 0

    def build_model(self):
        if (self.geometry_preset is None) == (self.geometry_inline is None):
            raise ValueError("exactly one geometry source required "
                             "(preset or inline parameters)")
        if self.geometry_preset is not None:
            return get_preset(self.geometry_preset).model
        return _inline_model(self.geometry_inline)

    def rc_grid(self):
        if self.rc_list is not None:
            return np.asarray(sorted(self.rc_list), dtype=float)
        if self.rc_min is not None and self.rc_max is not None:
            return bounds.default_rc_grid(self.rc_min, self.rc_max,
                                          self.points_per_decade)
        return bounds.default_rc_grid()

    def to_ini(self) -> str:
        lines = ["[geometry]"]
        if self.geometry_preset is not None:
            lines.append(f"preset = {self.geometry_preset}")
        else:
            for k, v in self.geometry_inline.items():
                lines.append(f"{k} = {serialize.fmt(v)}")
        lines.append("")
        lines.append("[csl]")
        if self.rc_list is not None:
            lines.append("rc_list = " + ",".join(serialize.fmt(v)
                                                 for v in self.rc_list))
        if self.rc_min is not None:
            lines.append(f"rc_min = {serialize.fmt(self.rc_min)}")
        if self.rc_max is not None:
            lines.append(f"rc_max = {serialize.fmt(self.rc_max)}")
        lines.append(f"points_per_decade = {self.points_per_decade}")
        lines.append(f"lambda_ref = {serialize.fmt(self.lambda_ref)}")
        if self.omega_c is not None:
            lines.append(f"omega_c = {serialize.fmt(self.omega_c)}")
        lines.append("")
        lines.append("[noise]")
        for k, v in self.noise.items():
            lines.append(f"{k} = {serialize.fmt(v)}")
        lines.append("")
        lines.append("[run]")
        lines.append(f"output_dir = {self.output_dir}")
        lines.append(f"tolerance = {serialize.fmt(self.tolerance)}")
        lines.append(f"plot = {str(self.plot).lower()}")
        lines.append(f"seed = {self.seed}")
        lines.append("")
        return "\n".join(lines)


def _inline_model(params: dict):
    kind = params.get("kind")
    if kind == "periodic_annulus":
        return PeriodicAnnulus(
            rho=params["rho"], delta_rho=params["delta_rho"],
            r_inner=params["r_inner"], r_outer=params["r_outer"],
            n_sectors=int(params["n_sectors"]), alpha=params["alpha"],
            height=params["height"])
    if kind == "homogeneous_disk":
        return HomogeneousDisk(rho=params["rho"], r_outer=params["r_outer"],
                               height=params["height"])
    if kind == "half_cylinder":
        return HalfCylinder(rho=params["rho"], delta_rho=params["delta_rho"],
                            radius=params["radius"], height=params["height"])
    if kind == "two_annuli":
        return TwoAnnuli(
            rho=params["rho"], delta_rho=params["delta_rho"],
            r_core=params["r_core"], r_outer_total=params["r_outer_total"],
            ring_inner=SectorRing(params["ring_inner_r"],
                                  params["ring_inner_R"],
                                  int(params["ring_inner_n"])),
            ring_outer=SectorRing(params["ring_outer_r"],
                                  params["ring_outer_R"],
                                  int(params["ring_outer_n"])),
            height=params["height"])
    raise ValueError(f"unknown geometry kind {kind!r}")


def _parse_float(section, key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"[{section}] {key}: not a bare SI number: {raw!r} "
                         "(unit suffixes are rejected)") from None


def parse_config(path) -> RunConfig:
    """Parse a line-oriented ``key = value`` config with fixed sections.

    Sections: [geometry], [csl], [noise], [run].  Unknown sections or
    keys and duplicate keys are errors; numbers are bare SI values.
    """
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    cfg = RunConfig()
    allowed = {"geometry": _GEOMETRY_KEYS, "csl": _CSL_KEYS,
               "noise": _NOISE_KEYS, "run": _RUN_KEYS}
    for section in cp.sections():
        if section not in allowed:
            raise ValueError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in allowed[section]:
                raise ValueError(f"unknown key {key!r} in [{section}]")
    geo = dict(cp["geometry"]) if cp.has_section("geometry") else {}
    if "preset" in geo:
        if len(geo) > 1:
            raise ValueError("[geometry] preset excludes inline parameters")
        cfg.geometry_preset = geo["preset"]
    elif geo:
        inline = {}
        for k, v in geo.items():
            if k == "kind":
                inline[k] = v
            elif k.endswith("_n") or k == "n_sectors":
                inline[k] = int(_parse_float("geometry", k, v))
            else:
                inline[k] = _parse_float("geometry", k, v)
        cfg.geometry_inline = inline
    if cp.has_section("csl"):
        sec = cp["csl"]
        if "rc_list" in sec:
            cfg.rc_list = [_parse_float("csl", "rc_list", tok)
                           for tok in sec["rc_list"].split(",") if tok.strip()]
        if "rc_min" in sec:
            cfg.rc_min = _parse_float("csl", "rc_min", sec["rc_min"])
        if "rc_max" in sec:
            cfg.rc_max = _parse_float("csl", "rc_max", sec["rc_max"])
        if "points_per_decade" in sec:
            cfg.points_per_decade = int(_parse_float(
                "csl", "points_per_decade", sec["points_per_decade"]))
        if "lambda_ref" in sec:
            cfg.lambda_ref = _parse_float("csl", "lambda_ref",
                                          sec["lambda_ref"])
        if "omega_c" in sec:
            cfg.omega_c = _parse_float("csl", "omega_c", sec["omega_c"])
    if cp.has_section("noise"):
        cfg.noise = {k: _parse_float("noise", k, v)
                     for k, v in cp["noise"].items()}
    if cp.has_section("run"):
        sec = cp["run"]
        cfg.output_dir = sec.get("output_dir", cfg.output_dir)
        if "tolerance" in sec:
            cfg.tolerance = _parse_float("run", "tolerance", sec["tolerance"])
        if "plot" in sec:
            cfg.plot = sec.getboolean("plot")
        if "seed" in sec:
            cfg.seed = int(_parse_float("run", "seed", sec["seed"]))
    return cfg


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(_OUT_ENV, "cslrot-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _budget_from_args(args, model=None) -> NoiseBudget:
    if getattr(args, "preset", None):
        pre = get_preset(args.preset)
        if pre.budget is not None:
            b = pre.budget
            return NoiseBudget(
                temperature=args.temperature or b.temperature,
                gamma=args.gamma or b.gamma,
                inertia=args.inertia or b.inertia,
                omega0=args.omega0 or b.omega0,
                s_th_override=(args.s_th if args.s_th is not None
                               else b.s_th_override))
    missing = [k for k in ("temperature", "gamma", "inertia", "omega0")
               if getattr(args, k) is None]
    if missing:
        raise _UsageError("noise budget incomplete: provide --" +
                          ", --".join(m.replace('_', '-') for m in missing)
                          + " or a preset with a budget")
    return NoiseBudget(temperature=args.temperature, gamma=args.gamma,
                       inertia=args.inertia, omega0=args.omega0,
                       s_th_override=args.s_th)


def _parse_range(text, name):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except Exception:
        raise _UsageError(f"--{name} expects LO:HI, got {text!r}") from None


def _model_and_id(args):
    if args.config:
        cfg = parse_config(args.config)
        model = cfg.build_model()
        gid = cfg.geometry_preset or cfg.geometry_inline.get("kind", "inline")
        return model, gid, cfg
    if args.preset:
        return get_preset(args.preset).model, args.preset, None
    raise _UsageError("provide --preset or --config")


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _cmd_presets(args):
    print(f"{'name':24s} {'inertia [kg m^2]':>18s}  description")
    for name in preset_names():
        pre = PRESETS[name]
        print(f"{name:24s} {pre.inertia:>18.6e}  {pre.description}")
        if pre.notes:
            print(f"{'':24s} {'':18s}  note: {pre.notes}")
    return EXIT_OK


def _cmd_dns(args):
    model, gid, cfg = _model_and_id(args)
    out = _out_dir(args)
    tol = args.tol
    if args.rc:
        rcs = np.asarray(sorted(args.rc), dtype=float)
    elif cfg is not None:
        rcs = cfg.rc_grid()
    else:
        raise _UsageError("provide --rc (repeatable) or a config grid")
    rows = []
    for rc in rcs:
        res = csl_torque_dns(model, CslParams(args.lam, rc), tol=tol,
                             method=args.method)
        rows.append([rc, res.p_factor, res.y_factor, res.s_csl, res.eta])
    meta = serialize.metadata_block(geometry=gid, lambda_ref=args.lam,
                                    tolerance=tol, method=args.method)
    csv_path = serialize.write_csv(
        out / "dns.csv", ["rc_m", "p_factor", "y_factor",
                          "s_csl_N2m2s", "eta_rad-2_s-1"], rows, meta)
    serialize.write_json(out / "dns.json",
                         {"rows": [dict(zip(["rc_m", "p_factor", "y_factor",
                                             "s_csl", "eta"], r))
                                   for r in rows]}, meta)
    print(f"dns: {len(rows)} point(s) -> {csv_path}")
    if args.plot and len(rows) > 1:
        fig = plots.plot_dns([r[0] for r in rows], [r[3] for r in rows],
                             out / "dns.svg", title=f"collapse DNS ({gid})")
        print(f"dns: figure -> {fig}")
    return EXIT_OK


def _cmd_scan_alpha(args):
    out = _out_dir(args)
    scan = optimizer.scan_alpha(
        n=args.n, epsilon=args.epsilon, i_fixed=args.inertia, h=args.h,
        rc=args.rc, rho=args.rho, delta_rho=args.delta_rho, grid=args.grid,
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max, spacing=args.spacing, tol=args.tol)
    path = _write_scan(scan, out, "scan_alpha", args)
    print(f"scan-alpha: argmax alpha = {scan.argmax():.6e} rad "
          f"(objective {scan.max_objective():.6e}) -> {path}")
    return EXIT_OK


def _cmd_scan_height(args):
    out = _out_dir(args)
    grid = np.logspace(math.log10(args.h_min), math.log10(args.h_max),
                       args.grid)
    scan = optimizer.scan_height(
        n=args.n, epsilon=args.epsilon, i_fixed=args.inertia,
        alpha=args.alpha, rc=args.rc, rho=args.rho,
        delta_rho=args.delta_rho, h_grid=grid, tol=args.tol)
    path = _write_scan(scan, out, "scan_height", args)
    print(f"scan-height: argmax h = {scan.argmax():.6e} m "
          f"(objective {scan.max_objective():.6e}) -> {path}")
    return EXIT_OK


def _write_scan(scan, out, stem, args):
    meta = serialize.metadata_block(**scan.fixed)
    rows = [[a, o, r, f] for a, o, r, f in
            zip(scan.axis, scan.objective, scan.r_solved, scan.flags)]
    path = serialize.write_csv(out / f"{stem}.csv",
                               ["axis", "objective", "r_solved", "flags"],
                               rows, meta)
    serialize.write_json(out / f"{stem}.json",
                         {"axis_name": scan.axis_name,
                          "axis": scan.axis, "objective": scan.objective,
                          "r_solved": scan.r_solved, "flags": scan.flags},
                         meta)
    if args.plot:
        plots.plot_scan(scan, out / f"{stem}.svg",
                        logx=(getattr(args, "spacing", "log") == "log"
                              or stem == "scan_height"))
    return path


def _cmd_optimize(args):
    out = _out_dir(args)
    result = optimizer.optimize_geometry(
        objective=args.objective.replace("-", "_"),
        n_values=[int(tok) for tok in args.n_values.split(",")],
        alpha_range=_parse_range(args.alpha_range, "alpha-range"),
        h_range=_parse_range(args.h_range, "h-range"),
        epsilon_values=[float(tok) for tok in args.epsilon_values.split(",")],
        i_fixed=args.inertia, rc=args.rc, rho=args.rho,
        delta_rho=args.delta_rho, budget=args.budget, s_th=args.s_th)
    meta = serialize.metadata_block(objective=args.objective, rc=args.rc,
                                    inertia=args.inertia,
                                    evaluations=result.evaluations)
    serialize.write_json(out / "optimize.json",
                         {"best_params": result.best_params,
                          "best_objective": result.best_objective,
                          "trace": result.trace}, meta)
    rows = [[t["alpha"], t["value"], t["r"],
             f"n={t['n']};eps={t['epsilon']};h={serialize.fmt(t['h'])}"]
            for t in result.trace]
    serialize.write_csv(out / "optimize_trace.csv",
                        ["axis", "objective", "r_solved", "flags"],
                        rows, meta)
    bp = result.best_params
    print(f"optimize: best n={bp['n']} eps={bp['epsilon']} "
          f"alpha={bp['alpha']:.6e} h={bp['h']:.6e} "
          f"objective={result.best_objective:.6e} "
          f"({result.evaluations} evaluations) -> {out/'optimize.json'}")
    return EXIT_OK


def _floor_for_bound(args, model):
    """Noise floor for the bound: preset budget, explicit, or rescaled."""
    if args.floor_from:
        src = get_preset(args.floor_from)
        if src.budget is None or src.budget.s_th_override is None:
            raise _UsageError(f"preset {args.floor_from!r} carries no floor")
        s_th = src.budget.s_th_override
        i_ratio = moment_of_inertia(model) / src.inertia
        t_ratio = (args.rescale_temperature / src.budget.temperature
                   if args.rescale_temperature else 1.0)
        s_th = bounds.rescale_thermal(s_th, i_ratio, t_ratio)
        return NoiseBudget(temperature=args.rescale_temperature
                           or src.budget.temperature,
                           gamma=src.budget.gamma,
                           inertia=moment_of_inertia(model),
                           omega0=src.budget.omega0,
                           s_th_override=s_th)
    if args.s_th is not None:
        return NoiseBudget(temperature=args.temperature or 300.0,
                           gamma=args.gamma or 1.0,
                           inertia=moment_of_inertia(model),
                           omega0=args.omega0 or 1.0,
                           s_th_override=args.s_th)
    if args.preset:
        pre = get_preset(args.preset)
        if pre.budget is not None:
            return pre.budget
    raise _UsageError("provide a floor: --s-th, --floor-from PRESET, or a "
                      "preset with a published floor")


def _cmd_bound(args):
    model, gid, cfg = _model_and_id(args)
    out = _out_dir(args)
    if args.rc_decades:
        lo, hi = _parse_range(args.rc_decades, "rc-decades")
        grid = bounds.default_rc_grid(lo, hi, args.points_per_decade)
    elif cfg is not None:
        grid = cfg.rc_grid()
    else:
        grid = bounds.default_rc_grid()
    floor = _floor_for_bound(args, model)
    if args.workers > 1:
        chunks = np.array_split(grid, args.workers)
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            parts = list(pool.map(
                lambda g: bounds.bound_curve(model, g, floor, tol=args.tol,
                                             geometry_id=gid,
                                             method=args.method),
                [c for c in chunks if c.size]))
        points = [p for part in parts for p in part.points]
        points.sort(key=lambda p: p.rc)
        curve = bounds.BoundCurve(points=points, geometry_id=gid,
                                  s_th=parts[0].s_th,
                                  metadata=parts[0].metadata)
    else:
        curve = bounds.bound_curve(model, grid, floor, tol=args.tol,
                                   geometry_id=gid, method=args.method,
                                   oracle_spot_checks=args.oracle_checks)
    if args.omega_c:
        band = tuple(2.0 * math.pi * f for f in bounds.ANALYSIS_BAND_HZ)
        curve = bounds.colored_bound_adjustment(curve, args.omega_c, band)
    minima = curve.local_minima()
    meta = serialize.metadata_block(geometry=gid,
                                    n_local_minima=len(minima),
                                    **curve.metadata)
    csv_path = out / "bound.csv"
    curve.write_csv(csv_path,
                    metadata_lines=[f"{k} = {v}" for k, v in meta.items()])
    serialize.write_json(out / "bound.json",
                         {"rc_m": curve.rc_values(),
                          "lambda_max": ["unbounded" if p.unbounded
                                         else p.lambda_max
                                         for p in curve.points],
                          "local_minima_rc": [curve.points[i].rc
                                              for i in minima]}, meta)
    overlays = []
    for ov_path in args.overlay or []:
        overlays.extend(bounds.ingest_overlay(ov_path))
    lam = curve.lambda_values()
    finite = lam[np.isfinite(lam)]
    summary = (f"bound: {len(curve.points)} points, "
               f"{len(minima)} local minima")
    if finite.size:
        summary += f", min lambda_max = {finite.min():.3e} s^-1"
    print(summary + f" -> {csv_path}")
    if args.plot:
        fig = plots.plot_bound_curve(curve, out / "bound.svg",
                                     overlays=overlays,
                                     title=f"exclusion bound ({gid})")
        print(f"bound: figure -> {fig}")
    return EXIT_OK


def _cmd_simulate(args):
    out = _out_dir(args)
    budget = _budget_from_args(args)
    s_csl = args.s_csl
    if s_csl is None and args.lam is not None and args.rc is not None:
        model, gid, _ = _model_and_id(args)
        s_csl = csl_torque_dns(model, CslParams(args.lam, args.rc),
                               tol=args.tol).s_csl
    if s_csl is None:
        s_csl = 0.0
    cfg = TrajectoryConfig(dt=args.dt, duration=args.duration,
                           seed=args.seed, n_trajectories=args.trajectories,
                           burn_in=args.burn_in)
    if args.validate:
        band = _parse_range(args.band, "band")
        band = (2.0 * math.pi * band[0], 2.0 * math.pi * band[1])
        report = validate_spectrum(budget, s_csl, cfg, band,
                                   segment_length=args.segment_length)
        meta = serialize.metadata_block(**report.metadata)
        rows = list(zip(report.frequencies, report.estimate, report.model,
                        report.z_scores))
        serialize.write_csv(out / "psd_validation.csv",
                            ["omega_rad_s", "psd_estimate", "psd_model",
                             "z_score"], rows, meta)
        serialize.write_json(
            out / "psd_validation.json",
            {"passed": report.passed,
             "fraction_within_3se": report.fraction_within,
             "theta_var_measured": report.theta_var_measured,
             "theta_var_expected": report.theta_var_expected,
             "theta_var_z": report.theta_var_z}, meta)
        print(f"simulate: validation {'PASS' if report.passed else 'FAIL'} "
              f"({report.fraction_within:.1%} of bins within 3 SE, "
              f"variance z = {report.theta_var_z:+.2f}) "
              f"-> {out/'psd_validation.csv'}")
        if args.plot:
            est = estimate_psd(simulate(budget, s_csl, cfg).theta, cfg.dt,
                               args.segment_length or 1 << 13)
            model_vals = angular_psd(est.frequencies, budget,
                                     thermal_torque_dns(budget) + s_csl)
            plots.plot_psd(est, out / "psd_validation.svg", model=model_vals,
                           band=band, title="angle PSD vs analytic")
        return EXIT_OK if report.passed else EXIT_NUMERICAL
    sim = simulate(budget, s_csl, cfg)
    meta = serialize.metadata_block(**sim.metadata)
    rows = list(zip(sim.times, sim.theta[0], sim.momentum[0]))
    traj_path = serialize.write_csv(out / "trajectory.csv",
                                    ["t_s", "theta_rad", "L_kg_m2_s"],
                                    rows, meta)
    seg = args.segment_length or max(256, 1 << int(math.log2(
        max(len(sim.times) // 4, 4))))
    est = estimate_psd(sim.theta, cfg.dt, seg)
    serialize.write_csv(out / "psd.csv", ["omega_rad_s", "psd", "stderr"],
                        list(zip(est.frequencies, est.values, est.stderr)),
                        serialize.metadata_block(**est.metadata))
    serialize.write_json(out / "simulate.json",
                         {"theta_variance": float(sim.theta.var()),
                          "n_samples": int(sim.theta.shape[1])}, meta)
    print(f"simulate: {args.trajectories} trajectories x "
          f"{sim.theta.shape[1]} steps -> {traj_path}")
    if args.plot:
        model_vals = angular_psd(est.frequencies, budget,
                                 thermal_torque_dns(budget) + s_csl)
        plots.plot_psd(est, out / "psd.svg", model=model_vals,
                       title="simulated angle PSD")
    return EXIT_OK


def _cmd_overlay_merge(args):
    out = _out_dir(args)
    curves = []
    for path in args.inputs:
        curves.extend(bounds.ingest_overlay(path))
    rows = []
    for c in curves:
        for rc, lam in zip(c.rc, c.lam):
            rows.append([c.label, rc, lam])
    meta = serialize.metadata_block(n_curves=len(curves),
                                    sources=",".join(args.inputs))
    path = serialize.write_csv(out / "overlay_merged.csv",
                               ["label", "rc_m", "lambda_s^-1"], rows, meta)
    print(f"overlay-merge: {len(curves)} curve(s), {len(rows)} rows -> {path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# argument wiring
# ----------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", help="output directory (default $CSLROT_OUT "
                   "or ./cslrot-out)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="relative tolerance of the radial integrals")
    p.add_argument("--no-plot", dest="plot", action="store_false",
                   help="skip figure rendering")
    p.add_argument("--method", choices=["series", "quadrature"],
                   default="series", help="radial-factor evaluation route")


def _add_geometry_source(p):
    p.add_argument("--preset", choices=preset_names(), help="embedded preset")
    p.add_argument("--config", help="config file (see parse_config)")


def build_parser() -> _Parser:
    parser = _Parser(prog="cslrot",
                     description="rotational collapse-noise spectra, "
                                 "bounds and geometry optimisation")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("presets", help="list embedded presets")
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("dns", help="collapse torque spectrum at given rc")
    _add_geometry_source(p)
    _add_common(p)
    p.add_argument("--rc", type=float, action="append",
                   help="correlation length in m (repeatable)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="reference collapse rate in 1/s (spectra scale "
                        "linearly)")
    p.set_defaults(func=_cmd_dns)

    p = sub.add_parser("scan-alpha", help="sector-angle scan at fixed inertia")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--inertia", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--rc", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.2e3)
    p.add_argument("--delta-rho", type=float, default=19.3e3)
    p.add_argument("--grid", type=int, default=48)
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=None)
    p.set_defaults(func=_cmd_scan_alpha)

    p = sub.add_parser("scan-height", help="height scan of P*Y at fixed "
                                           "inertia")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--inertia", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rc", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.2e3)
    p.add_argument("--delta-rho", type=float, default=19.3e3)
    p.add_argument("--h-min", type=float, default=1e-4)
    p.add_argument("--h-max", type=float, default=1e-2)
    p.add_argument("--grid", type=int, default=25)
    p.set_defaults(func=_cmd_scan_height)

    p = sub.add_parser("optimize", help="search (n, epsilon, alpha, h) at "
                                        "fixed inertia")
    _add_common(p)
    p.add_argument("--objective", choices=["p", "py", "inverse-lambda"],
                   default="py")
    p.add_argument("--n-values", default="4,10,20,100")
    p.add_argument("--epsilon-values", default="2,20")
    p.add_argument("--alpha-range", default="1e-6:1.5")
    p.add_argument("--h-range", default="1e-4:1e-2")
    p.add_argument("--rc", type=float, required=True)
    p.add_argument("--inertia", type=float, default=9e-6)
    p.add_argument("--rho", type=float, default=1.2e3)
    p.add_argument("--delta-rho", type=float, default=19.3e3)
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--s-th", type=float, default=None,
                   help="floor for the inverse-lambda objective")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("bound", help="exclusion curve lambda_max(rc)")
    _add_geometry_source(p)
    _add_common(p)
    p.add_argument("--rc-decades", help="grid span LO:HI in m")
    p.add_argument("--points-per-decade", type=int, default=25)
    p.add_argument("--s-th", type=float, help="explicit floor, N^2 m^2 s")
    p.add_argument("--floor-from", choices=preset_names(),
                   help="take the floor from this preset, rescaled by the "
                        "inertia ratio (and --rescale-temperature)")
    p.add_argument("--rescale-temperature", type=float,
                   help="new temperature in K for the rescaled floor")
    p.add_argument("--temperature", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--omega-c", type=float,
                   help="colored-noise cutoff in rad/s (worst-case "
                        "band adjustment)")
    p.add_argument("--overlay", action="append",
                   help="overlay CSV of published bounds (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--oracle-checks", type=int, default=0,
                   help="re-evaluate this many points through the "
                        "quadrature oracle and flag disagreements")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("simulate", help="Langevin pendulum run / validation")
    _add_geometry_source(p)
    _add_common(p)
    p.add_argument("--temperature", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--inertia", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--s-th", type=float, default=None,
                   help="thermal floor override, N^2 m^2 s")
    p.add_argument("--s-csl", type=float, default=None,
                   help="collapse torque DNS, N^2 m^2 s")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="collapse rate; with --rc and a geometry source "
                        "computes --s-csl")
    p.add_argument("--rc", type=float, default=None)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--burn-in", type=float, default=0.0)
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segment-length", type=int, default=None)
    p.add_argument("--validate", action="store_true",
                   help="compare the estimated angle PSD to the analytic "
                        "transfer curve")
    p.add_argument("--band", default="2e-3:1e-1",
                   help="validation band LO:HI in Hz")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("overlay-merge", help="validate and merge overlay "
                                             "CSVs")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_overlay_merge, plot=False)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SeriesConvergenceError, QuadratureConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidGeometryError, bounds.OverlayFormatError, ValueError,
            KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
