"""Command-line experiment runner.

Subcommands mirror the library operations: mi, anchors, outage, boundary,
sweep, optimize, expand, plus `reproduce figN` for the canned study
configurations.  Angles are taken in degrees and SNRs in dB on the command
line; outputs are CSV (default) or JSON with a provenance header (tool
version, config hash, seed, engine settings) so identical invocations
produce identical bytes.

Exit codes: 0 success, 2 configuration error, 3 infeasible rate /
projection saturation (diversity loss).
"""

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__, constellations, precoders
from .mutual_info import (
    ChannelSample,
    EngineConfig,
    SaturationError,
    mi_gaussian,
    mi_per_use,
)
from .optimizer import (
    default_grid,
    expansion_compare,
    optimize,
    sweep,
)
from .outage import (
    OutageQuery,
    compute_anchors,
    gaussian_anchors,
    gaussian_boundary_2d,
    hypersphere_bounds,
    outage_from_boundary_2d,
    outage_mc,
    trace_boundary_2d,
)


class ConfigError(ValueError):
    pass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 and math.isfinite(x) else math.inf


def parse_range(text: str) -> list:
    """Either a single float or 'a:b:step' (inclusive of b within half a step)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be a:b:step, got {text!r}")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise ConfigError(f"bad range {text!r}")
        return list(np.arange(a, b + step / 2, step))
    return [float(text)]


def engine_from_args(args) -> EngineConfig:
    budget = int(os.environ.get("OUTAGELAB_BUDGET_OPS", 1_000_000_000))
    return EngineConfig(
        engine=args.engine,
        gh_order=args.gh_order,
        mc_samples=args.mc_samples,
        seed=args.seed,
        budget_ops=budget,
    )


def load_constellation(args) -> constellations.Constellation:
    if args.constellation_file:
        return constellations.load_file(args.constellation_file)
    if not args.constellation:
        raise ConfigError("one of --constellation or --constellation-file is required")
    try:
        return constellations.build_named(args.constellation)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def build_precoder(args, B: int) -> precoders.Precoder:
    if args.phases_deg:
        phases = [math.radians(float(x)) for x in args.phases_deg.split(",")]
        return precoders.circulant_from_phases(
            B, phases, lambda0_sign=args.lambda0_sign, lambda_half_sign=args.lambda_half_sign
        )
    if B == 2:
        return precoders.rotation2(math.radians(args.theta_deg))
    if B == 3:
        theta = args.theta1_deg if args.theta1_deg is not None else args.theta_deg
        return precoders.rotation3(math.radians(theta), lambda0_sign=args.lambda0_sign)
    raise ConfigError(f"B={B} needs --phases-deg")


def resolve_rate(args, c) -> float:
    if args.R is not None:
        return args.R
    if args.Rc is not None:
        m = args.m if args.m is not None else c.m
        if args.m is not None and abs(args.m - c.m) > 1e-9:
            raise ConfigError(f"--m {args.m} does not match the constellation (m={c.m:g})")
        return args.Rc * m / c.B
    raise ConfigError("give --R, or --Rc (with optional --m)")


# ---------------------------------------------------------------------------
# Output writing
# ---------------------------------------------------------------------------

def _config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.10g}"
    return str(v)


def write_table(path, columns, rows, meta: dict, fmt: str = "csv"):
    meta = {"tool": f"outagelab {__version__}", "config": _config_hash(meta), **meta}
    if fmt == "json":
        doc = {
            "meta": {k: _fmt(v) if isinstance(v, float) else v for k, v in meta.items()},
            "columns": columns,
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append(",".join(columns))
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_mi(args) -> int:
    cfg = engine_from_args(args)
    gamma = db_to_linear(args.gamma_db)
    alpha = np.array([float(x) for x in args.alpha.split(",")])
    if args.gaussian:
        est = mi_gaussian(ChannelSample(alpha, gamma))
    else:
        c = load_constellation(args)
        p = build_precoder(args, c.B)
        omega_x = precoders.apply(p, c)
        est = mi_per_use(omega_x, ChannelSample(alpha, gamma), cfg)
    meta = {"seed": args.seed, "engine": est.method, "gamma_db": args.gamma_db}
    write_table(
        args.out,
        ["alpha", "gamma_db", "mi_bpcu", "std_error", "method"],
        [[args.alpha.replace(",", ";"), args.gamma_db, est.value, est.std_error, est.method]],
        meta,
        args.format,
    )
    return 0


def cmd_anchors(args) -> int:
    cfg = engine_from_args(args)
    gamma = db_to_linear(args.gamma_db)
    if args.gaussian:
        if args.B is None or args.R is None:
            raise ConfigError("--gaussian anchors need --B and --R")
        an = gaussian_anchors(args.B, args.R, gamma)
        B = args.B
    else:
        c = load_constellation(args)
        B = c.B
        p = build_precoder(args, B)
        q = OutageQuery(c, p, R=resolve_rate(args, c), gamma=gamma)
        an = compute_anchors(q, cfg)
    p_up, p_low = hypersphere_bounds(an, B)
    meta = {"seed": args.seed, "engine": cfg.engine, "gamma_db": args.gamma_db}
    write_table(
        args.out,
        ["alpha_o", "alpha_o_exists", "alpha_e", "alpha_e_exists", "p_up", "p_low", "note"],
        [[an.alpha_o, int(an.alpha_o_exists), an.alpha_e, int(an.alpha_e_exists), p_up, p_low, an.note]],
        meta,
        args.format,
    )
    return 0


def _outage_row(c, p, R, gamma_db, args, cfg, cache=None):
    gamma = db_to_linear(gamma_db)
    q = OutageQuery(c, p, R=R, gamma=gamma)
    an = compute_anchors(q, cfg)
    p_up, p_low = hypersphere_bounds(an, c.B)
    method = args.method
    if method == "auto":
        method = "boundary" if c.B == 2 else "mc"
    if R >= c.m / c.B - 1e-12:
        warnings.warn(f"R={R} is at or above the alphabet limit m/B={c.m / c.B:g}; p_out=1")
        return [gamma_db, 1.0, 1.0, 1.0, p_up, p_low, "limit", args.seed]
    if method == "boundary":
        res = outage_from_boundary_2d(trace_boundary_2d(q, args.angles, cfg))
    else:
        res = outage_mc(q, args.mc_samples, seed=args.seed, cfg=cfg, cache=cache)
    return [gamma_db, res.p_out, res.ci95[0], res.ci95[1], p_up, p_low, res.method, args.seed]


def cmd_outage(args) -> int:
    cfg = engine_from_args(args)
    gammas_db = parse_range(args.gamma_db)
    rows = []
    if args.gaussian:
        if args.B is None or args.R is None:
            raise ConfigError("--gaussian outage needs --B and --R")
        if args.B != 2:
            raise ConfigError("deterministic gaussian outage is implemented for B=2")
        for gdb in gammas_db:
            gamma = db_to_linear(gdb)
            res = outage_from_boundary_2d(gaussian_boundary_2d(args.R, gamma, args.angles))
            an = gaussian_anchors(args.B, args.R, gamma)
            p_up, p_low = hypersphere_bounds(an, args.B)
            rows.append([gdb, res.p_out, res.p_out, res.p_out, p_up, p_low, res.method, args.seed])
        meta = {"seed": args.seed, "engine": "closed_form", "R": args.R}
    else:
        c = load_constellation(args)
        p = build_precoder(args, c.B)
        R = resolve_rate(args, c)
        cache = None
        wants_mc = args.method == "mc" or (args.method == "auto" and c.B == 3)
        if wants_mc and c.B in (2, 3) and len(gammas_db) > 1 and R < c.m / c.B - 1e-12:
            from .outage import PolarMICache

            cache = PolarMICache(precoders.apply(p, c), cfg)
        for gdb in gammas_db:
            rows.append(_outage_row(c, p, R, gdb, args, cfg, cache=cache))
        meta = {
            "seed": args.seed,
            "engine": cfg.engine,
            "gh_order": cfg.gh_order,
            "mc_samples": cfg.mc_samples,
            "R": R,
        }
    write_table(
        args.out,
        ["gamma_db", "p_out", "ci_lo", "ci_hi", "p_up", "p_low", "method", "seed"],
        rows,
        meta,
        args.format,
    )
    return 0


def cmd_boundary(args) -> int:
    cfg = engine_from_args(args)
    gamma = db_to_linear(args.gamma_db)
    if args.gaussian:
        if args.R is None:
            raise ConfigError("--gaussian boundary needs --R")
        trace = gaussian_boundary_2d(args.R, gamma, args.angles)
    else:
        c = load_constellation(args)
        p = build_precoder(args, c.B)
        q = OutageQuery(c, p, R=resolve_rate(args, c), gamma=gamma)
        trace = trace_boundary_2d(q, args.angles, cfg)
    rows = [
        [lam, rho, int(sat)]
        for lam, rho, sat in zip(trace.lambdas, trace.rhos, trace.saturated)
    ]
    meta = {"seed": args.seed, "engine": cfg.engine, "gamma_db": args.gamma_db, "R": trace.R}
    write_table(args.out, ["lambda_rad", "rho", "saturated"], rows, meta, args.format)
    return 0


def _sweep_rows(profile):
    rows = []
    for k in range(len(profile.grid)):
        gs = profile.gamma_s[k]
        rows.append(
            [
                profile.grid_deg[k],
                linear_to_db(gs),
                linear_to_db(profile.gamma_floor),
                profile.d_pmin[k] if profile.d_pmin is not None else "",
                int(not math.isfinite(gs)),
            ]
        )
    return rows


def cmd_sweep(args) -> int:
    cfg = engine_from_args(args)
    c = load_constellation(args)
    R = resolve_rate(args, c)
    grid = np.radians(parse_range(args.theta_grid)) if args.theta_grid else default_grid(c.B)
    profile = sweep(
        c, c.B, R, grid=grid, cfg=cfg,
        include_product_distance=args.product_distance,
        workers=args.threads,
    )
    meta = {"seed": args.seed, "engine": cfg.engine, "gh_order": cfg.gh_order, "R": R}
    write_table(
        args.out,
        ["theta_deg", "gamma_s_db", "gamma_floor_db", "d_pmin", "saturated"],
        _sweep_rows(profile),
        meta,
        args.format,
    )
    return 0


def cmd_optimize(args) -> int:
    cfg = engine_from_args(args)
    c = load_constellation(args)
    R = resolve_rate(args, c)
    res = optimize(c, c.B, R, cfg, workers=args.threads)
    meta = {
        "seed": args.seed,
        "engine": cfg.engine,
        "gh_order": cfg.gh_order,
        "R": R,
        "theta_opt_deg": f"{math.degrees(res.theta_opt):.6f}",
        "gamma_s_opt_db": f"{linear_to_db(res.gamma_s_opt):.6f}",
        "interval_deg": f"{res.near_optimal_interval[0]:.6f}:{res.near_optimal_interval[1]:.6f}",
    }
    write_table(
        args.out,
        ["theta_deg", "gamma_s_db", "gamma_floor_db", "d_pmin", "saturated"],
        _sweep_rows(res.profile),
        meta,
        args.format,
    )
    print(
        f"theta_opt_deg={math.degrees(res.theta_opt):.4f} "
        f"gamma_s_db={linear_to_db(res.gamma_s_opt):.4f} "
        f"interval_deg=[{res.near_optimal_interval[0]:.2f}, {res.near_optimal_interval[1]:.2f}]"
    )
    return 0


def cmd_expand(args) -> int:
    cfg = engine_from_args(args)
    if args.R is None:
        raise ConfigError("expand needs --R")
    cands = []
    for item in args.candidates.split(","):
        name, rc = item.split(":")
        cands.append((constellations.build_named(name.strip()), float(rc)))
    B = cands[0][0].B
    R = args.R
    rows = expansion_compare(cands, B, R, cfg)
    meta = {"seed": args.seed, "engine": cfg.engine, "R": R}
    write_table(
        args.out,
        ["name", "m", "Rc", "theta_opt_deg", "gamma_s_opt_db", "gap_db", "ergodic_snr_db", "ergodic_gap_db"],
        [
            [r.name, r.m, r.Rc, r.theta_opt_deg, linear_to_db(r.gamma_s_opt),
             r.gap_db, linear_to_db(r.ergodic_snr), r.ergodic_gap_db]
            for r in rows
        ],
        meta,
        args.format,
    )
    return 0


# ---------------------------------------------------------------------------
# Canned study recipes
# ---------------------------------------------------------------------------

def _recipe_sweeps(outdir, fmt, cfg, tag, names_rates, B, dpmin_for=()):
    for entry in names_rates:
        name, R = entry[0], entry[1]
        step_deg, order = (entry[2], entry[3]) if len(entry) > 2 else (0.5, cfg.gh_order)
        c = constellations.build_named(name)
        run_cfg = dataclasses.replace(cfg, gh_order=order)
        profile = sweep(
            c, B, R, grid=default_grid(B, step_deg), cfg=run_cfg,
            include_product_distance=name in dpmin_for,
        )
        write_table(
            os.path.join(outdir, f"{tag}_sweep_{name}.csv" if fmt == "csv" else f"{tag}_sweep_{name}.json"),
            ["theta_deg", "gamma_s_db", "gamma_floor_db", "d_pmin", "saturated"],
            _sweep_rows(profile),
            {"recipe": tag, "constellation": name, "R": R, "seed": cfg.seed,
             "gh_order": order},
            fmt,
        )


def _recipe_outage_curves(outdir, fmt, cfg, tag, entries, gammas_db, angles=257):
    from .outage import PolarMICache

    for name, theta_deg, R in entries:
        c = constellations.build_named(name)
        p = precoders.rotation2(math.radians(theta_deg)) if c.B == 2 else precoders.rotation3(
            math.radians(theta_deg)
        )
        cache = None
        if c.B == 3:
            cache = PolarMICache(precoders.apply(p, c), cfg)
        rows = []
        for gdb in gammas_db:
            gamma = db_to_linear(gdb)
            q = OutageQuery(c, p, R=R, gamma=gamma)
            an = compute_anchors(q, cfg)
            p_up, p_low = hypersphere_bounds(an, c.B)
            if c.B == 2:
                res = outage_from_boundary_2d(trace_boundary_2d(q, angles, cfg))
            else:
                res = outage_mc(q, 200_000, seed=cfg.seed, cfg=cfg, cache=cache)
            rows.append([gdb, res.p_out, res.ci95[0], res.ci95[1], p_up, p_low, res.method, cfg.seed])
        write_table(
            os.path.join(outdir, f"{tag}_outage_{name}_t{theta_deg:g}.csv" if fmt == "csv" else f"{tag}_outage_{name}_t{theta_deg:g}.json"),
            ["gamma_db", "p_out", "ci_lo", "ci_hi", "p_up", "p_low", "method", "seed"],
            rows,
            {"recipe": tag, "constellation": name, "theta_deg": theta_deg, "R": R, "seed": cfg.seed},
            fmt,
        )


def _recipe_bounds_curve(outdir, fmt, cfg, tag, name, theta_deg, R, gammas_db):
    from .constellations import project
    from .mutual_info import inv_mi_scalar
    from .optimizer import ergodic_snr
    from .outage import OutageAnchors

    c = constellations.build_named(name)
    p = precoders.rotation2(math.radians(theta_deg)) if c.B == 2 else precoders.rotation3(
        math.radians(theta_deg)
    )
    # both anchor SNRs are gamma-invariant: solve once, scale per SNR point
    s_axis = inv_mi_scalar(project(precoders.apply(p, c), 1), c.B * R, cfg)
    s_erg = ergodic_snr(c, c.B, R, dataclasses.replace(cfg, gh_order=min(cfg.gh_order, 12)))
    rows = []
    for gdb in gammas_db:
        gamma = db_to_linear(gdb)
        an = OutageAnchors(math.sqrt(s_axis / gamma), True, math.sqrt(s_erg / gamma), True)
        p_up, p_low = hypersphere_bounds(an, c.B)
        rows.append([gdb, "", "", "", p_up, p_low, "bounds_only", cfg.seed])
    write_table(
        os.path.join(outdir, f"{tag}_bounds_{name}_t{theta_deg:g}.csv" if fmt == "csv" else f"{tag}_bounds_{name}_t{theta_deg:g}.json"),
        ["gamma_db", "p_out", "ci_lo", "ci_hi", "p_up", "p_low", "method", "seed"],
        rows,
        {"recipe": tag, "constellation": name, "theta_deg": theta_deg, "R": R, "seed": cfg.seed},
        fmt,
    )


def _gaussian_curve(outdir, fmt, tag, B, R, gammas_db, angles=257):
    rows = []
    for gdb in gammas_db:
        gamma = db_to_linear(gdb)
        res = outage_from_boundary_2d(gaussian_boundary_2d(R, gamma, angles))
        an = gaussian_anchors(B, R, gamma)
        p_up, p_low = hypersphere_bounds(an, B)
        rows.append([gdb, res.p_out, res.p_out, res.p_out, p_up, p_low, res.method, 0])
    write_table(
        os.path.join(outdir, f"{tag}_outage_gaussian.csv" if fmt == "csv" else f"{tag}_outage_gaussian.json"),
        ["gamma_db", "p_out", "ci_lo", "ci_hi", "p_up", "p_low", "method", "seed"],
        rows,
        {"recipe": tag, "input": "gaussian", "R": R},
        fmt,
    )


def cmd_reproduce(args) -> int:
    cfg = engine_from_args(args)
    outdir = args.out or "results"
    os.makedirs(outdir, exist_ok=True)
    fmt = args.format
    target = args.target
    gammas_db = list(np.arange(0.0, 20.5, 2.0))
    if target == "fig4":
        _recipe_sweeps(outdir, fmt, cfg, "fig4",
                       [("r2_4", 0.9), ("r2_8", 0.9), ("r2_16", 0.9)], 2,
                       dpmin_for=("r2_8",))
    elif target == "fig5":
        for theta in (0.0, 10.0, 27.0):
            c = constellations.build_named("r2_4")
            q = OutageQuery(c, precoders.rotation2(math.radians(theta)), R=0.9, gamma=db_to_linear(8.0))
            trace = trace_boundary_2d(q, args.angles, cfg)
            rows = [
                [lam, rho, int(sat)]
                for lam, rho, sat in zip(trace.lambdas, trace.rhos, trace.saturated)
            ]
            write_table(
                os.path.join(outdir, f"fig5_boundary_r2_4_t{theta:g}.csv" if fmt == "csv" else f"fig5_boundary_r2_4_t{theta:g}.json"),
                ["lambda_rad", "rho", "saturated"],
                rows,
                {"recipe": "fig5", "theta_deg": theta, "R": 0.9, "gamma_db": 8.0, "seed": cfg.seed},
                fmt,
            )
    elif target == "fig6":
        opt8 = optimize(constellations.build_named("r2_8"), 2, 0.9, cfg)
        opt16 = optimize(constellations.build_named("r2_16"), 2, 0.9, cfg)
        entries = [
            ("r2_4", 0.0, 0.9),
            ("r2_4", 27.0, 0.9),
            ("r2_8", 0.0, 0.9),
            ("r2_8", round(math.degrees(opt8.theta_opt), 2), 0.9),
            ("r2_16", 0.0, 0.9),
            ("r2_16", round(math.degrees(opt16.theta_opt), 2), 0.9),
        ]
        _recipe_outage_curves(outdir, fmt, cfg, "fig6", entries, gammas_db)
        _gaussian_curve(outdir, fmt, "fig6", 2, 0.9, gammas_db)
    elif target == "fig7":
        _recipe_sweeps(outdir, fmt, cfg, "fig7",
                       [("c2_16", 1.8), ("c2_64", 1.8, 1.0, 16)], 2)
    elif target == "fig8":
        opt = optimize(constellations.build_named("c2_16"), 2, 1.8, cfg)
        entries = [("c2_16", 0.0, 1.8), ("c2_16", round(math.degrees(opt.theta_opt), 2), 1.8)]
        _recipe_outage_curves(outdir, fmt, cfg, "fig8", entries, gammas_db)
        opt64 = optimize(
            constellations.build_named("c2_64"), 2, 1.8,
            dataclasses.replace(cfg, gh_order=16), coarse_step_deg=1.0,
        )
        _recipe_bounds_curve(outdir, fmt, cfg, "fig8", "c2_64",
                             round(math.degrees(opt64.theta_opt), 2), 1.8, gammas_db)
    elif target == "fig9":
        _recipe_sweeps(outdir, fmt, cfg, "fig9",
                       [("r3_8", 0.9), ("r3_16", 0.9), ("r3_64", 0.9)], 3)
        opt = optimize(constellations.build_named("r3_8"), 3, 0.9, cfg)
        _recipe_outage_curves(
            outdir, fmt, cfg, "fig9",
            [("r3_8", 0.0, 0.9), ("r3_8", round(math.degrees(opt.theta_opt), 2), 0.9)],
            list(np.arange(0.0, 20.5, 4.0)),
        )
        for name in ("r3_16", "r3_64"):
            optn = optimize(constellations.build_named(name), 3, 0.9, cfg)
            _recipe_bounds_curve(outdir, fmt, cfg, "fig9", name,
                                 round(math.degrees(optn.theta_opt), 2), 0.9, gammas_db)
    else:
        raise ConfigError(f"unknown reproduce target {target!r}")
    print(f"wrote {target} data to {outdir}/")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--constellation", help="registry name")
    p.add_argument("--constellation-file", help="JSON constellation file")
    p.add_argument("--B", type=int, default=None)
    p.add_argument("--R", type=float, default=None, help="rate in bits per channel use")
    p.add_argument("--m", type=float, default=None, help="bits per symbol (with --Rc)")
    p.add_argument("--Rc", type=float, default=None, help="coding rate; R = Rc*m/B")
    p.add_argument("--theta-deg", type=float, default=0.0)
    p.add_argument("--theta1-deg", type=float, default=None)
    p.add_argument("--phases-deg", default=None, help="comma list of eigenphases")
    p.add_argument("--lambda0-sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--lambda-half-sign", type=int, default=None, choices=(1, -1))
    p.add_argument("--gaussian", action="store_true", help="i.i.d. Gaussian input instead of a constellation")
    p.add_argument("--engine", default="quadrature", choices=("quadrature", "mc"))
    p.add_argument("--gh-order", type=int, default=32)
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--angles", type=int, default=513, help="boundary trace resolution")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="outagelab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mi", help="instantaneous mutual information at one fading point")
    p.add_argument("--alpha", required=True, help="comma list of fading gains")
    p.add_argument("--gamma-db", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("anchors", help="axis and ergodic boundary crossings")
    p.add_argument("--gamma-db", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_anchors)

    p = sub.add_parser("outage", help="outage probability over an SNR grid")
    p.add_argument("--gamma-db", required=True, help="single value or a:b:step")
    p.add_argument("--method", default="auto", choices=("auto", "boundary", "mc"))
    _add_common(p)
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("boundary", help="trace the 2-D outage boundary")
    p.add_argument("--gamma-db", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("sweep", help="gamma_s over an angle grid")
    p.add_argument("--theta-grid", default=None, help="a:b:step in degrees")
    p.add_argument("--product-distance", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="minimize gamma_s over the angle")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("expand", help="compare constellation expansions at fixed R")
    p.add_argument("--candidates", required=True, help="name:Rc,name:Rc,...")
    _add_common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("reproduce", help="run a canned study configuration")
    p.add_argument("target", choices=("fig4", "fig5", "fig6", "fig7", "fig8", "fig9"))
    _add_common(p)
    p.set_defaults(func=cmd_reproduce)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SaturationError as exc:
        print(
            f"infeasible rate: {exc}\n"
            "the target rate needs more projection points than the precoded "
            "constellation offers on one axis (2^(B*R) must not exceed the "
            "effective projection size); full diversity is unattainable here",
            file=sys.stderr,
        )
        return 3
    except (ConfigError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
