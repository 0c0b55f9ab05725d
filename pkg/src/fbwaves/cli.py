"""Command-line entry point: ``fbwaves <command> --config run.json --out DIR``.

Every command writes its CSV artifacts and a ``report.json`` into ``--out``.
Exit codes: 0 success, 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .bvp import continuation
from .errors import ConfigError, FBWavesError, NoCrossing, NoSpeedInBracket
from .lattice import LatticeParams, ensemble_density, rle_encode, step_front
from .layer import equal_area, viscous_shock_endpoints
from .pde import Grid, front_speed, heaviside, simulate
from .phase_plane import (DesingularisedSystem, Regularisation, classify_fixed_points,
                          delta_p, find_speed, shock_lines, shoot_manifold, speed_curve)

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


class NumericFailure(Exception):
    """Raised by a command after writing its partial report."""


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "value") and hasattr(x, "name"):
        return x.value
    return x


# commands

def _model_report(model):
    return {"k": model.k, "alpha": model.alpha, "beta": model.beta, "r": model.r,
            "A": model.A, "reaction_class": model.reaction_class.value}


def cmd_equal_area(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    t = time.perf_counter()
    shock = equal_area(model)
    pos = viscous_shock_endpoints(model, +1)
    elapsed = time.perf_counter() - t
    rows = [("v", shock.v), ("u_plus", shock.u_plus), ("u_mid", shock.u_mid),
            ("u_minus", shock.u_minus), ("a", shock.a), ("w_peak", -shock.a * shock.width ** 2 / 4),
            ("u_r", pos.u_r), ("v_r", pos.v_r), ("u_l", pos.u_l), ("v_l", pos.v_l)]
    write_csv(out / "equal_area.csv", ["quantity", "value"], rows)
    return {"model": _model_report(model), "results": dict(rows),
            "diagnostics": {"solve_seconds": elapsed}}


def _speed_rows(model, regs, scfg):
    rows, errors = [], {}
    for reg in regs:
        try:
            res = find_speed(model, reg, bracket=scfg.get("bracket"),
                             n_scan=int(scfg.get("n_scan", 16)))
            rows.append(res)
        except (NoSpeedInBracket, FBWavesError) as exc:
            errors[reg.value] = f"{type(exc).__name__}: {exc}"
    return rows, errors


def cmd_speed(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    scfg = cfgmod.section(cfg, "speed")
    regs = cfgmod.regularisations(scfg.get("regularisations", ["nonlocal"]))
    results, errors = _speed_rows(model, regs, scfg)
    write_csv(out / "speed.csv",
              ["regularisation", "c0", "residual", "u_from", "u_to", "p_star", "evaluations"],
              [(r.regularisation.value, r.c0, r.residual, r.u_from, r.u_to, r.p_star, r.evaluations)
               for r in results])

    curve = []
    n = int(scfg.get("curve_points", 41))
    for reg in regs:
        centre = next((r.c0 for r in results if r.regularisation is reg), None)
        lo, hi = scfg.get("curve_range", (None, None)) or (None, None)
        if lo is None or hi is None:
            if centre is None:
                continue
            lo, hi = centre - 0.1, centre + 0.1
        for c in np.linspace(lo, hi, n):
            if (reg is Regularisation.VISCOUS_POSITIVE and c <= 0) or \
               (reg is Regularisation.VISCOUS_NEGATIVE and c >= 0):
                continue
            try:
                dp = delta_p(model, reg, float(c))
            except NoCrossing:
                dp = None
            curve.append((reg.value, c, dp))
    write_csv(out / "delta_p_curve.csv", ["regularisation", "c", "delta_p"], curve)

    report = {"model": _model_report(model),
              "results": [{"regularisation": r.regularisation.value, "c0": r.c0,
                           "residual": r.residual, "bracket": r.bracket,
                           "shock": [r.u_from, r.u_to]} for r in results],
              "errors": errors}
    if errors:
        raise NumericFailure(report)
    return report


def _A_values(scfg):
    if "A_values" in scfg:
        return [float(a) for a in scfg["A_values"]]
    try:
        start, stop = float(scfg["A_start"]), float(scfg.get("A_stop", scfg["A_start"]))
    except KeyError as exc:
        raise ConfigError("sweep needs A_values or A_start/A_stop/A_step") from exc
    step = float(scfg.get("A_step", 0.0))
    if stop == start:
        return [start]
    if step <= 0:
        raise ConfigError("A_step must be positive when A_stop != A_start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def cmd_sweep(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    scfg = cfgmod.section(cfg, "sweep")
    A_values = _A_values(scfg)
    regs = cfgmod.regularisations(scfg.get("regularisations", list(cfgmod.REGULARISATIONS)))
    curves = {reg: speed_curve(model, reg, A_values, jobs=ctx["jobs"]) for reg in regs}
    shock = equal_area(model)
    pos = viscous_shock_endpoints(model, +1)
    col = {Regularisation.NONLOCAL: 0, Regularisation.VISCOUS_POSITIVE: 1,
           Regularisation.VISCOUS_NEGATIVE: 2}
    rows, errors = [], []
    for i, A in enumerate(A_values):
        cs = [None, None, None]
        for reg, curve in curves.items():
            cs[col[reg]] = curve[i].c0
            if curve[i].error:
                errors.append({"A": A, "regularisation": reg.value, "error": curve[i].error})
        rows.append([A, *cs, shock.u_plus, shock.u_minus, model.alpha, pos.u_r, pos.u_l, model.beta])
    write_csv(out / "speed_vs_A.csv",
              ["A", "c_nonlocal", "c_viscous_pos", "c_viscous_neg",
               "u_plus", "u_minus", "alpha", "u_r", "u_l", "beta"], rows)
    return {"model": _model_report(model), "results": {"rows": rows}, "row_errors": errors}


def cmd_phase_plane(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    pcfg = cfgmod.section(cfg, "phase_plane")
    reg = cfgmod.regularisations(pcfg.get("regularisation", "nonlocal"))[0]
    if "c" not in pcfg:
        raise ConfigError("phase_plane needs a speed 'c'")
    c = float(pcfg["c"])
    n = int(pcfg.get("samples", 2000))
    system = DesingularisedSystem(model, c)
    u_hi, u_lo = shock_lines(model, reg)
    fps = classify_fixed_points(system)
    write_csv(out / "fixed_points.csv", ["u", "p", "type", "tau_plus", "tau_minus"],
              [(f.point[0], f.point[1], f.kind.value, f"{complex(f.eigenvalues[0]):.17g}",
                f"{complex(f.eigenvalues[1]):.17g}") for f in fps])
    rows = []
    top = shoot_manifold(system, (1.0, -c), -1, stop=(u_hi,))
    bot = shoot_manifold(system, (0.0, 0.0), +1, stop=(u_lo,), stable=True)
    for name, traj in (("unstable_1", top), ("stable_0", bot)):
        psi, y = traj.sample(n)
        rows += [(name, s, u, p) for s, u, p in zip(psi, y[0], y[1])]
    write_csv(out / "phase_plane.csv", ["branch", "psi", "u", "p"], rows)
    cr_top, cr_bot = top.first_crossing(u_hi), bot.first_crossing(u_lo)
    return {"model": _model_report(model),
            "results": {"c": c, "regularisation": reg.value, "lines": [u_hi, u_lo],
                        "p_star_minus": cr_top.p if cr_top else None,
                        "p_star_plus": cr_bot.p if cr_bot else None,
                        "delta_p": (cr_bot.p - cr_top.p) if (cr_top and cr_bot) else None,
                        "fixed_points": [{"u": f.point[0], "type": f.kind.value} for f in fps]}}


def cmd_pde(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    pcfg = cfgmod.section(cfg, "pde")
    g = pcfg.get("grid", {})
    try:
        grid = Grid(**g)
    except TypeError as exc:
        raise ConfigError(f"bad pde.grid: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad pde.grid: {exc}") from exc
    t2, t3 = pcfg.get("t_speed", (500.0, 1000.0))
    samples = sorted(set(float(t) for t in pcfg.get("t_samples", [])) | {float(t2), float(t3)})
    U0 = heaviside(grid, float(pcfg.get("x_step", 40.0)))
    t = time.perf_counter()
    hist = simulate(model, grid, U0, samples, tol=float(pcfg.get("newton_tol", 1e-6)))
    elapsed = time.perf_counter() - t
    threshold = float(pcfg.get("threshold", 1e-3))
    c = front_speed(hist, t2, t3, threshold)
    hist.write_csv(out / "pde")
    write_csv(out / "pde_speed.csv", ["t2", "t3", "threshold", "c"], [(t2, t3, threshold, c)])
    return {"model": _model_report(model), "results": {"c": c, "t2": t2, "t3": t3},
            "diagnostics": {"wall_time_simulate": elapsed, "interface": grid.interface,
                            "nodes": grid.n}}


def cmd_bvp(cfg, out, ctx):
    model = cfgmod.build_model(cfg)
    bcfg = cfgmod.section(cfg, "bvp")
    reg = cfgmod.regularisations(bcfg.get("regularisation", "nonlocal"))[0]
    ladder = [float(e) for e in bcfg.get("eps", [1e-3, 1e-4, 1e-5])]
    c_seed = bcfg.get("c_seed")
    if c_seed is None:
        c_seed = find_speed(model, reg).c0
    log = []
    sols = continuation(model, float(c_seed), ladder, reg, L=float(bcfg.get("L", 40.0)),
                        q0=float(bcfg.get("q0", -5.0)), phase=bcfg.get("phase", "integral"),
                        n_nodes=int(bcfg.get("n_nodes", 2001)), tol=float(bcfg.get("tol", 1e-8)),
                        log=log)
    rows = []
    for s in sols:
        s.write_csv(out / f"bvp_eps{s.problem.eps:g}.csv")
        rows.append((s.problem.eps, s.c, s.residual, s.z.size, s.monotone))
    write_csv(out / "bvp_speeds.csv", ["eps", "c", "residual", "mesh_size", "monotone"], rows)
    return {"model": _model_report(model),
            "results": {"c_seed": c_seed, "solutions": [s.metadata() for s in sols]},
            "diagnostics": {"continuation": log}}


def cmd_lattice(cfg, out, ctx):
    lcfg = cfgmod.section(cfg, "lattice")
    pkeys = ("Pm_i", "Pp_i", "Pd_i", "Pm_g", "Pp_g", "Pd_g", "tau", "delta", "n_sites")
    try:
        params = LatticeParams(**{k: lcfg[k] for k in pkeys if k in lcfg})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad lattice parameters: {exc}") from exc
    n_reps = int(lcfg.get("n_reps", 20))
    t_samples = lcfg.get("t_samples", [0, 100])
    x0 = float(lcfg.get("x_step", 0.2 * params.n_sites * params.delta))
    init = step_front(params, x0)
    seed = ctx["seed"]
    prof = ensemble_density(params, n_reps, t_samples, seed, init, jobs=ctx["jobs"])
    prof.write_csv(out / "density.csv")
    return {"results": {"n_reps": n_reps, "t": prof.t, "mean_agents": prof.density.sum(axis=1),
                        "initial_rle": rle_encode(init)},
            "diagnostics": {"continuum": params.continuum(),
                            "update": "random-sequential, independent move/proliferate/die draws"}}


COMMANDS = {
    "speed": cmd_speed, "sweep": cmd_sweep, "equal-area": cmd_equal_area,
    "phase-plane": cmd_phase_plane, "pde": cmd_pde, "bvp": cmd_bvp, "lattice": cmd_lattice,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="fbwaves", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--jobs", type=int, default=None, help="worker processes (default: cores)")
        p.add_argument("--seed", type=int, default=None, help="random seed (u64)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a top-level scalar config field")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    report = {"command": args.command, "version": __version__}
    code = EXIT_OK
    t0 = time.perf_counter()
    try:
        cfg = cfgmod.apply_overrides(cfgmod.load(args.config), args.set)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not isinstance(seed, int) or seed < 0 or seed >= 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        jobs = args.jobs or cfg.get("jobs") or os.cpu_count() or 1
        report.update(config=cfg, seed=seed, jobs=jobs)
        out.mkdir(parents=True, exist_ok=True)
        report.update(COMMANDS[args.command](cfg, out, {"seed": seed, "jobs": int(jobs)}))
        report["status"] = "ok"
    except ConfigError as exc:
        report.update(status="config_error", error=str(exc))
        code = EXIT_CONFIG
    except NumericFailure as exc:
        report.update(exc.args[0])
        report["status"] = "numeric_failure"
        code = EXIT_NUMERIC
    except FBWavesError as exc:
        report.update(status="numeric_failure", error=f"{type(exc).__name__}: {exc}")
        code = EXIT_NUMERIC
    report.setdefault("diagnostics", {})["wall_time"] = time.perf_counter() - t0
    if code != EXIT_OK:
        print(f"fbwaves {args.command}: {report.get('error') or report.get('errors')}",
              file=sys.stderr)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2))
    except OSError as exc:
        print(f"fbwaves: cannot write report: {exc}", file=sys.stderr)
        code = code or EXIT_CONFIG
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
