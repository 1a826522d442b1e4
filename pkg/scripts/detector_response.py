# scripts/detector_response.py
"""
detector_response.py
--------------------
Kommandozeile fuer die Detektor-Engine.

    python scripts/detector_response.py delta --switching gaussian --spectral exponential --a -1000 --lambda 1e-6
    python scripts/detector_response.py table1 --switching sinc --spectral causal-set
    python scripts/detector_response.py plan --species Na-20 --atoms 6e23 --duration 10 --efficiency 0.001 --omega 1.67e22

Points are given either dimensionless (--a/--lambda) or physical
(--omega/--t-window/--l-n); mixing both is an error.

stdout carries CSV/JSON only, logs go to stderr.
Exit: 0 ok | 2 invalid configuration | 3 quadrature not converged | 4 internal error
"""
from __future__ import annotations

import argparse
import itertools
import sys
import traceback
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from errors import (ConfigError, DetectorError, DivisionGuardError, FitError, PlannerError,
                    QuadratureEvaluationError, SpecialFunctionDomainError)
from experiment_planner import (DecayConvention, ExperimentPlan, StatisticsCriterion,
                                atoms_from_grams, get_species, load_species_catalog, plan)
from quadrature import Tolerance
from regime_analyzer import (Figure1Axes, FitTolerances, Table1Grid,
                             compare_spectral_kinds, figure1_sweep, format_table1, points_frame,
                             sweep, sweep_configs, table1_scan)
from response import (MEASURE, EngineSettings, ResponseRequest, asymptotic_delta,
                      asymptotic_excess, nonlocal_excess, relative_response, response_massive)
from spectral import SpectralKind, get_spectral
from switching import SwitchingKind, get_switching
from units import (ELECTRON_MASS_MEV, DetectorConfig, RegimeTag, RegimeThresholds, make_config,
                   mev_to_rad_per_s, regime_from_groups)
from util import (REPO_ROOT, cfg_get, dumps_json, emit_text, ensure_dir, env_get, frame_to_csv,
                  load_config, log_error, log_info, log_warn, save_report, set_log_level,
                  to_jsonable, write_json)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_INTERNAL = 4

_FLAG = {"a": "--a", "lam": "--lambda", "omega": "--omega", "t_window": "--t-window", "l_n": "--l-n"}


@dataclass
class RunContext:
    cfg: Dict[str, Any]
    tol: Tolerance
    settings: EngineSettings
    thresholds: RegimeThresholds
    alpha: float
    threads: Optional[int]
    files: List[str] = field(default_factory=list)


# =========================================================
# Parameter & Ausgabe
# =========================================================

def _parameterization(args, need_lambda: bool = True) -> str:
    """'physical' or 'dimensionless'; raises ConfigError naming the offending flag."""
    dimless = [k for k in ("a", "lam") if getattr(args, k, None) is not None]
    phys = [k for k in ("omega", "t_window", "l_n") if getattr(args, k, None) is not None]
    if dimless and phys:
        raise ConfigError(_FLAG[phys[0]], f"cannot be combined with {_FLAG[dimless[0]]}; "
                                          "use either --a/--lambda or --omega/--t-window/--l-n")
    if phys:
        mode, required = "physical", ["omega", "t_window"] + (["l_n"] if need_lambda else [])
    else:
        mode, required = "dimensionless", ["a"] + (["lam"] if need_lambda else [])
    for k in required:
        if getattr(args, k, None) is None:
            raise ConfigError(_FLAG[k], "is required")
    return mode


def _point(args, need_lambda: bool = True) -> Tuple[float, float, Optional[DetectorConfig]]:
    if _parameterization(args, need_lambda) == "physical":
        conf = make_config(args.omega, args.t_window, args.l_n if need_lambda else 0.0)
        return conf.a, conf.lam, conf
    return float(args.a), (float(args.lam) if need_lambda else 0.0), None


def _physical_doc(conf: Optional[DetectorConfig]) -> Optional[Dict[str, float]]:
    if conf is None:
        return None
    return {"omega": conf.omega, "t_window": conf.t_window, "l_n": conf.l_n, "c": conf.c}


def _regime_doc(tag: RegimeTag) -> Dict[str, str]:
    return {"gap_sign": tag.gap_sign.value, "time_regime": tag.time_regime.value,
            "validity": tag.validity.value, "label": tag.label}


def _flatten(doc: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def _single_row(doc: Dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame([_flatten(to_jsonable(doc))])


def _emit(args, default_format: str, frame: pd.DataFrame, doc: Any) -> None:
    fmt = args.format or default_format
    if fmt == "csv":
        emit_text(frame_to_csv(frame), args.out)
    else:
        emit_text(dumps_json(doc), args.out)


def _status(converged: bool) -> int:
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _resolve_out_dir(args, cfg: Dict[str, Any]) -> Optional[Path]:
    """--out-dir > $UDW_OUTPUT_DIR > output.dir (relativ zum Repo)."""
    if getattr(args, "out_dir", None):
        return Path(args.out_dir)
    env = env_get("UDW_OUTPUT_DIR")
    if env:
        return Path(env)
    d = cfg_get(cfg, "output.dir")
    if not d:
        return None
    p = Path(d)
    return p if p.is_absolute() else REPO_ROOT / p


def _write_pair(ctx: RunContext, out_dir: Path, stem: str, frame: pd.DataFrame, doc: Any) -> None:
    ensure_dir(out_dir)
    csv_path, json_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.json"
    emit_text(frame_to_csv(frame), csv_path)
    write_json(json_path, doc)
    ctx.files += [str(csv_path), str(json_path)]
    log_info(f"wrote {csv_path} + {json_path.name}")


# =========================================================
# Subcommands
# =========================================================

def cmd_rho(args, ctx: RunContext) -> int:
    sp = get_spectral(args.spectral, ctx.alpha)
    xs = args.x if args.x else np.logspace(np.log10(args.x_min), np.log10(args.x_max), args.points)
    rows = [{"x": float(x), "rho_hat": sp.rho_hat(float(x))} for x in xs]
    doc = {"spectral": sp.kind.value, "alpha": sp.alpha, "plateau": sp.plateau, "rows": rows}
    _emit(args, "csv", pd.DataFrame(rows, columns=["x", "rho_hat"]), doc)
    return EXIT_OK


def cmd_switching(args, ctx: RunContext) -> int:
    sw = get_switching(args.switching)
    xs = args.x if args.x else np.linspace(-args.x_max, args.x_max, args.points)
    rows = [{"x": float(x), "chi": sw.evaluate(float(x)), "chi_tilde": sw.fourier(float(x)),
             "chi_tilde_sq": sw.fourier_sq(float(x))} for x in xs]
    doc = {"switching": sw.kind.value, "tail_class": sw.tail_class.value,
           "ft_norm_squared": sw.ft_norm_squared(), "rows": rows}
    _emit(args, "csv", pd.DataFrame(rows, columns=["x", "chi", "chi_tilde", "chi_tilde_sq"]), doc)
    return EXIT_OK


def cmd_response(args, ctx: RunContext) -> int:
    a, _, conf = _point(args, need_lambda=False)
    sw = get_switching(args.switching)
    rows = []
    for m in args.mass:
        r = response_massive(a, m, sw, ctx.tol, ctx.settings)
        rows.append({"a": a, "mass": float(m), "value": r.value, "abs_error": r.abs_error_estimate,
                     "evaluations": r.evaluations, "converged": r.converged, "note": r.message})
    converged = all(r["converged"] for r in rows)
    doc = {"switching": sw.kind.value, "a": a, "measure": MEASURE, "converged": converged,
           "physical": _physical_doc(conf), "rows": rows}
    cols = ["a", "mass", "value", "abs_error", "evaluations", "converged", "note"]
    _emit(args, "csv", pd.DataFrame(rows, columns=cols), doc)
    return _status(converged)


def _asymptotic_excess_or_none(a: float, lam: float, sw, plateau: float, cfg) -> Optional[float]:
    try:
        return asymptotic_excess(a, lam, sw, plateau=plateau,
                                 min_abs_a=float(cfg_get(cfg, "asymptotic.min_abs_a", 10.0)),
                                 max_lambda_abs_a=float(cfg_get(cfg, "asymptotic.max_lambda_abs_a", 1e-2)))
    except ConfigError:
        return None


def cmd_excess(args, ctx: RunContext) -> int:
    a, lam, conf = _point(args)
    sw, sp = get_switching(args.switching), get_spectral(args.spectral, ctx.alpha)
    r = nonlocal_excess(ResponseRequest(a, lam, sw, sp, ctx.tol), ctx.settings)
    doc = {
        "switching": sw.kind.value, "spectral": sp.kind.value, "alpha": sp.alpha,
        "a": a, "lambda": lam, "excess": r.value, "abs_error": r.abs_error_estimate,
        "evaluations": r.evaluations, "converged": r.converged, "message": r.message,
        "regime": _regime_doc(regime_from_groups(a, lam, ctx.thresholds)),
        "asymptotic_excess": _asymptotic_excess_or_none(a, lam, sw, sp.plateau, ctx.cfg),
        "physical": _physical_doc(conf),
    }
    _emit(args, "json", _single_row(doc), doc)
    return _status(r.converged)


def cmd_delta(args, ctx: RunContext) -> int:
    a, lam, conf = _point(args)
    sw, sp = get_switching(args.switching), get_spectral(args.spectral, ctx.alpha)
    head = {"switching": sw.kind.value, "spectral": sp.kind.value, "alpha": sp.alpha,
            "a": a, "lambda": lam}
    tail = {"regime": _regime_doc(regime_from_groups(a, lam, ctx.thresholds)),
            "asymptotic_delta": asymptotic_delta(conf.omega, conf.l_n, conf.c) if conf
            else asymptotic_delta(a, lam, 1.0),
            "physical": _physical_doc(conf)}
    try:
        b = relative_response(ResponseRequest(a, lam, sw, sp, ctx.tol), ctx.thresholds, ctx.settings)
    except DivisionGuardError as e:
        log_error(str(e))
        doc = {**head, "f0": e.f0, "excess": e.excess, "delta": None, "f0_err": None,
               "excess_err": None, "delta_err": None, "converged": bool(e.excess_converged),
               "evaluations": None, "message": str(e), **tail}
        _emit(args, "json", _single_row(doc), doc)
        return EXIT_CONFIG
    doc = {**head, "f0": b.f0, "excess": b.excess, "delta": b.delta, "f0_err": b.f0_err,
           "excess_err": b.excess_err, "delta_err": b.delta_err, "converged": b.converged,
           "evaluations": b.evaluations, "message": b.message, **tail}
    _emit(args, "json", _single_row(doc), doc)
    return _status(b.converged)


def cmd_sweep(args, ctx: RunContext) -> int:
    mode = _parameterization(args)
    if mode == "physical":
        configs = [make_config(o, t, l) for o, t, l in itertools.product(args.omega, args.t_window, args.l_n)]
        points = sweep_configs(configs, args.switching, args.spectral, ctx.alpha, ctx.tol,
                               ctx.settings, ctx.threads)
    else:
        points = sweep(args.a, args.lam, args.switching, args.spectral, ctx.alpha, ctx.tol,
                       ctx.settings, ctx.threads)
    doc = {"switching": SwitchingKind.parse(args.switching).value,
           "spectral": SpectralKind.parse(args.spectral).value, "alpha": ctx.alpha,
           "points": [p.as_row() for p in points]}
    _emit(args, "csv", points_frame(points), doc)
    return _status(all(p.converged for p in points))


def _table1_doc(reports) -> Dict[str, Any]:
    out = []
    for r in reports:
        out.append({"spectral": r.spectral, "passed": r.passed,
                    "cells": to_jsonable(r.cells), "comparison": to_jsonable(r.comparison)})
    return {"passed": all(r["passed"] and all(c["passed"] for c in r["comparison"]) for r in out),
            "reports": out}


def cmd_table1(args, ctx: RunContext) -> int:
    kinds = list(SwitchingKind) if args.switching == "all" else [SwitchingKind.parse(args.switching)]
    spectrals = list(SpectralKind) if args.spectral == "both" else [SpectralKind.parse(args.spectral)]
    grid, fit_tol = Table1Grid.from_config(ctx.cfg), FitTolerances.from_config(ctx.cfg)

    reports = [table1_scan(kinds, sp, grid, ctx.tol, fit_tol, ctx.alpha, ctx.settings, ctx.threads)
               for sp in spectrals]
    if len(reports) == 2:
        reports[0] = replace(reports[0], comparison=compare_spectral_kinds(reports[0], reports[1], fit_tol))
    for r in reports:
        print(format_table1(r), file=sys.stderr)
        failed = [f"{c.switching}/{c.row.value}" for c in r.cells if not c.passed]
        if failed:
            log_warn(f"table1 {r.spectral}: cells not reproduced: {', '.join(failed)}")

    doc = {"switching": [k.value for k in kinds], "spectral": [s.value for s in spectrals],
           **_table1_doc(reports)}
    points = [p for r in reports for p in r.points]
    frame = points_frame(points)
    out_dir = _resolve_out_dir(args, ctx.cfg)
    if out_dir is not None:
        stem = f"table1_{args.switching}_{args.spectral}"
        _write_pair(ctx, out_dir, stem, frame, doc)
    _emit(args, "json", frame, doc)
    return _status(all(p.converged for p in points))


def cmd_fig1(args, ctx: RunContext) -> int:
    axes, fit_tol = Figure1Axes.from_config(ctx.cfg), FitTolerances.from_config(ctx.cfg)
    panels = tuple(p for p in args.panels if p in "abc")
    if not panels:
        raise ConfigError("--panels", f"expected a subset of 'abc', got {args.panels!r}")
    data = figure1_sweep(args.switching, args.spectral, axes, panels, ctx.tol, fit_tol,
                         ctx.alpha, ctx.settings, ctx.threads)
    for c in data.checks:
        if not c.passed:
            log_warn(f"fig1 check failed: {c.name} (measured {c.measured!r}, tol {c.tolerance!r})")
    doc = {"switching": data.switching, "spectral": data.spectral, "panels": "".join(panels),
           "passed": data.passed, "checks": to_jsonable(data.checks),
           "points": [p.as_row() for p in data.points]}
    frame = points_frame(data.points)
    out_dir = _resolve_out_dir(args, ctx.cfg)
    if out_dir is not None:
        _write_pair(ctx, out_dir, f"fig1_{data.switching}_{data.spectral}", frame, doc)
    _emit(args, "csv", frame, doc)
    return _status(all(p.converged for p in data.points))


def cmd_plan(args, ctx: RunContext) -> int:
    catalog_path = args.catalog or cfg_get(ctx.cfg, "planner.catalog")
    if catalog_path and not Path(catalog_path).is_absolute() and not args.catalog:
        catalog_path = REPO_ROOT / catalog_path
    species = get_species(args.species, load_species_catalog(catalog_path))

    if args.grams is not None:
        n_atoms = atoms_from_grams(args.grams, species)
    else:
        n_atoms = args.atoms
    omega = None
    if args.omega is not None:
        omega = args.omega
    elif args.omega_mev is not None:
        omega = mev_to_rad_per_s(args.omega_mev)

    experiment = ExperimentPlan(
        n_atoms=n_atoms, duration=args.duration, efficiency=args.efficiency,
        decay_convention=args.decay_convention or cfg_get(ctx.cfg, "planner.decay_convention",
                                                          DecayConvention.PAPER.value),
        statistics_criterion=args.criterion or cfg_get(ctx.cfg, "planner.statistics_criterion",
                                                       StatisticsCriterion.PAPER_INVERSE.value),
    )
    masses = args.confound_mass if args.confound_mass is not None else \
        [float(m) for m in cfg_get(ctx.cfg, "planner.confound_masses_mev", [ELECTRON_MASS_MEV])]
    sig_figs = args.sig_figs if args.sig_figs is not None else int(cfg_get(ctx.cfg, "planner.sig_figs", 1))
    report = plan(experiment, species, omega=omega, candidate_masses=masses, sig_figs=sig_figs)
    doc = to_jsonable(report)
    _emit(args, "json", _single_row(doc), doc)
    return EXIT_OK


# =========================================================
# Parser
# =========================================================

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common")
    g.add_argument("--config", default=None, help="YAML config (default: $UDW_CONFIG or config/config.yaml)")
    g.add_argument("--rel-tol", type=float, default=None)
    g.add_argument("--abs-tol", type=float, default=None)
    g.add_argument("--max-evaluations", type=int, default=None)
    g.add_argument("--out", default=None, help="output file ('-' = stdout)")
    g.add_argument("--format", choices=["csv", "json"], default=None)
    g.add_argument("--report", default=None, help="write a run report (JSON, with timestamp)")
    g.add_argument("--quiet", action="store_true", help="only warnings and errors on stderr")
    return p


def _add_kinds(p: argparse.ArgumentParser, switching: bool = True, spectral: bool = True,
               switching_default: Optional[str] = "exponential",
               spectral_default: str = "exponential") -> None:
    if switching:
        p.add_argument("--switching", choices=SwitchingKind.values(), default=switching_default,
                       required=switching_default is None)
    if spectral:
        p.add_argument("--spectral", choices=SpectralKind.values(), default=spectral_default)
        p.add_argument("--alpha", type=float, default=None, help="exponential rho_hat coefficient")


def _add_point(p: argparse.ArgumentParser, with_lambda: bool = True, many: bool = False) -> None:
    nargs = "+" if many else None
    p.add_argument("--a", type=float, nargs=nargs, default=None, help="dimensionless Omega*T")
    p.add_argument("--omega", type=float, nargs=nargs, default=None, help="gap in rad/s")
    p.add_argument("--t-window", type=float, nargs=nargs, default=None, help="switching time T in s")
    if with_lambda:
        p.add_argument("--lambda", dest="lam", type=float, nargs=nargs, default=None,
                       help="dimensionless l_n/(cT)")
        p.add_argument("--l-n", type=float, nargs=nargs, default=None, help="nonlocality scale in m")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    ap = argparse.ArgumentParser(prog="detector_response",
                                 description="Finite-time response of a detector coupled to a nonlocal field")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", parents=[common], help="tabulate rho_hat(x)")
    _add_kinds(p, switching=False)
    p.add_argument("--x", type=float, nargs="+", default=None)
    p.add_argument("--x-min", type=float, default=1e-3)
    p.add_argument("--x-max", type=float, default=1e2)
    p.add_argument("--points", type=int, default=51)
    p.set_defaults(handler=cmd_rho)

    p = sub.add_parser("switching", parents=[common], help="tabulate chi, chi~")
    _add_kinds(p, spectral=False, switching_default=None)
    p.add_argument("--x", type=float, nargs="+", default=None)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=33)
    p.set_defaults(handler=cmd_switching)

    p = sub.add_parser("response", parents=[common], help="F_0 and F_m")
    _add_kinds(p, spectral=False)
    _add_point(p, with_lambda=False)
    p.add_argument("--mass", type=float, nargs="+", default=[0.0], help="field mass in units of 1/T")
    p.set_defaults(handler=cmd_response)

    for name, handler, helptext in (("excess", cmd_excess, "F - F_0"),
                                    ("delta", cmd_delta, "relative response (F - F_0)/F_0")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        _add_kinds(p)
        _add_point(p)
        p.set_defaults(handler=handler)

    p = sub.add_parser("sweep", parents=[common], help="Cartesian grid of breakdowns")
    _add_kinds(p)
    _add_point(p, many=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("table1", parents=[common], help="scaling laws per window and regime")
    p.add_argument("--switching", choices=SwitchingKind.values() + ["all"], default="all")
    p.add_argument("--spectral", choices=SpectralKind.values() + ["both"], default="exponential")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-dir", default=None, help="directory for the CSV/JSON pair ($UDW_OUTPUT_DIR)")
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser("fig1", parents=[common], help="delta over (a, lambda) for plotting")
    _add_kinds(p, spectral_default="causal-set")
    p.add_argument("--panels", default="abc")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-dir", default=None, help="directory for the CSV/JSON pair ($UDW_OUTPUT_DIR)")
    p.set_defaults(handler=cmd_fig1)

    p = sub.add_parser("plan", parents=[common], help="counting statistics -> bound on l_n")
    p.add_argument("--species", default="Na-20")
    p.add_argument("--catalog", default=None)
    n = p.add_mutually_exclusive_group(required=True)
    n.add_argument("--atoms", type=float)
    n.add_argument("--grams", type=float)
    p.add_argument("--duration", type=float, required=True, help="observation time in s")
    p.add_argument("--efficiency", type=float, default=1.0)
    w = p.add_mutually_exclusive_group()
    w.add_argument("--omega", type=float, help="gap in rad/s (default: species gamma line)")
    w.add_argument("--omega-mev", type=float, help="gap in MeV")
    p.add_argument("--decay-convention", choices=[c.value for c in DecayConvention], default=None)
    p.add_argument("--criterion", choices=[c.value for c in StatisticsCriterion], default=None)
    p.add_argument("--confound-mass", type=float, nargs="*", default=None, help="candidate masses in MeV")
    p.add_argument("--sig-figs", type=int, default=None)
    p.set_defaults(handler=cmd_plan)
    return ap


def _context(args) -> RunContext:
    cfg = load_config(args.config)
    tol = Tolerance.from_config(cfg, rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                                max_evaluations=args.max_evaluations)
    alpha = getattr(args, "alpha", None)
    alpha = float(alpha) if alpha is not None else float(cfg_get(cfg, "spectral.alpha", 1.0))
    threads = getattr(args, "threads", None)
    if threads is not None and threads == 0:
        raise ConfigError("--threads", "must be nonzero")
    return RunContext(cfg=cfg, tol=tol, settings=EngineSettings.from_config(cfg),
                      thresholds=RegimeThresholds.from_config(cfg), alpha=alpha, threads=threads)


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.quiet:
        set_log_level("WARN")

    handler: Callable[[Any, RunContext], int] = args.handler
    ctx: Optional[RunContext] = None
    try:
        ctx = _context(args)
        code = handler(args, ctx)
    except (ConfigError, PlannerError, SpecialFunctionDomainError, FitError, DivisionGuardError) as e:
        log_error(f"{type(e).__name__}: {e}")
        code = EXIT_CONFIG
    except QuadratureEvaluationError as e:
        log_error(f"{type(e).__name__}: {e}")
        code = EXIT_NOT_CONVERGED
    except DetectorError as e:
        log_error(f"{type(e).__name__}: {e}")
        code = EXIT_INTERNAL
    except Exception as e:
        log_error(f"internal error: {type(e).__name__}: {e}")
        traceback.print_exc(file=sys.stderr)
        code = EXIT_INTERNAL

    if code == EXIT_NOT_CONVERGED:
        log_warn("quadrature did not converge everywhere (see converged/note fields)")
    if args.report:
        save_report(args.report, {"command": args.command, "argv": list(argv or sys.argv[1:]),
                                  "exit_code": code, "files": ctx.files if ctx else []})
    return code


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
