# scripts/regime_analyzer.py
"""
regime_analyzer.py
------------------
Scans (a, lambda) grids through the response engine and fits the scaling
laws of the excess F - F_0 and of delta:

  * table1_scan   : vacuum / short-time / emission rows for each window
  * figure1_sweep : delta for |a| >> 1 and |a| << 1 (both signs) plus a
                    2D (a, lambda) contour grid
  * sweep         : plain Cartesian grid of breakdowns

Grid points are independent and run through joblib; output order is the
grid order whatever the job count. A failing point becomes a row with
converged=False and a note, the scan itself never aborts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from colorama import Fore, Style
from joblib import Parallel, delayed
from scipy.stats import linregress
from tabulate import tabulate

from errors import DetectorError, FitError
from quadrature import Tolerance
from response import MEASURE, EngineSettings, ResponseRequest, response_breakdown
from spectral import SpectralKind, get_spectral
from switching import SwitchingKind, get_switching, tail_power_coefficient
from units import DetectorConfig
from util import cfg_get, env_int, log_info, log_warn

POINT_COLUMNS = ["switching", "spectral", "a", "lambda", "f0", "excess", "delta",
                 "f0_err", "excess_err", "converged", "tag", "note"]


# =========================================================
# Fits
# =========================================================

class FitVariable(str, Enum):
    LAMBDA = "lambda"
    ABS_A = "abs_a"
    T_AT_FIXED_OMEGA = "T-at-fixed-Ω"
    A = "a"
    HALF_A_SQUARED = "a^2/2"


@dataclass(frozen=True)
class ScalingFit:
    variable: FitVariable
    fitted_exponent: float      # slope of ln y (power: vs ln x, log-linear: vs x)
    stderr: float
    r_squared: float
    sample_count: int
    intercept: float = 0.0
    kind: str = "power"


def _fit_line(u: np.ndarray, v: np.ndarray, variable: FitVariable, kind: str) -> ScalingFit:
    if u.size < 4:
        raise FitError(f"need at least 4 samples, got {u.size}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise FitError("non-finite samples")
    if float(np.ptp(u)) <= 1e-12 * max(1.0, float(np.max(np.abs(u)))):
        raise FitError(f"degenerate x-range for {variable.value}")
    r = linregress(u, v)
    r2 = float(r.rvalue) ** 2 if math.isfinite(r.rvalue) else 1.0
    return ScalingFit(variable, float(r.slope), float(r.stderr), min(max(r2, 0.0), 1.0),
                      int(u.size), float(r.intercept), kind)


def _as_xy(samples: Iterable[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(samples), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FitError("samples must be (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def fit_power_law(samples: Iterable[Tuple[float, float]],
                  variable: FitVariable | str = FitVariable.ABS_A) -> ScalingFit:
    """Least-squares slope of ln y against ln x."""
    x, y = _as_xy(samples)
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power-law fit needs strictly positive x and y")
    return _fit_line(np.log(x), np.log(y), FitVariable(variable), "power")


def fit_log_linear(samples: Iterable[Tuple[float, float]],
                   variable: FitVariable | str = FitVariable.A) -> ScalingFit:
    """Least-squares slope of ln y against x (exponential rate)."""
    x, y = _as_xy(samples)
    if np.any(y <= 0):
        raise FitError("log-linear fit needs strictly positive y")
    return _fit_line(x, np.log(y), FitVariable(variable), "log-linear")


@dataclass(frozen=True)
class FitTolerances:
    power: float = 0.05
    rate: float = 0.1
    symmetry_rel: float = 0.01
    flatness: float = 0.25
    a_independence: float = 0.05
    overlap_rel: float = 0.02
    quartering_rel: float = 0.05

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "FitTolerances":
        d = cls()
        return cls(**{k: float(cfg_get(cfg, f"fit_tolerances.{k}", getattr(d, k)))
                      for k in d.__dataclass_fields__})


# =========================================================
# Punkt-Auswertung (parallel)
# =========================================================

@dataclass(frozen=True)
class PointJob:
    a: float
    lam: float
    switching: SwitchingKind
    spectral: SpectralKind
    alpha: float = 1.0
    tol: Tolerance = field(default_factory=Tolerance)
    settings: EngineSettings = field(default_factory=EngineSettings)
    tag: str = ""


@dataclass(frozen=True)
class PointResult:
    switching: str
    spectral: str
    a: float
    lam: float
    f0: float
    excess: float
    delta: float
    f0_err: float
    excess_err: float
    converged: bool
    tag: str = ""
    note: str = ""

    def as_row(self) -> Dict[str, Any]:
        return {"switching": self.switching, "spectral": self.spectral, "a": self.a,
                "lambda": self.lam, "f0": self.f0, "excess": self.excess, "delta": self.delta,
                "f0_err": self.f0_err, "excess_err": self.excess_err,
                "converged": self.converged, "tag": self.tag, "note": self.note}


def evaluate_point(job: PointJob) -> PointResult:
    sw = get_switching(job.switching)
    sp = get_spectral(job.spectral, job.alpha)
    base = dict(switching=sw.kind.value, spectral=sp.kind.value, a=float(job.a),
                lam=float(job.lam), tag=job.tag)
    try:
        b = response_breakdown(ResponseRequest(job.a, job.lam, sw, sp, job.tol), settings=job.settings)
    except DetectorError as e:
        return PointResult(f0=math.nan, excess=math.nan, delta=math.nan, f0_err=math.nan,
                           excess_err=math.nan, converged=False, note=f"{type(e).__name__}: {e}", **base)
    return PointResult(f0=b.f0, excess=b.excess, delta=b.delta, f0_err=b.f0_err,
                       excess_err=b.excess_err, converged=b.converged, note=b.message, **base)


def default_threads() -> int:
    n = env_int("UDW_THREADS", 0)
    return n if n > 0 else -1


def run_points(jobs: Sequence[PointJob], threads: Optional[int] = None) -> List[PointResult]:
    """Evaluates jobs in grid order; threads=None -> $UDW_THREADS or all cores."""
    if not jobs:
        return []
    n_jobs = default_threads() if threads is None else int(threads)
    if n_jobs == 1 or len(jobs) == 1:
        results = [evaluate_point(j) for j in jobs]
    else:
        results = Parallel(n_jobs=n_jobs)(delayed(evaluate_point)(j) for j in jobs)
    bad = sum(1 for r in results if not r.converged)
    if bad:
        log_warn(f"{bad}/{len(results)} grid points not converged")
    return list(results)


def points_frame(points: Sequence[PointResult]) -> pd.DataFrame:
    return pd.DataFrame([p.as_row() for p in points], columns=POINT_COLUMNS)


def sweep(a_values: Sequence[float], lam_values: Sequence[float],
          switching: SwitchingKind | str, spectral: SpectralKind | str, alpha: float = 1.0,
          tol: Optional[Tolerance] = None, settings: Optional[EngineSettings] = None,
          threads: Optional[int] = None) -> List[PointResult]:
    """Cartesian (a, lambda) grid, a-major order."""
    sw, sp = SwitchingKind.parse(switching), SpectralKind.parse(spectral)
    tol, settings = tol or Tolerance(), settings or EngineSettings()
    jobs = [PointJob(float(a), float(lam), sw, sp, alpha, tol, settings, "sweep")
            for a in a_values for lam in lam_values]
    return run_points(jobs, threads)


def sweep_configs(configs: Sequence[DetectorConfig], switching: SwitchingKind | str,
                  spectral: SpectralKind | str, alpha: float = 1.0,
                  tol: Optional[Tolerance] = None, settings: Optional[EngineSettings] = None,
                  threads: Optional[int] = None) -> List[PointResult]:
    """Same as sweep, for physical (Omega, T, l_n) configs in the given order."""
    sw, sp = SwitchingKind.parse(switching), SpectralKind.parse(spectral)
    tol, settings = tol or Tolerance(), settings or EngineSettings()
    jobs = [PointJob(c.a, c.lam, sw, sp, alpha, tol, settings, "sweep") for c in configs]
    return run_points(jobs, threads)


def delta_coefficient(req: ResponseRequest, settings: Optional[EngineSettings] = None) -> float:
    """delta / (lam a)^2: the O(1) coefficient that asymptotic_delta leaves out."""
    b = response_breakdown(req, settings=settings)
    scale = (float(req.lam) * float(req.a)) ** 2
    if scale == 0 or not math.isfinite(b.delta):
        return math.nan
    return b.delta / scale


# =========================================================
# Table 1
# =========================================================

class Row(str, Enum):
    VACUUM = "vacuum"
    SHORT_TIME = "short-time"
    EMISSION = "emission"


PREDICTED_FORMS = {
    (Row.VACUUM, SwitchingKind.EXPONENTIAL): "≈ λ² (weak a-dependence)",
    (Row.VACUUM, SwitchingKind.SINC): "0",
    (Row.VACUUM, SwitchingKind.LORENTZIAN): "λ² e^{-2a}",
    (Row.VACUUM, SwitchingKind.GAUSSIAN): "λ² e^{-a²/2} / a⁴",
    (Row.SHORT_TIME, SwitchingKind.EXPONENTIAL): "≈ λ²",
    (Row.SHORT_TIME, SwitchingKind.SINC): "λ²",
    (Row.SHORT_TIME, SwitchingKind.LORENTZIAN): "λ²",
    (Row.SHORT_TIME, SwitchingKind.GAUSSIAN): "λ²",
}


def predicted_form(row: Row, kind: SwitchingKind) -> str:
    if row is Row.EMISSION:
        return "λ² |a|³  (T l_n² |Ω|³)"
    return PREDICTED_FORMS[(row, kind)]


def _floats(xs) -> List[float]:
    return [float(x) for x in xs]


@dataclass(frozen=True)
class Table1Grid:
    # emission
    emission_abs_a: Tuple[float, ...] = (1e2, 10 ** 2.5, 1e3, 10 ** 3.5, 1e4)
    emission_lambda_abs_a: float = 1e-6          # lambda * max|a| for the |a| fit
    emission_lambda_fit_a: float = -1e3
    emission_lambda_products: Tuple[float, ...] = (1e-7, 10 ** -6.5, 1e-6, 10 ** -5.5, 1e-5)
    emission_t_ref_a: float = -1e2
    emission_t_ref_lambda: float = 1e-8
    emission_t_factors: Tuple[float, ...] = (1.0, 10 ** 0.5, 10.0, 10 ** 1.5, 100.0)
    # short time
    short_abs_a: Tuple[float, ...] = (1e-4, 10 ** -3.5, 1e-3, 10 ** -2.5, 1e-2)
    short_lambda: float = 1e-5
    short_lambda_fit_a: float = 1e-3
    short_lambdas: Tuple[float, ...] = (1e-6, 10 ** -5.5, 1e-5, 10 ** -4.5, 1e-4)
    short_symmetry_max_abs_a: float = 1e-3
    # vacuum
    vacuum_a: Tuple[float, ...] = tuple(float(a) for a in range(2, 13))
    vacuum_lambda: float = 1e-5
    vacuum_lambda_fit_a: float = 4.0
    vacuum_lambdas: Tuple[float, ...] = (1e-6, 10 ** -5.5, 1e-5, 10 ** -4.5, 1e-4)
    lorentzian_fit_window: Tuple[float, float] = (2.0, 10.0)
    gaussian_fit_window: Tuple[float, float] = (2.0, 8.0)
    sinc_zero_min_a: float = 1.5

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "Table1Grid":
        d = cls()
        kw: Dict[str, Any] = {}
        for name, default in d.__dict__.items():
            v = cfg_get(cfg, f"table1.{name}", None)
            if v is None:
                kw[name] = default
            elif isinstance(default, tuple):
                kw[name] = tuple(_floats(v))
            else:
                kw[name] = float(v)
        return cls(**kw)


@dataclass(frozen=True)
class CellCheck:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class Table1Cell:
    switching: str
    spectral: str
    row: Row
    predicted_form: str
    fits: List[ScalingFit]
    checks: List[CellCheck]
    passed: bool


@dataclass(frozen=True)
class Table1Report:
    spectral: str
    cells: List[Table1Cell]
    points: List[PointResult]
    passed: bool
    comparison: List[CellCheck] = field(default_factory=list)


def _within(name: str, measured: float, expected: float, tol: float, note: str = "") -> CellCheck:
    ok = math.isfinite(measured) and abs(measured - expected) <= tol
    return CellCheck(name, measured, expected, tol, bool(ok), note)


def _emission_jobs(kind, sp, alpha, grid: Table1Grid, tol, settings) -> List[PointJob]:
    lam_fixed = grid.emission_lambda_abs_a / max(grid.emission_abs_a)
    jobs = [PointJob(-abs_a, lam_fixed, kind, sp, alpha, tol, settings, "emission:abs_a")
            for abs_a in grid.emission_abs_a]
    a_fix = grid.emission_lambda_fit_a
    jobs += [PointJob(a_fix, p / abs(a_fix), kind, sp, alpha, tol, settings, "emission:lambda")
             for p in grid.emission_lambda_products]
    jobs += [PointJob(grid.emission_t_ref_a * k, grid.emission_t_ref_lambda / k, kind, sp, alpha,
                      tol, settings, "emission:T") for k in grid.emission_t_factors]
    return jobs


def _short_jobs(kind, sp, alpha, grid: Table1Grid, tol, settings) -> List[PointJob]:
    jobs = [PointJob(grid.short_lambda_fit_a, lam, kind, sp, alpha, tol, settings, "short:lambda")
            for lam in grid.short_lambdas]
    for abs_a in grid.short_abs_a:
        jobs.append(PointJob(-abs_a, grid.short_lambda, kind, sp, alpha, tol, settings, "short:a-"))
        jobs.append(PointJob(abs_a, grid.short_lambda, kind, sp, alpha, tol, settings, "short:a+"))
    return jobs


def _vacuum_jobs(kind, sp, alpha, grid: Table1Grid, tol, settings) -> List[PointJob]:
    jobs = [PointJob(a, grid.vacuum_lambda, kind, sp, alpha, tol, settings, "vacuum:a")
            for a in grid.vacuum_a]
    if kind is not SwitchingKind.SINC:
        jobs += [PointJob(grid.vacuum_lambda_fit_a, lam, kind, sp, alpha, tol, settings, "vacuum:lambda")
                 for lam in grid.vacuum_lambdas]
    return jobs


def _safe_fit(fn, samples, variable) -> Tuple[Optional[ScalingFit], str]:
    try:
        return fn(samples, variable), ""
    except FitError as e:
        return None, str(e)


def _fit_check(name, fit: Optional[ScalingFit], expected, tol, err: str) -> CellCheck:
    if fit is None:
        return CellCheck(name, math.nan, expected, tol, False, err)
    return _within(name, fit.fitted_exponent, expected, tol, f"r²={fit.r_squared:.6f}")


def expected_lambda_exponent(kind: SwitchingKind | str, pts: Sequence[PointResult],
                             measure: float = MEASURE) -> float:
    """
    Expected slope of ln excess vs ln lambda at the given points.

    For chi~^2 ~ C/w^4 the inner integral falls like C/(3 m^2), so the
    normalised excess N picks up (2C/3) plateau ln(1/lam) / I_0 and
    d ln N / d ln lam = -(2C/3) plateau measure lam^2 / excess. Averaged
    over the points; exactly 2 for the faster tails.
    """
    c = tail_power_coefficient(kind)
    if c == 0.0:
        return 2.0
    shifts = [2.0 * c / 3.0 * get_spectral(p.spectral).plateau * measure * p.lam ** 2 / p.excess
              for p in pts if math.isfinite(p.excess) and p.excess > 0]
    if not shifts:
        return 2.0
    return 2.0 - math.fsum(shifts) / len(shifts)


def _emission_cell(kind, pts: List[PointResult], ft: FitTolerances) -> Tuple[List[ScalingFit], List[CellCheck]]:
    fits, checks = [], []
    by = lambda tag: [p for p in pts if p.tag == tag]
    f, e = _safe_fit(fit_power_law, [(abs(p.a), p.excess) for p in by("emission:abs_a")], FitVariable.ABS_A)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs |a| (fixed λ)", f, 3.0, ft.power, e))

    lam_pts = by("emission:lambda")
    f, e = _safe_fit(fit_power_law, [(p.lam, p.excess) for p in lam_pts], FitVariable.LAMBDA)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs λ", f, 2.0, ft.power, e))
    f, e = _safe_fit(fit_power_law, [(p.lam, p.delta) for p in lam_pts], FitVariable.LAMBDA)
    fits += [f] if f else []
    checks.append(_fit_check("Δ vs λ", f, 2.0, ft.power, e))

    # T ~ |a| bei festem Omega, l_n
    t_pts = by("emission:T")
    f, e = _safe_fit(fit_power_law, [(abs(p.a), p.excess) for p in t_pts], FitVariable.T_AT_FIXED_OMEGA)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs T (fixed Ω, l_n)", f, 1.0, ft.power, e))
    f, e = _safe_fit(fit_power_law, [(abs(p.a), p.delta) for p in t_pts], FitVariable.T_AT_FIXED_OMEGA)
    fits += [f] if f else []
    checks.append(_fit_check("Δ vs T (fixed Ω, l_n)", f, 0.0, ft.power, e))
    return fits, checks


def _short_cell(kind, pts, grid: Table1Grid, ft: FitTolerances):
    fits, checks = [], []
    lam_pts = [p for p in pts if p.tag == "short:lambda"]
    f, e = _safe_fit(fit_power_law, [(p.lam, p.excess) for p in lam_pts], FitVariable.LAMBDA)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs λ", f, expected_lambda_exponent(kind, lam_pts), ft.power, e))

    neg = {abs(p.a): p for p in pts if p.tag == "short:a-"}
    pos = {abs(p.a): p for p in pts if p.tag == "short:a+"}
    f, e = _safe_fit(fit_power_law, [(k, neg[k].excess) for k in sorted(neg)], FitVariable.ABS_A)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs |a| (a-independence)", f, 0.0, ft.a_independence, e))

    worst, worst_all = 0.0, 0.0
    for k in sorted(neg):
        if k not in pos:
            continue
        mean = 0.5 * (neg[k].excess + pos[k].excess)
        asym = abs(neg[k].excess - pos[k].excess) / mean if mean > 0 else math.nan
        worst_all = max(worst_all, asym) if math.isfinite(asym) else math.nan
        if k <= grid.short_symmetry_max_abs_a * (1 + 1e-12):
            worst = max(worst, asym) if math.isfinite(asym) else math.nan
    checks.append(CellCheck("sign symmetry excess(a) vs excess(-a)", worst, 0.0, ft.symmetry_rel,
                            bool(math.isfinite(worst) and worst <= ft.symmetry_rel),
                            f"|a| <= {grid.short_symmetry_max_abs_a:g}; max over full grid {worst_all:.4f}"))
    return fits, checks


def _vacuum_cell(kind, pts, grid: Table1Grid, ft: FitTolerances, tol: Tolerance):
    fits, checks = [], []
    a_pts = sorted((p for p in pts if p.tag == "vacuum:a"), key=lambda p: p.a)

    if kind is SwitchingKind.SINC:
        zs = [abs(p.excess) for p in a_pts if p.a >= grid.sinc_zero_min_a]
        worst = max(zs) if zs else math.nan
        checks.append(CellCheck("excess = 0", worst, 0.0, tol.abs_tol,
                                bool(zs) and all(math.isfinite(z) and z <= tol.abs_tol for z in zs),
                                f"a >= {grid.sinc_zero_min_a:g}"))
        return fits, checks

    if kind is SwitchingKind.LORENTZIAN:
        lo, hi = grid.lorentzian_fit_window
        f, e = _safe_fit(fit_log_linear, [(p.a, p.excess) for p in a_pts if lo <= p.a <= hi], FitVariable.A)
        fits += [f] if f else []
        checks.append(_fit_check("ln excess vs a", f, -2.0, ft.rate, e))
    elif kind is SwitchingKind.GAUSSIAN:
        lo, hi = grid.gaussian_fit_window
        sel = [p for p in a_pts if lo <= p.a <= hi and p.excess > 0]
        f, e = _safe_fit(fit_log_linear, [(0.5 * p.a ** 2, p.a ** 4 * p.excess) for p in sel],
                         FitVariable.HALF_A_SQUARED)
        fits += [f] if f else []
        checks.append(_fit_check("ln(a⁴ excess) vs a²/2", f, -1.0, ft.rate, e))
    else:
        f, e = _safe_fit(fit_power_law, [(p.a, p.excess) for p in a_pts], FitVariable.A)
        fits += [f] if f else []
        checks.append(_fit_check("excess vs a (power, weak dependence)", f, 0.0, ft.flatness, e))

    lam_pts = [p for p in pts if p.tag == "vacuum:lambda"]
    f, e = _safe_fit(fit_power_law, [(p.lam, p.excess) for p in lam_pts], FitVariable.LAMBDA)
    fits += [f] if f else []
    checks.append(_fit_check("excess vs λ", f, expected_lambda_exponent(kind, lam_pts), ft.power, e))

    # lange Zeiten: keine Klicks
    xs = [p.excess for p in a_pts]
    mono = all(b <= a for a, b in zip(xs, xs[1:]))
    checks.append(CellCheck("excess decreasing in a", float(mono), 1.0, 0.0, bool(mono)))
    return fits, checks


def table1_scan(switching: SwitchingKind | str | Sequence | None, spectral: SpectralKind | str,
                grid: Optional[Table1Grid] = None, tol: Optional[Tolerance] = None,
                fit_tol: Optional[FitTolerances] = None, alpha: float = 1.0,
                settings: Optional[EngineSettings] = None,
                threads: Optional[int] = None) -> Table1Report:
    """
    Vacuum, short-time and emission rows for the requested window(s)
    (None -> all four, i.e. 12 cells) under one spectral kind.
    """
    if switching is None:
        kinds = list(SwitchingKind)
    elif isinstance(switching, (str, SwitchingKind)):
        kinds = [SwitchingKind.parse(switching)]
    else:
        kinds = [SwitchingKind.parse(k) for k in switching]
    sp = SpectralKind.parse(spectral)
    grid, tol = grid or Table1Grid(), tol or Tolerance()
    fit_tol, settings = fit_tol or FitTolerances(), settings or EngineSettings()

    jobs: List[PointJob] = []
    for kind in kinds:
        jobs += _vacuum_jobs(kind, sp, alpha, grid, tol, settings)
        jobs += _short_jobs(kind, sp, alpha, grid, tol, settings)
        jobs += _emission_jobs(kind, sp, alpha, grid, tol, settings)
    log_info(f"table1: {len(kinds)} window(s) x {sp.value}, {len(jobs)} grid points")
    points = run_points(jobs, threads)

    cells: List[Table1Cell] = []
    for kind in kinds:
        own = [p for p in points if p.switching == kind.value]
        for row, builder in ((Row.VACUUM, lambda ps: _vacuum_cell(kind, ps, grid, fit_tol, tol)),
                             (Row.SHORT_TIME, lambda ps: _short_cell(kind, ps, grid, fit_tol)),
                             (Row.EMISSION, lambda ps: _emission_cell(kind, ps, fit_tol))):
            prefix = {Row.VACUUM: "vacuum:", Row.SHORT_TIME: "short:", Row.EMISSION: "emission:"}[row]
            row_pts = [p for p in own if p.tag.startswith(prefix)]
            fits, checks = builder(row_pts)
            unconverged = [p for p in row_pts if not p.converged]
            if unconverged:
                checks.append(CellCheck("all points converged", float(len(unconverged)), 0.0, 0.0, False,
                                        unconverged[0].note))
            cells.append(Table1Cell(kind.value, sp.value, row, predicted_form(row, kind),
                                    fits, checks, all(c.passed for c in checks)))
    return Table1Report(sp.value, cells, points, all(c.passed for c in cells))


def compare_spectral_kinds(first: Table1Report, second: Table1Report,
                           fit_tol: Optional[FitTolerances] = None) -> List[CellCheck]:
    """Fitted exponents per cell must agree between two spectral kinds."""
    fit_tol = fit_tol or FitTolerances()
    index = {(c.switching, c.row): c for c in second.cells}
    out: List[CellCheck] = []
    for c in first.cells:
        other = index.get((c.switching, c.row))
        if other is None:
            continue
        for fa, fb in zip(c.fits, other.fits):
            if fa.variable != fb.variable:
                continue
            tol = fit_tol.rate if fa.kind == "log-linear" else fit_tol.power
            out.append(_within(f"{c.switching}/{c.row.value}: {fa.variable.value}",
                               fa.fitted_exponent - fb.fitted_exponent, 0.0, tol,
                               f"{first.spectral}={fa.fitted_exponent:.4f} {second.spectral}={fb.fitted_exponent:.4f}"))
    return out


def format_table1(report: Table1Report) -> str:
    """Konsolen-Zusammenfassung (tabulate + colorama)."""
    rows = []
    for c in report.cells:
        status = f"{Fore.GREEN}PASS{Style.RESET_ALL}" if c.passed else f"{Fore.RED}FAIL{Style.RESET_ALL}"
        exps = ", ".join(f"{f.variable.value}:{f.fitted_exponent:+.3f}" for f in c.fits) or "-"
        rows.append([c.switching, c.row.value, c.predicted_form, exps, status])
    head = f"Table 1 ({report.spectral})"
    return head + "\n" + tabulate(rows, headers=["switching", "row", "predicted", "fitted", "status"])


# =========================================================
# Figure 1
# =========================================================

@dataclass(frozen=True)
class Figure1Axes:
    panel_a_abs_a: Tuple[float, ...] = (1e2, 10 ** 2.5, 1e3, 10 ** 3.5, 1e4)
    panel_a_lambdas: Tuple[float, ...] = (2e-8, 1e-8)
    panel_b_abs_a: Tuple[float, ...] = (1e-4, 10 ** -3.5, 1e-3)
    panel_b_lambdas: Tuple[float, ...] = (1e-4,)
    panel_c_log10_abs_a: Tuple[float, ...] = (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0)
    panel_c_log10_lambda: Tuple[float, ...] = (-9.0, -8.0, -7.0, -6.0)

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "Figure1Axes":
        d = cls()
        return cls(**{name: tuple(_floats(cfg_get(cfg, f"figure1.{name}", default)))
                      for name, default in d.__dict__.items()})


@dataclass(frozen=True)
class Figure1Data:
    switching: str
    spectral: str
    points: List[PointResult]
    checks: List[CellCheck]
    passed: bool


def figure1_sweep(switching: SwitchingKind | str = SwitchingKind.EXPONENTIAL,
                  spectral: SpectralKind | str = SpectralKind.CAUSAL_SET,
                  axes: Optional[Figure1Axes] = None, panels: Sequence[str] = ("a", "b", "c"),
                  tol: Optional[Tolerance] = None, fit_tol: Optional[FitTolerances] = None,
                  alpha: float = 1.0, settings: Optional[EngineSettings] = None,
                  threads: Optional[int] = None) -> Figure1Data:
    """(a, lambda, delta) triples for the three panels plus overlap/quartering checks."""
    kind, sp = SwitchingKind.parse(switching), SpectralKind.parse(spectral)
    axes, tol = axes or Figure1Axes(), tol or Tolerance()
    fit_tol, settings = fit_tol or FitTolerances(), settings or EngineSettings()

    jobs: List[PointJob] = []
    mk = lambda a, lam, tag: PointJob(a, lam, kind, sp, alpha, tol, settings, tag)
    if "a" in panels:
        jobs += [mk(s * x, lam, f"a:{'+' if s > 0 else '-'}")
                 for lam in axes.panel_a_lambdas for s in (1.0, -1.0) for x in axes.panel_a_abs_a]
    if "b" in panels:
        jobs += [mk(s * x, lam, f"b:{'+' if s > 0 else '-'}")
                 for lam in axes.panel_b_lambdas for s in (1.0, -1.0) for x in axes.panel_b_abs_a]
    if "c" in panels:
        jobs += [mk(s * 10 ** la, 10 ** ll, "c")
                 for ll in axes.panel_c_log10_lambda for s in (-1.0, 1.0) for la in axes.panel_c_log10_abs_a]
    log_info(f"fig1: {kind.value} x {sp.value}, panels {''.join(panels)}, {len(jobs)} grid points")
    points = run_points(jobs, threads)

    checks: List[CellCheck] = []
    if "b" in panels:
        worst = 0.0
        for p in (q for q in points if q.tag == "b:+"):
            twin = next((q for q in points if q.tag == "b:-" and q.lam == p.lam and q.a == -p.a), None)
            if twin is None or not (math.isfinite(p.delta) and math.isfinite(twin.delta)):
                worst = math.nan
                break
            worst = max(worst, abs(p.delta - twin.delta) / (0.5 * (p.delta + twin.delta)))
        checks.append(CellCheck("panel b: Δ(a) = Δ(-a)", worst, 0.0, fit_tol.overlap_rel,
                                bool(math.isfinite(worst) and worst <= fit_tol.overlap_rel)))
    if "a" in panels and len(axes.panel_a_lambdas) >= 2:
        lam_hi, lam_lo = max(axes.panel_a_lambdas), min(axes.panel_a_lambdas)
        expected = (lam_hi / lam_lo) ** 2
        worst = 0.0
        for p in (q for q in points if q.tag == "a:-" and q.lam == lam_hi):
            twin = next((q for q in points if q.tag == "a:-" and q.lam == lam_lo and q.a == p.a), None)
            ratio = p.delta / twin.delta if twin and twin.delta > 0 else math.nan
            dev = abs(ratio / expected - 1.0) if math.isfinite(ratio) else math.nan
            worst = max(worst, dev) if math.isfinite(dev) else math.nan
            if not math.isfinite(worst):
                break
        checks.append(CellCheck(f"panel a: Δ ratio for λ ratio {lam_hi / lam_lo:g}", worst, 0.0,
                                fit_tol.quartering_rel,
                                bool(math.isfinite(worst) and worst <= fit_tol.quartering_rel),
                                f"expected ratio {expected:g}"))
    return Figure1Data(kind.value, sp.value, points, checks, all(c.passed for c in checks))
