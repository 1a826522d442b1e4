# scripts/quadrature.py
"""
quadrature.py
-------------
Adaptive 1D quadrature (QUADPACK via scipy.integrate.quad) with

  * a uniform result type carrying value, error estimate, evaluation count
    and a convergence flag (non-convergence is reported, never raised),
  * semi-infinite ranges chosen by tail class,
  * log-variable ranges for integrands spread over many decades,
  * polynomial extrapolation of g(eps) to eps -> 0.

NaN/inf from an integrand aborts with QuadratureEvaluationError naming the
abscissa.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from errors import ConfigError, ExtrapolationError, QuadratureEvaluationError
from util import cfg_get

Integrand = Callable[[float], float]

# QUADPACK: 21 Auswertungen pro Teilintervall (Gauss-Kronrod 21)
_EVALS_PER_SUBINTERVAL = 21
_MAX_SUBINTERVALS = 2000
_MAX_PANELS = 64


class TailClass(str, Enum):
    POLYNOMIAL_DECAY = "polynomial-decay"
    COMPACT_SUPPORT = "compact-support"
    EXPONENTIAL_DECAY = "exponential-decay"
    SUPER_EXPONENTIAL_DECAY = "super-exponential-decay"


@dataclass(frozen=True)
class Tolerance:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_evaluations: int = 1_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(name, f"must be finite and > 0, got {v!r}")
        if int(self.max_evaluations) < _EVALS_PER_SUBINTERVAL:
            raise ConfigError("max_evaluations", f"must be >= {_EVALS_PER_SUBINTERVAL}")

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def tightened(self, factor: float = 100.0) -> "Tolerance":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)

    @property
    def subinterval_limit(self) -> int:
        return max(50, min(_MAX_SUBINTERVALS, int(self.max_evaluations) // _EVALS_PER_SUBINTERVAL))

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]], **overrides) -> "Tolerance":
        d = cls()
        kw = dict(
            rel_tol=float(cfg_get(cfg, "quadrature.rel_tol", d.rel_tol)),
            abs_tol=float(cfg_get(cfg, "quadrature.abs_tol", d.abs_tol)),
            max_evaluations=int(float(cfg_get(cfg, "quadrature.max_evaluations", d.max_evaluations))),
        )
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool
    message: str = ""

    @property
    def rel_error_estimate(self) -> float:
        if self.value == 0:
            return 0.0 if self.abs_error_estimate == 0 else math.inf
        return self.abs_error_estimate / abs(self.value)

    @classmethod
    def exact(cls, value: float = 0.0, message: str = "") -> "QuadratureResult":
        return cls(float(value), 0.0, 0, True, message)

    def scaled(self, k: float) -> "QuadratureResult":
        return replace(self, value=self.value * k, abs_error_estimate=self.abs_error_estimate * abs(k))


def combine(parts: Sequence[QuadratureResult], tol: Tolerance, note: str = "") -> QuadratureResult:
    """Sum of piecewise results; re-checks the tolerance on the total."""
    if not parts:
        return QuadratureResult.exact(0.0, note)
    value = math.fsum(p.value for p in parts)
    err = math.fsum(p.abs_error_estimate for p in parts)
    evals = sum(p.evaluations for p in parts)
    msgs = [p.message for p in parts if p.message]
    if note:
        msgs.append(note)
    converged = (all(p.converged for p in parts) and not note
                 and err <= tol.target(value) and evals <= tol.max_evaluations)
    return QuadratureResult(value, err, evals, converged, "; ".join(dict.fromkeys(msgs)))


class _Guarded:
    """Zaehlt Auswertungen und bricht bei NaN/inf ab."""

    def __init__(self, f: Integrand, label: str = "x"):
        self.f = f
        self.label = label
        self.calls = 0

    def __call__(self, x: float) -> float:
        self.calls += 1
        v = float(self.f(x))
        if not math.isfinite(v):
            raise QuadratureEvaluationError(float(x), v, where=f"integrand ({self.label})")
        return v


def _run_quad(f: Integrand, lo: float, hi: float, tol: Tolerance,
              points: Optional[List[float]] = None, **kw) -> QuadratureResult:
    g = _Guarded(f, kw.pop("label", "x"))
    out = quad(g, lo, hi, epsabs=tol.abs_tol, epsrel=tol.rel_tol,
               limit=tol.subinterval_limit, points=points or None, full_output=1, **kw)
    value, err, info = float(out[0]), float(out[1]), out[2]
    message = str(out[3]).splitlines()[0] if len(out) > 3 else ""
    evals = int(info.get("neval", g.calls)) if isinstance(info, dict) else g.calls
    converged = (not message and err <= tol.target(value) and evals <= tol.max_evaluations)
    if not converged and not message:
        message = f"error estimate {err:.3e} above target on [{lo!r}, {hi!r}]"
    return QuadratureResult(value, abs(err), evals, converged, message)


def integrate(f: Integrand, lo: float, hi: float, tol: Optional[Tolerance] = None,
              breakpoints: Iterable[float] = ()) -> QuadratureResult:
    """Adaptive Gauss-Kronrod on a finite interval; endpoints are never evaluated."""
    tol = tol or Tolerance()
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError("lo/hi", f"finite limits required, got [{lo!r}, {hi!r}]")
    if hi < lo:
        raise ConfigError("lo/hi", f"lo must not exceed hi, got [{lo!r}, {hi!r}]")
    if hi == lo:
        return QuadratureResult.exact(0.0)
    pts = sorted({float(p) for p in breakpoints if lo < p < hi})
    return _run_quad(f, lo, hi, tol, pts)


def _split_head(f: Integrand, lo: float, tol: Tolerance, breakpoints: Iterable[float]):
    pts = sorted({float(p) for p in breakpoints if p > lo and math.isfinite(p)})
    if not pts:
        return [], lo
    head = integrate(f, lo, pts[-1], tol, pts[:-1])
    return [head], pts[-1]


def integrate_semi_infinite(f: Integrand, lo: float, tol: Optional[Tolerance] = None,
                            decay_hint: TailClass = TailClass.EXPONENTIAL_DECAY,
                            support_edge: Optional[float] = None, scale: float = 1.0,
                            breakpoints: Iterable[float] = ()) -> QuadratureResult:
    """
    int_lo^inf f. The tail scheme follows decay_hint:

      compact-support           -> finite integral up to support_edge
      polynomial-decay          -> QUADPACK's compactifying map x = lo + (1-t)/t
      (super-)exponential-decay -> panels of doubling width until one is negligible
    """
    tol = tol or Tolerance()
    decay_hint = TailClass(decay_hint)
    lo = float(lo)
    if not math.isfinite(lo):
        raise ConfigError("lo", f"finite lower limit required, got {lo!r}")

    if decay_hint is TailClass.COMPACT_SUPPORT:
        if support_edge is None:
            raise ConfigError("support_edge", "required for compact-support integrands")
        if lo >= support_edge:
            return QuadratureResult.exact(0.0)
        return integrate(f, lo, support_edge, tol, breakpoints)

    parts, start = _split_head(f, lo, tol, breakpoints)

    if decay_hint is TailClass.POLYNOMIAL_DECAY:
        parts.append(_run_quad(f, start, math.inf, tol))
        return combine(parts, tol)

    width = float(scale) if scale > 0 else 1.0
    running = math.fsum(p.value for p in parts)
    for i in range(_MAX_PANELS):
        panel = integrate(f, start, start + width, tol)
        parts.append(panel)
        running += panel.value
        tail_est = abs(panel.value) + panel.abs_error_estimate
        if i >= 1 and tail_est <= tol.target(running):
            # Rest jenseits des letzten Panels <= letztes Panel
            parts.append(QuadratureResult(0.0, abs(panel.value), 0, True))
            return combine(parts, tol)
        start += width
        width *= 2.0
    return combine(parts, tol, note=f"tail estimate above tolerance after {_MAX_PANELS} panels")


def integrate_log_range(f: Integrand, lo: float, hi: float, tol: Optional[Tolerance] = None,
                        breakpoints: Iterable[float] = ()) -> QuadratureResult:
    """int_lo^hi f(s) ds with s = e^t, for 0 < lo < hi spanning many decades."""
    tol = tol or Tolerance()
    if not (lo > 0 and hi > lo):
        raise ConfigError("lo/hi", f"need 0 < lo < hi, got [{lo!r}, {hi!r}]")

    def g(t: float) -> float:
        s = math.exp(t)
        return f(s) * s

    pts = [math.log(p) for p in breakpoints if lo < p < hi]
    return integrate(g, math.log(lo), math.log(hi), tol, pts)


def integrate_oscillatory_tail(f: Integrand, lo: float, omega: float, weight: str = "cos",
                               tol: Optional[Tolerance] = None) -> QuadratureResult:
    """int_lo^inf f(t) w(omega t) dt for w = cos or sin (QUADPACK QAWF)."""
    tol = tol or Tolerance()
    if weight not in ("cos", "sin"):
        raise ConfigError("weight", f"expected 'cos' or 'sin', got {weight!r}")
    if weight == "sin" and omega == 0:
        return QuadratureResult.exact(0.0)
    return _run_quad(f, float(lo), math.inf, tol, weight=weight, wvar=float(omega))


@dataclass(frozen=True)
class ExtrapolationResult:
    value: float
    abs_error_estimate: float
    order: int


def _poly_at_zero(eps: np.ndarray, vals: np.ndarray) -> float:
    v = np.vander(eps, len(eps), increasing=True)
    return float(np.linalg.solve(v, vals)[0])


def extrapolate_to_zero(g: Integrand, seq: Sequence[float]) -> ExtrapolationResult:
    """
    Polynomial (Richardson-type) extrapolation of g(eps) to eps = 0.

    Extrapolant E_k interpolates the k smallest eps; the error estimate is
    |E_n - E_{n-1}|. Growing successive differences count as divergence.
    """
    eps = np.asarray([float(e) for e in seq], dtype=float)
    if eps.size < 3:
        raise ExtrapolationError(f"need at least 3 points, got {eps.size}")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ExtrapolationError("sequence must be positive and strictly decreasing")
    vals = np.asarray([float(g(e)) for e in eps], dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = float(eps[~np.isfinite(vals)][0])
        raise ExtrapolationError(f"g is not finite at eps={bad!r}")

    n = eps.size
    extrapolants = [_poly_at_zero(eps[n - k:], vals[n - k:]) for k in range(1, n + 1)]
    diffs = [abs(extrapolants[k] - extrapolants[k - 1]) for k in range(1, n)]
    noise = 1e3 * np.finfo(float).eps * max(abs(e) for e in extrapolants)
    if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > noise:
        raise ExtrapolationError(
            f"extrapolants diverge: successive differences {diffs[-2]:.3e} -> {diffs[-1]:.3e}"
        )
    return ExtrapolationResult(extrapolants[-1], diffs[-1], n - 1)
