# scripts/response.py
"""
response.py
-----------
Finite-time response of an inertial detector in dimensionless variables
(a = Omega T, lam = l_n/(cT)), computed in momentum space:

  F_m(a)  = K int_m^inf sqrt(w^2 - m^2) chi~^2(w + a) dw,     K = 1/(4 pi^2)
  F_0(a)  = K int_a^inf (x - a) chi~^2(x) dx
  excess  = lam^2 int_0^inf ds rho_hat(lam^2 s) F_sqrt(s)(a)
  delta   = excess / F_0

K comes from the measure d^3k / ((2pi)^3 2w) with theta(k^0); it cancels
in delta, which is computed from the unscaled integrals.

Inner integrals run in x = w + a (the argument of chi~) and are normalised
by chi~^2 at the lower edge (or at the peak); the outer m^2 integral is
normalised by the massless integral. Absolute tolerances therefore act
relative to the local scale, also deep in vacuum tails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from errors import ConfigError, DivisionGuardError
from quadrature import (QuadratureResult, TailClass, Tolerance, combine, integrate,
                        integrate_log_range)
from spectral import SpectralFunction
from switching import SwitchingLike
from units import C_LIGHT, RegimeTag, RegimeThresholds, regime_from_groups
from util import cfg_get, log_warn

MEASURE = 1.0 / (4.0 * math.pi ** 2)


@dataclass(frozen=True)
class EngineSettings:
    window_rel: float = 1e-32          # chi~^2 cut relative to its reference value
    peak_padding: float = 8.0          # breakpoints at +-padding around the chi~ peak
    inner_tightening: float = 10.0     # inner tolerance = outer / factor
    linear_span: float = 4.0           # m^2 range past (|a|+padding)^2 before going logarithmic

    def __post_init__(self):
        if not (0.0 < self.window_rel < 1e-8):
            raise ConfigError("window_rel", f"must lie in (0, 1e-8), got {self.window_rel!r}")
        for name in ("peak_padding", "inner_tightening", "linear_span"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, "must be > 0")

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "EngineSettings":
        d = cls()
        return cls(
            window_rel=float(cfg_get(cfg, "engine.window_rel", d.window_rel)),
            peak_padding=float(cfg_get(cfg, "engine.peak_padding", d.peak_padding)),
            inner_tightening=float(cfg_get(cfg, "engine.inner_tightening", d.inner_tightening)),
            linear_span=float(cfg_get(cfg, "engine.linear_span", d.linear_span)),
        )


@dataclass(frozen=True)
class ResponseRequest:
    a: float
    lam: float
    switching: SwitchingLike
    spectral: SpectralFunction
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        if not math.isfinite(float(self.a)):
            raise ConfigError("a", f"must be finite, got {self.a!r}")
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam >= 0):
            raise ConfigError("lambda", f"must be finite and >= 0, got {self.lam!r}")


@dataclass(frozen=True)
class ResponseBreakdown:
    f0: float
    excess: float
    delta: float
    f0_err: float
    excess_err: float
    delta_err: float
    converged: bool
    regime: RegimeTag
    evaluations: int
    message: str = ""


# =========================================================
# Innere Integrale
# =========================================================

def _inner_range(a: float, m: float, sw: SwitchingLike, rel: float):
    """[lower, upper] in x = w + a outside which chi~^2 is negligible; None if empty."""
    x_lo = m + a
    tail = sw.tail_class
    if tail is TailClass.COMPACT_SUPPORT:
        r = float(sw.support_radius)
        if x_lo >= r:
            return None
        return max(x_lo, -r), r
    if tail is TailClass.POLYNOMIAL_DECAY:
        return x_lo, math.inf
    upper = sw.window_upper(max(x_lo, 0.0), rel)
    lower = max(x_lo, -sw.window_upper(0.0, rel))
    if lower >= upper:
        return None
    return lower, upper


def _massive_raw(a: float, m: float, sw: SwitchingLike, tol: Tolerance,
                 settings: EngineSettings) -> QuadratureResult:
    """int_m^inf sqrt(w^2 - m^2) chi~^2(w + a) dw without the measure constant."""
    rng = _inner_range(a, m, sw, settings.window_rel)
    if rng is None:
        return QuadratureResult.exact(0.0)
    lower, upper = rng
    ref = sw.fourier_sq(max(lower, 0.0))
    if ref == 0.0:
        return QuadratureResult.exact(0.0, "chi~^2 underflow")

    def h(x: float) -> float:
        w = x - a
        return math.sqrt(max((w - m) * (w + m), 0.0)) * (sw.fourier_sq(x) / ref)

    pad = settings.peak_padding
    bps = [0.0, -pad, pad, max(m, abs(a)) + a]
    if math.isinf(upper):
        res = _polynomial_tail_split(h, lower, m, tol, bps, pad)
    else:
        res = integrate(h, lower, upper, tol, bps)
    return res.scaled(ref)


def _polynomial_tail_split(h: Callable[[float], float], lower: float, m: float, tol: Tolerance,
                           bps: List[float], pad: float) -> QuadratureResult:
    """
    Kopf [lower, x_h] direkt, Rest ueber x = x_h / u auf (0, 1].

    h faellt wie 1/x^3; im Kopf liegen Peak und Massenschwelle, der
    Rest ist in u glatt und verschwindet bei u -> 0 linear.
    """
    x_h = max(lower, 0.0) + pad * max(m, 1.0)
    head = integrate(h, lower, x_h, tol, bps)

    def tail(u: float) -> float:
        if u <= 0.0:
            return 0.0
        x = x_h / u
        if x > 1e100:
            return 0.0
        return h(x) * x_h / (u * u)

    rest = integrate(tail, 0.0, 1.0, tol)
    return combine([head, rest], tol)


def _check_mass(m: float) -> float:
    m = float(m)
    if not (math.isfinite(m) and m >= 0):
        raise ConfigError("m", f"must be finite and >= 0, got {m!r}")
    return m


def response_massless(a: float, switching: SwitchingLike, tol: Optional[Tolerance] = None,
                      settings: Optional[EngineSettings] = None,
                      measure: float = MEASURE) -> QuadratureResult:
    if not math.isfinite(float(a)):
        raise ConfigError("a", f"must be finite, got {a!r}")
    return _massive_raw(float(a), 0.0, switching, tol or Tolerance(),
                        settings or EngineSettings()).scaled(measure)


def response_massive(a: float, m: float, switching: SwitchingLike, tol: Optional[Tolerance] = None,
                     settings: Optional[EngineSettings] = None,
                     measure: float = MEASURE) -> QuadratureResult:
    if not math.isfinite(float(a)):
        raise ConfigError("a", f"must be finite, got {a!r}")
    return _massive_raw(float(a), _check_mass(m), switching, tol or Tolerance(),
                        settings or EngineSettings()).scaled(measure)


# =========================================================
# m^2-Integral
# =========================================================

def _mass_cutoff(a: float, sw: SwitchingLike, rel: float) -> float:
    """m beyond which F_m is negligible against F_0."""
    tail = sw.tail_class
    if tail is TailClass.COMPACT_SUPPORT:
        return max(float(sw.support_radius) - a, 0.0)
    if tail is TailClass.POLYNOMIAL_DECAY:
        return math.inf
    return max(sw.window_upper(max(a, 0.0), rel) - a, 0.0)


@dataclass
class _InnerStats:
    evaluations: int = 0
    max_rel_err: float = 0.0
    failures: int = 0
    first_message: str = ""

    def add(self, r: QuadratureResult) -> None:
        self.evaluations += r.evaluations
        if r.value != 0:
            self.max_rel_err = max(self.max_rel_err, r.abs_error_estimate / abs(r.value))
        if not r.converged:
            self.failures += 1
            if not self.first_message:
                self.first_message = r.message


def _excess_normalised(req: ResponseRequest, i0: QuadratureResult,
                       settings: EngineSettings) -> QuadratureResult:
    """int ds rho_hat(lam^2 s) F_sqrt(s) / F_0 (unscaled, without lam^2)."""
    a, lam, sw, sp, tol = float(req.a), float(req.lam), req.switching, req.spectral, req.tol
    if lam == 0.0 or i0.value == 0.0:
        return QuadratureResult.exact(0.0)

    inner_tol = tol.tightened(settings.inner_tightening)
    s_rho = sp.cutoff(tol.abs_tol) / (lam * lam)
    s_chi = _mass_cutoff(a, sw, settings.window_rel) ** 2
    # jenseits s_hi deckt die m^2-Restabschaetzung unten die Luecke
    s_hi = min(s_rho, s_chi)
    if not s_hi > 0:
        return QuadratureResult.exact(0.0)

    stats = _InnerStats()
    lam2 = lam * lam

    def h(s: float) -> float:
        r = _massive_raw(a, math.sqrt(s), sw, inner_tol, settings)
        stats.add(r)
        if r.value == 0.0:
            return 0.0
        return sp.rho_hat(lam2 * s) * (r.value / i0.value)

    abs_a, pad = abs(a), settings.peak_padding
    knots = [(abs_a + pad) ** 2]
    if a < 0:
        knots.append(a * a)
        if abs_a > pad:
            knots.append((abs_a - pad) ** 2)
    s_lin = min(s_hi, settings.linear_span * (abs_a + pad) ** 2)

    parts: List[QuadratureResult] = [integrate(h, 0.0, s_lin, tol, knots)]
    if s_hi > s_lin:
        parts.append(integrate_log_range(h, s_lin, s_hi, tol))

    value = math.fsum(p.value for p in parts)
    outer_err = math.fsum(p.abs_error_estimate for p in parts)
    evals = sum(p.evaluations for p in parts) + stats.evaluations
    messages = [p.message for p in parts if p.message]
    converged = all(p.converged for p in parts)

    if stats.failures:
        converged = False
        messages.append(f"{stats.failures} inner integrals not converged ({stats.first_message})")

    # Restbeitrag jenseits s_hi grob: h(s_hi) * s_hi
    tail_est = abs(h(s_hi)) * s_hi if math.isfinite(s_hi) else math.inf
    if tail_est > tol.target(value):
        converged = False
        messages.append(f"m^2 truncation at s={s_hi:.6g} not justified (tail ~ {tail_est:.3e})")
        log_warn(f"excess a={a!r} lam={lam!r}: m^2 tail {tail_est:.3e} above target")

    err = outer_err + stats.max_rel_err * abs(value) + (tail_est if math.isfinite(tail_est) else 0.0)
    return QuadratureResult(value, err, evals, converged, "; ".join(dict.fromkeys(messages)))


def nonlocal_excess(req: ResponseRequest, settings: Optional[EngineSettings] = None,
                    measure: float = MEASURE) -> QuadratureResult:
    """F - F_0 = lam^2 K int_0^inf ds rho_hat(lam^2 s) int_m^inf ... ; exactly 0 at lam = 0."""
    settings = settings or EngineSettings()
    if float(req.lam) == 0.0:
        return QuadratureResult.exact(0.0)
    i0 = _massive_raw(float(req.a), 0.0, req.switching, req.tol, settings)
    norm = _excess_normalised(req, i0, settings)
    scale = measure * float(req.lam) ** 2 * i0.value
    res = norm.scaled(scale)
    rel0 = i0.rel_error_estimate if i0.value else 0.0
    messages = [m for m in (res.message, i0.message and f"F_0: {i0.message}") if m]
    return QuadratureResult(res.value, res.abs_error_estimate + abs(res.value) * rel0,
                            res.evaluations + i0.evaluations, res.converged and i0.converged,
                            "; ".join(messages))


def response_breakdown(req: ResponseRequest, thresholds: Optional[RegimeThresholds] = None,
                       settings: Optional[EngineSettings] = None,
                       measure: float = MEASURE) -> ResponseBreakdown:
    """
    F_0, excess and delta without the division guard: delta is NaN when
    F_0 < abs_tol. Used by the scans, which report such points as gaps.
    """
    settings = settings or EngineSettings()
    a, lam, tol = float(req.a), float(req.lam), req.tol
    i0 = _massive_raw(a, 0.0, req.switching, tol, settings)
    norm = _excess_normalised(req, i0, settings)

    lam2 = lam * lam
    f0 = measure * i0.value
    f0_err = measure * i0.abs_error_estimate
    excess = measure * lam2 * i0.value * norm.value
    excess_err = abs(excess) * (i0.rel_error_estimate if i0.value else 0.0) \
        + measure * lam2 * i0.value * norm.abs_error_estimate

    messages = [m for m in (i0.message, norm.message) if m]
    if f0 < tol.abs_tol:
        delta = delta_err = math.nan
        messages.append(f"F_0={f0:.3e} below abs_tol, delta undefined")
    else:
        delta = lam2 * norm.value
        delta_err = lam2 * norm.abs_error_estimate
    return ResponseBreakdown(
        f0=f0, excess=excess, delta=delta,
        f0_err=f0_err, excess_err=excess_err, delta_err=delta_err,
        converged=i0.converged and norm.converged,
        regime=regime_from_groups(a, lam, thresholds),
        evaluations=i0.evaluations + norm.evaluations,
        message="; ".join(messages),
    )


def relative_response(req: ResponseRequest, thresholds: Optional[RegimeThresholds] = None,
                      settings: Optional[EngineSettings] = None,
                      measure: float = MEASURE) -> ResponseBreakdown:
    """
    F_0, excess and delta for one request. Raises DivisionGuardError when
    F_0 < abs_tol; the caller should then report F_0 and excess separately.
    """
    b = response_breakdown(req, thresholds, settings, measure)
    if b.f0 < req.tol.abs_tol:
        raise DivisionGuardError(b.f0, b.excess, req.tol.abs_tol, excess_converged=b.converged)
    return b


# =========================================================
# Asymptotik
# =========================================================

def asymptotic_excess(a: float, lam: float, switching: SwitchingLike, plateau: float = 1.0,
                      min_abs_a: float = 10.0, max_lambda_abs_a: float = 1e-2,
                      measure: float = MEASURE) -> float:
    """
    Long-time emission limit K * (2/3) * plateau * lam^2 |a|^3 * int chi~^2,
    i.e. lam^2 |a|^3 ||chi~||^2 / (6 pi^2) for plateau 1.
    """
    a, lam = float(a), float(lam)
    if not (math.isfinite(lam) and lam >= 0):
        raise ConfigError("lambda", f"must be finite and >= 0, got {lam!r}")
    if not (math.isfinite(a) and a < 0):
        raise ConfigError("a", f"asymptotic form needs a < 0 (emission), got {a!r}")
    if abs(a) < min_abs_a:
        raise ConfigError("a", f"asymptotic form needs |a| >= {min_abs_a:g}, got {a!r}")
    if lam * abs(a) >= max_lambda_abs_a:
        raise ConfigError("lambda", f"asymptotic form needs lam*|a| < {max_lambda_abs_a:g}")
    if lam == 0.0:
        return 0.0
    return measure * (2.0 / 3.0) * plateau * lam * lam * abs(a) ** 3 * switching.ft_norm_squared()


def asymptotic_delta(omega: float, l_n: float, c: float = C_LIGHT) -> float:
    """(|Omega| l_n / c)^2, unit coefficient."""
    omega, l_n = float(omega), float(l_n)
    if not (math.isfinite(omega) and math.isfinite(l_n)):
        raise ConfigError("omega/l_n", "must be finite")
    x = abs(omega) * l_n / c
    return x * x
