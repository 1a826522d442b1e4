# scripts/switching.py
"""
switching.py
------------
The four switching windows chi(t), t = tau/T, with closed-form Fourier
transforms under chi~(w) = int dt e^{-iwt} chi(t).

    kind         chi(t)       chi~(w)                 tail of chi~
    exponential  e^{-|t|}     2/(1+w^2)               polynomial-decay
    sinc         sin(t)/t     pi on |w|<1, pi/2 at 1  compact-support
    lorentzian   1/(t^2+1)    pi e^{-|w|}             exponential-decay
    gaussian     e^{-t^2}     sqrt(pi) e^{-w^2/4}     super-exponential-decay

All four transforms are real, even and >= 0, so |chi~|^2 = chi~^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, runtime_checkable

from errors import ConfigError
from quadrature import (QuadratureResult, TailClass, Tolerance, combine, integrate,
                        integrate_oscillatory_tail)

SQRT_PI = math.sqrt(math.pi)


class SwitchingKind(str, Enum):
    EXPONENTIAL = "exponential"
    SINC = "sinc"
    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"

    @classmethod
    def values(cls):
        return [k.value for k in cls]

    @classmethod
    def parse(cls, kind: "SwitchingKind | str") -> "SwitchingKind":
        if isinstance(kind, SwitchingKind):
            return kind
        try:
            return cls(str(kind).strip().lower())
        except ValueError:
            raise ConfigError("switching", f"unknown kind {kind!r}, expected one of {cls.values()}")


_TAIL = {
    SwitchingKind.EXPONENTIAL: TailClass.POLYNOMIAL_DECAY,
    SwitchingKind.SINC: TailClass.COMPACT_SUPPORT,
    SwitchingKind.LORENTZIAN: TailClass.EXPONENTIAL_DECAY,
    SwitchingKind.GAUSSIAN: TailClass.SUPER_EXPONENTIAL_DECAY,
}

_NORM_SQUARED = {
    SwitchingKind.EXPONENTIAL: 2.0 * math.pi,
    SwitchingKind.SINC: 2.0 * math.pi ** 2,
    SwitchingKind.LORENTZIAN: math.pi ** 2,
    SwitchingKind.GAUSSIAN: math.pi * math.sqrt(2.0 * math.pi),
}


def evaluate(kind: SwitchingKind | str, t: float) -> float:
    kind = SwitchingKind.parse(kind)
    t = float(t)
    if kind is SwitchingKind.EXPONENTIAL:
        return math.exp(-abs(t))
    if kind is SwitchingKind.SINC:
        return 1.0 if t == 0.0 else math.sin(t) / t
    if kind is SwitchingKind.LORENTZIAN:
        return 1.0 / (t * t + 1.0)
    return math.exp(-t * t)


def fourier(kind: SwitchingKind | str, w: float) -> float:
    kind = SwitchingKind.parse(kind)
    aw = abs(float(w))
    if kind is SwitchingKind.EXPONENTIAL:
        return 2.0 / (1.0 + aw * aw)
    if kind is SwitchingKind.SINC:
        if aw < 1.0:
            return math.pi
        return 0.5 * math.pi if aw == 1.0 else 0.0
    if kind is SwitchingKind.LORENTZIAN:
        return math.pi * math.exp(-aw)
    return SQRT_PI * math.exp(-0.25 * aw * aw)


def fourier_sq(kind: SwitchingKind | str, w: float) -> float:
    v = fourier(kind, w)
    return v * v


def ft_norm_squared(kind: SwitchingKind | str) -> float:
    """int |chi~(w)|^2 dw (= 2 pi int chi^2 dt)."""
    return _NORM_SQUARED[SwitchingKind.parse(kind)]


def window_upper(kind: SwitchingKind | str, x_ref: float, rel: float) -> float:
    """
    Smallest X >= x_ref (x_ref >= 0) with chi~^2(x) <= rel * chi~^2(x_ref)
    for all x >= X. Infinite for the polynomial tail.
    """
    kind = SwitchingKind.parse(kind)
    x_ref = max(float(x_ref), 0.0)
    if not (0.0 < rel < 1.0):
        raise ConfigError("window_rel", f"must lie in (0, 1), got {rel!r}")
    if kind is SwitchingKind.SINC:
        return max(1.0, x_ref)
    if kind is SwitchingKind.LORENTZIAN:
        return x_ref + 0.5 * math.log(1.0 / rel)
    if kind is SwitchingKind.GAUSSIAN:
        return math.sqrt(x_ref * x_ref + 2.0 * math.log(1.0 / rel))
    return math.inf


def tail_power_coefficient(kind: SwitchingKind | str) -> float:
    """C in chi~^2(w) ~ C / w^4 for |w| -> inf; 0 for the faster tails."""
    return 4.0 if SwitchingKind.parse(kind) is SwitchingKind.EXPONENTIAL else 0.0


def fourier_numeric(kind: SwitchingKind | str, w: float,
                    tol: Optional[Tolerance] = None) -> QuadratureResult:
    """
    chi~(w) = 2 int_0^inf chi(t) cos(wt) dt by direct quadrature (cross-check
    of the closed forms). sin(t)/t oscillates itself, so its tail is split as
    sin(t) cos(wt)/t = [sin((1+w)t) + sin((1-w)t)] / (2t).
    """
    kind = SwitchingKind.parse(kind)
    tol = tol or Tolerance(rel_tol=1e-10, abs_tol=1e-11)
    w = abs(float(w))
    if kind is not SwitchingKind.SINC:
        return integrate_oscillatory_tail(lambda t: evaluate(kind, t), 0.0, w, "cos", tol).scaled(2.0)

    t0 = 8.0 * math.pi
    parts = [integrate(lambda t: evaluate(kind, t) * math.cos(w * t), 0.0, t0, tol)]
    for b in (1.0 + w, 1.0 - w):
        if b == 0.0:
            continue
        tail = integrate_oscillatory_tail(lambda t: 0.5 / t, t0, abs(b), "sin", tol)
        parts.append(tail.scaled(math.copysign(1.0, b)))
    return combine(parts, tol).scaled(2.0)


@runtime_checkable
class SwitchingLike(Protocol):
    """What the response engine needs from a window."""

    @property
    def tail_class(self) -> TailClass: ...

    @property
    def support_radius(self) -> Optional[float]: ...

    def fourier_sq(self, w: float) -> float: ...

    def window_upper(self, x_ref: float, rel: float) -> float: ...

    def ft_norm_squared(self) -> float: ...


@dataclass(frozen=True)
class SwitchingFunction:
    kind: SwitchingKind

    def __post_init__(self):
        object.__setattr__(self, "kind", SwitchingKind.parse(self.kind))

    @property
    def tail_class(self) -> TailClass:
        return _TAIL[self.kind]

    @property
    def support_radius(self) -> Optional[float]:
        return 1.0 if self.kind is SwitchingKind.SINC else None

    def evaluate(self, t: float) -> float:
        return evaluate(self.kind, t)

    def fourier(self, w: float) -> float:
        return fourier(self.kind, w)

    def fourier_sq(self, w: float) -> float:
        return fourier_sq(self.kind, w)

    def ft_norm_squared(self) -> float:
        return ft_norm_squared(self.kind)

    def window_upper(self, x_ref: float, rel: float) -> float:
        return window_upper(self.kind, x_ref, rel)


def get_switching(kind: SwitchingKind | str) -> SwitchingFunction:
    return SwitchingFunction(SwitchingKind.parse(kind))
