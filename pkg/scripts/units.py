# scripts/units.py
"""
units.py
--------
Physical parameters of a detector run, the dimensionless groups the engine
works with, and the regime classification.

    a      = Omega * T          (gap times switching time)
    lambda = l_n / (c * T)      (nonlocality scale over the light-travel length)

SI units throughout (rad/s, s, m, m/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from errors import ConfigError
from util import cfg_get

C_LIGHT = 299_792_458.0                 # m/s
HBAR_MEV_S = 6.582_119_569e-22          # MeV*s
ELECTRON_MASS_MEV = 0.510_998_950       # MeV


def mev_to_rad_per_s(energy_mev: float) -> float:
    """Energy gap in MeV -> angular frequency Omega = E/hbar."""
    return float(energy_mev) / HBAR_MEV_S


def rad_per_s_to_mev(omega: float) -> float:
    return float(omega) * HBAR_MEV_S


class GapSign(str, Enum):
    POSITIVE = "positive"      # vacuum-like
    NEGATIVE = "negative"      # emission
    NEAR_ZERO = "near-zero"


class TimeRegime(str, Enum):
    LONG = "long"
    SHORT = "short"
    INTERMEDIATE = "intermediate"


class Validity(str, Enum):
    LOW_ENERGY_VALID = "low-energy-valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class RegimeThresholds:
    long_abs_a: float = 1e2
    short_abs_a: float = 1e-2
    eps_low: float = 1e-2
    near_zero_abs_a: float = 1e-12

    def __post_init__(self):
        for name in ("long_abs_a", "short_abs_a", "eps_low"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(name, f"must be finite and > 0, got {v!r}")
        if self.short_abs_a >= self.long_abs_a:
            raise ConfigError("short_abs_a", "must be smaller than long_abs_a")
        if not (self.near_zero_abs_a >= 0):
            raise ConfigError("near_zero_abs_a", "must be >= 0")

    @classmethod
    def from_config(cls, cfg: Optional[Dict[str, Any]]) -> "RegimeThresholds":
        d = cls()
        return cls(
            long_abs_a=float(cfg_get(cfg, "regime.long_abs_a", d.long_abs_a)),
            short_abs_a=float(cfg_get(cfg, "regime.short_abs_a", d.short_abs_a)),
            eps_low=float(cfg_get(cfg, "regime.eps_low", d.eps_low)),
            near_zero_abs_a=float(cfg_get(cfg, "regime.near_zero_abs_a", d.near_zero_abs_a)),
        )


@dataclass(frozen=True)
class RegimeTag:
    gap_sign: GapSign
    time_regime: TimeRegime
    validity: Validity

    @property
    def label(self) -> str:
        return f"{self.gap_sign.value}/{self.time_regime.value}/{self.validity.value}"


def _check_finite(name: str, value: float) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"not a number: {value!r}")
    if not math.isfinite(v):
        raise ConfigError(name, f"must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class DetectorConfig:
    omega: float        # rad/s, any sign
    t_window: float     # s, > 0
    l_n: float          # m, >= 0
    c: float = C_LIGHT
    a: float = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self):
        omega = _check_finite("omega", self.omega)
        t_window = _check_finite("t_window", self.t_window)
        l_n = _check_finite("l_n", self.l_n)
        c = _check_finite("c", self.c)
        if t_window <= 0:
            raise ConfigError("t_window", f"must be > 0, got {self.t_window!r}")
        if l_n < 0:
            raise ConfigError("l_n", f"must be >= 0, got {self.l_n!r}")
        if c <= 0:
            raise ConfigError("c", f"must be > 0, got {self.c!r}")
        a = omega * t_window
        lam = l_n / (c * t_window)
        if not math.isfinite(a):
            raise ConfigError("omega", "Omega*T overflows")
        if not math.isfinite(lam):
            raise ConfigError("l_n", "l_n/(c*T) overflows")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lam", lam)


def make_config(omega: float, t_window: float, l_n: float, c: float = C_LIGHT) -> DetectorConfig:
    """Validated config with the cached dimensionless groups a and lam."""
    return DetectorConfig(omega=omega, t_window=t_window, l_n=l_n, c=c)


def regime_from_groups(a: float, lam: float,
                       thresholds: Optional[RegimeThresholds] = None) -> RegimeTag:
    """
    Classification from (a, lambda) alone. |Omega| l/c = |a| lambda and
    T c/l = 1/lambda, so nothing else is needed.
    """
    th = thresholds or RegimeThresholds()
    abs_a = abs(a)
    if abs_a <= th.near_zero_abs_a:
        sign = GapSign.NEAR_ZERO
    else:
        sign = GapSign.POSITIVE if a > 0 else GapSign.NEGATIVE

    # Grenzwerte selbst zaehlen als intermediate
    if abs_a > th.long_abs_a:
        regime = TimeRegime.LONG
    elif abs_a < th.short_abs_a:
        regime = TimeRegime.SHORT
    else:
        regime = TimeRegime.INTERMEDIATE

    energy_ok = abs_a * lam < th.eps_low
    window_ok = lam < th.eps_low          # T c / l > 1/eps
    validity = Validity.LOW_ENERGY_VALID if (energy_ok and window_ok) else Validity.INVALID
    return RegimeTag(sign, regime, validity)


def classify_regime(config: DetectorConfig,
                    thresholds: Optional[RegimeThresholds] = None) -> RegimeTag:
    return regime_from_groups(config.a, config.lam, thresholds)
