# scripts/spectral.py
"""
spectral.py
-----------
Dimensionless discontinuity functions rho_hat(x), x = l_n^2 mu^2, with
rho(mu^2) = l_n^2 * rho_hat(l_n^2 mu^2).

  exponential : rho_hat = e^{-alpha x}                       plateau 1
  causal-set  : rho_hat = -2 e^{u} Im E2(-u+i0) / (x |E2(-u+i0)|^2),  u = x/2
              = pi e^{u} / [(e^u - u Ei(u))^2 + (pi u)^2]      plateau pi

The causal-set form is evaluated scaled by e^{-2u} so that it neither
overflows nor cancels for large x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from scipy.optimize import brentq

from errors import ConfigError, SpecialFunctionDomainError
from special_functions import expint_E2_complex, scaled_cut_real


class SpectralKind(str, Enum):
    EXPONENTIAL = "exponential"
    CAUSAL_SET = "causal-set"

    @classmethod
    def values(cls):
        return [k.value for k in cls]

    @classmethod
    def parse(cls, kind: "SpectralKind | str") -> "SpectralKind":
        if isinstance(kind, SpectralKind):
            return kind
        try:
            return cls(str(kind).strip().lower())
        except ValueError:
            raise ConfigError("spectral", f"unknown kind {kind!r}, expected one of {cls.values()}")


def _check_x(x: float) -> float:
    x = float(x)
    if math.isnan(x) or x < 0:
        raise SpecialFunctionDomainError(f"rho_hat: x must be >= 0, got {x!r}")
    return x


def rho_hat_exponential(x: float, alpha: float = 1.0) -> float:
    x = _check_x(x)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ConfigError("alpha", f"must be finite and > 0, got {alpha!r}")
    return math.exp(-alpha * x)


def rho_hat_causalset(x: float) -> float:
    x = _check_x(x)
    if x == 0.0:
        return math.pi
    if math.isinf(x):
        return 0.0
    u = 0.5 * x
    g = scaled_cut_real(u)
    decay = math.exp(-u)            # underflows harmlessly to 0
    im = math.pi * u * decay
    return math.pi * decay / (g * g + im * im)


def rho_hat_causalset_offcut(x: float, eps: float) -> float:
    """
    The same expression evaluated at the complex argument -u + i*eps instead
    of on the cut; tends to rho_hat_causalset(x) as eps -> 0+.
    """
    x = _check_x(x)
    if x == 0.0:
        raise SpecialFunctionDomainError("offcut form is 0/0 at x=0")
    u = 0.5 * x
    e2 = expint_E2_complex(complex(-u, float(eps)))
    return -2.0 * math.exp(u) * e2.imag / (x * abs(e2) ** 2)


@dataclass(frozen=True)
class SpectralFunction:
    kind: SpectralKind
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectralKind.parse(self.kind))
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError("alpha", f"must be finite and > 0, got {self.alpha!r}")

    @property
    def plateau(self) -> float:
        """rho_hat(0)."""
        return 1.0 if self.kind is SpectralKind.EXPONENTIAL else math.pi

    def rho_hat(self, x: float) -> float:
        if self.kind is SpectralKind.EXPONENTIAL:
            return rho_hat_exponential(x, self.alpha)
        return rho_hat_causalset(x)

    def cutoff(self, rel: float) -> float:
        """x beyond which rho_hat(x) < rel * plateau."""
        if not (0.0 < rel < 1.0):
            raise ConfigError("rel", f"must lie in (0, 1), got {rel!r}")
        if self.kind is SpectralKind.EXPONENTIAL:
            return math.log(1.0 / rel) / self.alpha
        target = math.log(rel * self.plateau)
        hi = 8.0
        while math.log(max(rho_hat_causalset(hi), 1e-320)) > target:
            hi *= 2.0
        return brentq(lambda x: math.log(rho_hat_causalset(x)) - target, 1e-6, hi, xtol=1e-10)

    @property
    def description(self) -> str:
        if self.kind is SpectralKind.EXPONENTIAL:
            return f"exponential (alpha={self.alpha:g}), plateau 1"
        return "causal-set, plateau pi"


def get_spectral(kind: SpectralKind | str, alpha: Optional[float] = None) -> SpectralFunction:
    return SpectralFunction(SpectralKind.parse(kind), 1.0 if alpha is None else float(alpha))
