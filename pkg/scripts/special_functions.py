# scripts/special_functions.py
"""
special_functions.py
--------------------
Exponential integrals Ei, E1, E2 (real axis plus the boundary values of E2 on
its branch cut along the negative real axis) and erfc.

Backed by scipy.special; this module adds domain checks, the cut boundary
values and an overflow-free scaled form used by the causal-set spectral
function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special as sc

from errors import SpecialFunctionDomainError

EULER_GAMMA = float(np.euler_gamma)

# unterhalb: Ei(x) ~ gamma + ln x, Aufruf wird abgelehnt
EI_LOWER_LIMIT = 1e-300
# e^x overflowt in float64 knapp oberhalb
EXP_OVERFLOW = 709.782712893384
# ab hier asymptotische Reihe fuer e^{-u} Ei(u)
SCALED_ASYMPTOTIC_SWITCH = 40.0


class CutSide(str, Enum):
    ABOVE = "above-cut"
    BELOW = "below-cut"
    OFF = "off-cut"

    @classmethod
    def parse(cls, side: "CutSide | str") -> "CutSide":
        if isinstance(side, CutSide):
            return side
        s = str(side).strip().lower()
        if s in ("above", "above-cut", "+"):
            return cls.ABOVE
        if s in ("below", "below-cut", "-"):
            return cls.BELOW
        raise SpecialFunctionDomainError(f"unknown cut side {side!r}")


@dataclass(frozen=True)
class BranchValue:
    real_part: float
    imag_part: float
    side: CutSide

    def as_complex(self) -> complex:
        return complex(self.real_part, self.imag_part)

    def abs_squared(self) -> float:
        return self.real_part ** 2 + self.imag_part ** 2


def _finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise SpecialFunctionDomainError(f"{name}: argument must be finite, got {x!r}")
    return x


def expint_Ei(x: float) -> float:
    """Principal-value exponential integral Ei(x) for x > 0."""
    x = _finite("Ei", x)
    if x <= 0:
        raise SpecialFunctionDomainError(f"Ei: x must be > 0, got {x!r}")
    if x < EI_LOWER_LIMIT:
        raise SpecialFunctionDomainError(f"Ei: x={x!r} below domain limit {EI_LOWER_LIMIT} (log divergence)")
    if x > EXP_OVERFLOW:
        raise SpecialFunctionDomainError(f"Ei: x={x!r} overflows double precision")
    val = float(sc.expi(x))
    if not math.isfinite(val):
        raise SpecialFunctionDomainError(f"Ei: non-finite result at x={x!r}")
    return val


def expint_E1(x: float) -> float:
    """E1(x) for x > 0."""
    x = _finite("E1", x)
    if x <= 0:
        raise SpecialFunctionDomainError(f"E1: x must be > 0, got {x!r}")
    return float(sc.exp1(x))


def expint_E2(x: float) -> float:
    """E2(x) = int_1^inf e^{-xt} t^-2 dt for x >= 0 (E2(0) = 1)."""
    x = _finite("E2", x)
    if x < 0:
        raise SpecialFunctionDomainError(f"E2: x must be >= 0 on the real axis, got {x!r}")
    return float(sc.expn(2, x))


def expint_E1_complex(z: complex) -> complex:
    """Principal branch of E1 off the real axis (test oracle path)."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SpecialFunctionDomainError(f"E1: argument must be finite, got {z!r}")
    if z == 0:
        raise SpecialFunctionDomainError("E1: pole at z=0")
    return complex(sc.exp1(z))


def expint_E2_complex(z: complex) -> complex:
    """E2(z) = e^{-z} - z E1(z), principal branch."""
    z = complex(z)
    return complex(np.exp(-z)) - z * expint_E1_complex(z)


def _x_times_Ei(x: float) -> float:
    if x < EI_LOWER_LIMIT:
        # x*(gamma + ln x) -> 0
        return x * (EULER_GAMMA + math.log(x))
    return x * expint_Ei(x)


def expint_E2_on_cut(x: float, side: CutSide | str = CutSide.ABOVE) -> BranchValue:
    """
    Boundary value of E2 at -x (x > 0) approached from above or below the cut.

    E1(-x +- i0) = -Ei(x) -+ i*pi, hence
    E2(-x + i0) = e^x - x Ei(x) - i*pi*x, and the conjugate below.
    """
    x = _finite("E2 cut", x)
    side = CutSide.parse(side)
    if side is CutSide.OFF:
        raise SpecialFunctionDomainError("E2 cut: side must be above or below")
    if x <= 0:
        raise SpecialFunctionDomainError(f"E2 cut: x must be > 0, got {x!r}")
    if x > EXP_OVERFLOW:
        raise SpecialFunctionDomainError(f"E2 cut: x={x!r} overflows, use scaled_cut_real")
    real = math.exp(x) - _x_times_Ei(x)
    imag = -math.pi * x
    if side is CutSide.BELOW:
        imag = -imag
    return BranchValue(real, imag, side)


def scaled_cut_real(u: float) -> float:
    """
    g(u) = e^{-u} Re E2(-u + i0) = 1 - u e^{-u} Ei(u), for u >= 0.

    Direct evaluation cancels badly for large u; past the switch the
    asymptotic series e^{-u} Ei(u) ~ (1/u) sum_k k!/u^k gives
    g(u) ~ -sum_{k>=1} k!/u^k, truncated at its smallest term.
    """
    u = _finite("scaled cut", u)
    if u < 0:
        raise SpecialFunctionDomainError(f"scaled cut: u must be >= 0, got {u!r}")
    if u < EI_LOWER_LIMIT:
        return 1.0 - u * (EULER_GAMMA + math.log(u)) if u > 0 else 1.0
    if u <= SCALED_ASYMPTOTIC_SWITCH:
        return 1.0 - u * math.exp(-u) * expint_Ei(u)

    total, term, k = 0.0, 1.0, 1
    while True:
        nxt = term * k / u
        if nxt >= term and k > 1:
            break
        term = nxt
        total += term
        if term < 1e-17 * abs(total):
            break
        k += 1
    return -total


def erfc(x: float) -> float:
    """Complementary error function (scipy.special.erfc)."""
    x = _finite("erfc", x)
    return float(sc.erfc(x))
