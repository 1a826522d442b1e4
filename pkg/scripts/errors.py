# scripts/errors.py
"""
errors.py
---------
Fehlerhierarchie fuer den Detektor-Stack.

Quadrature non-convergence is NOT an exception: it travels as
QuadratureResult.converged. Everything here is raised for bad input or for
results that must not be used.
"""
from __future__ import annotations

from typing import Optional


class DetectorError(Exception):
    """Basisklasse aller Fehler dieses Projekts."""


class ConfigError(DetectorError, ValueError):
    """Invalid configuration value. `field` names the offending field or CLI flag."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SpecialFunctionDomainError(DetectorError, ValueError):
    """Argument outside the domain (or representable range) of a special function."""


class QuadratureEvaluationError(DetectorError, ArithmeticError):
    """An integrand returned NaN/inf."""

    def __init__(self, abscissa: float, value: float, where: str = "integrand"):
        self.abscissa = abscissa
        self.value = value
        super().__init__(f"{where} returned {value!r} at x={abscissa!r}")


class ExtrapolationError(DetectorError):
    """Extrapolants diverge or the input sequence is unusable."""


class DivisionGuardError(DetectorError, ArithmeticError):
    """F0 too small for a meaningful ratio; report excess and F0 separately."""

    def __init__(self, f0: float, excess: float, abs_tol: float,
                 excess_converged: Optional[bool] = None):
        self.f0 = f0
        self.excess = excess
        self.abs_tol = abs_tol
        self.excess_converged = excess_converged
        super().__init__(
            f"F0={f0!r} is below abs_tol={abs_tol!r}; relative difference undefined "
            f"(report excess={excess!r} and F0 separately)"
        )


class FitError(DetectorError, ValueError):
    """Degenerate sample set for a scaling fit."""


class PlannerError(DetectorError, ValueError):
    """Unusable experiment plan."""
