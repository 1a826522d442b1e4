import math
import sys

import pytest

from errors import ConfigError, ExtrapolationError, QuadratureEvaluationError
from quadrature import (QuadratureResult, TailClass, Tolerance, combine, extrapolate_to_zero,
                        integrate, integrate_log_range, integrate_oscillatory_tail,
                        integrate_semi_infinite)

TIGHT = Tolerance(rel_tol=1e-10, abs_tol=1e-14)


def test_finite_interval():
    r = integrate(lambda x: math.exp(-x), 0.0, 1.0, TIGHT)
    assert r.converged
    assert r.value == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
    assert r.evaluations >= 21
    assert r.abs_error_estimate <= TIGHT.target(r.value)


def test_empty_and_reversed_interval():
    assert integrate(math.exp, 2.0, 2.0) == QuadratureResult.exact(0.0)
    with pytest.raises(ConfigError):
        integrate(math.exp, 1.0, 0.0)
    with pytest.raises(ConfigError):
        integrate(math.exp, 0.0, math.inf)


def test_nan_integrand_names_abscissa():
    with pytest.raises(QuadratureEvaluationError) as e:
        integrate(lambda x: math.nan, 0.0, 1.0)
    assert 0.0 < e.value.abscissa < 1.0


def test_nonconvergence_is_reported_not_raised():
    tol = Tolerance(rel_tol=1e-12, abs_tol=1e-15, max_evaluations=21)
    r = integrate(lambda x: abs(x - 0.3137), 0.0, 1.0, tol)
    assert not r.converged
    assert r.message
    assert r.value == pytest.approx(0.5 * (0.3137 ** 2 + 0.6863 ** 2), rel=1e-6)


@pytest.mark.parametrize("hint, f, exact", [
    (TailClass.EXPONENTIAL_DECAY, lambda x: math.exp(-x), 1.0),
    (TailClass.SUPER_EXPONENTIAL_DECAY, lambda x: math.exp(-x * x), math.sqrt(math.pi) / 2),
    (TailClass.POLYNOMIAL_DECAY, lambda x: 1.0 / (1.0 + x * x), math.pi / 2),
])
def test_semi_infinite_by_tail_class(hint, f, exact):
    r = integrate_semi_infinite(f, 0.0, TIGHT, hint)
    assert r.converged
    assert r.value == pytest.approx(exact, rel=1e-9)


def test_semi_infinite_compact_support():
    r = integrate_semi_infinite(lambda x: 1.0 - x, 0.0, TIGHT, TailClass.COMPACT_SUPPORT, support_edge=1.0)
    assert r.value == pytest.approx(0.5, rel=1e-12)
    assert integrate_semi_infinite(lambda x: 1.0, 2.0, TIGHT, TailClass.COMPACT_SUPPORT,
                                   support_edge=1.0).value == 0.0
    with pytest.raises(ConfigError):
        integrate_semi_infinite(lambda x: 1.0, 0.0, TIGHT, TailClass.COMPACT_SUPPORT)


def test_semi_infinite_with_breakpoints():
    f = lambda x: math.exp(-abs(x - 5.0))
    r = integrate_semi_infinite(f, 0.0, TIGHT, TailClass.EXPONENTIAL_DECAY, breakpoints=[5.0])
    assert r.value == pytest.approx(2.0 - math.exp(-5.0), rel=1e-9)


def test_log_range_spans_decades():
    r = integrate_log_range(lambda s: 1.0 / s, 1.0, 1e6, TIGHT)
    assert r.value == pytest.approx(math.log(1e6), rel=1e-10)
    with pytest.raises(ConfigError):
        integrate_log_range(lambda s: 1.0, 0.0, 1.0)


def test_oscillatory_tail():
    r = integrate_oscillatory_tail(lambda t: math.exp(-t), 0.0, 1.0, "cos", TIGHT)
    assert r.value == pytest.approx(0.5, rel=1e-9)
    assert integrate_oscillatory_tail(lambda t: 1.0, 0.0, 0.0, "sin").value == 0.0
    with pytest.raises(ConfigError):
        integrate_oscillatory_tail(lambda t: 1.0, 0.0, 1.0, "tan")


def test_combine_rechecks_tolerance():
    parts = [QuadratureResult(1.0, 1e-12, 21, True), QuadratureResult(2.0, 1e-12, 21, True)]
    total = combine(parts, TIGHT)
    assert total.value == 3.0 and total.evaluations == 42 and total.converged
    assert not combine(parts, TIGHT, note="truncated").converged


def test_tolerance_validation_and_config():
    with pytest.raises(ConfigError) as e:
        Tolerance(rel_tol=0.0)
    assert e.value.field == "rel_tol"
    with pytest.raises(ConfigError):
        Tolerance(max_evaluations=5)
    cfg = {"quadrature": {"rel_tol": 1e-6, "abs_tol": 1e-12, "max_evaluations": 5000}}
    tol = Tolerance.from_config(cfg, abs_tol=1e-13)
    assert (tol.rel_tol, tol.abs_tol, tol.max_evaluations) == (1e-6, 1e-13, 5000)
    assert tol.tightened(100).rel_tol == pytest.approx(1e-8)
    assert Tolerance.from_config({}) == Tolerance()


def test_extrapolation_of_polynomial_is_exact():
    g = lambda e: 1.0 + 2.0 * e + 3.0 * e * e
    res = extrapolate_to_zero(g, [0.1, 0.05, 0.025, 0.0125])
    assert res.value == pytest.approx(1.0, rel=1e-12)
    assert res.order == 3


def test_extrapolation_detects_divergence():
    g = lambda e: 1000.0 if e == 0.1 else 0.0
    with pytest.raises(ExtrapolationError):
        extrapolate_to_zero(g, [0.1, 0.05, 0.025, 0.0125])


@pytest.mark.parametrize("seq", [[0.1, 0.05], [0.1, 0.2, 0.05], [0.1, 0.0, -0.1]])
def test_extrapolation_rejects_bad_sequences(seq):
    with pytest.raises(ExtrapolationError):
        extrapolate_to_zero(lambda e: e, seq)


def test_extrapolation_rejects_nonfinite_values():
    with pytest.raises(ExtrapolationError):
        extrapolate_to_zero(lambda e: math.inf if e < 0.03 else 1.0, [0.1, 0.05, 0.025])


# ---------------------------------------------------------
# Linearitaet, Additivitaet, ehrliche Fehlerschaetzung
# ---------------------------------------------------------

def test_linearity():
    f = lambda x: math.exp(-x) * math.sin(3 * x)
    g = lambda x: 1.0 / (1.0 + x * x)
    alpha, beta = 2.5, -0.75
    rf, rg = integrate(f, 0.0, 4.0, TIGHT), integrate(g, 0.0, 4.0, TIGHT)
    rs = integrate(lambda x: alpha * f(x) + beta * g(x), 0.0, 4.0, TIGHT)
    budget = rs.abs_error_estimate + abs(alpha) * rf.abs_error_estimate + abs(beta) * rg.abs_error_estimate
    assert abs(rs.value - (alpha * rf.value + beta * rg.value)) <= budget + 1e-15


@pytest.mark.parametrize("mid", [0.1, 1.3, 2.999])
def test_interval_additivity(mid):
    f = lambda x: math.sqrt(x) * math.cos(x)
    total = integrate(f, 0.0, 3.0, TIGHT)
    left, right = integrate(f, 0.0, mid, TIGHT), integrate(f, mid, 3.0, TIGHT)
    budget = total.abs_error_estimate + left.abs_error_estimate + right.abs_error_estimate
    assert abs(total.value - (left.value + right.value)) <= budget + 1e-15


def _finite(f, lo, hi, bps=()):
    return lambda tol: integrate(f, lo, hi, tol, bps)


def _tail(f, hint):
    return lambda tol: integrate_semi_infinite(f, 0.0, tol, hint)


HONESTY_BATTERY = [
    (_finite(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0), 2.0),
    (_tail(lambda x: 1.0 / (1.0 + x * x) ** 2, TailClass.POLYNOMIAL_DECAY), math.pi / 4),
    (_tail(lambda x: 1.0 / (1.0 + x * x), TailClass.POLYNOMIAL_DECAY), math.pi / 2),
    (_tail(lambda x: 1.0 / (1.0 + x) ** 3, TailClass.POLYNOMIAL_DECAY), 0.5),
    (_tail(lambda x: math.exp(-x), TailClass.EXPONENTIAL_DECAY), 1.0),
    (_tail(lambda x: x * math.exp(-x), TailClass.EXPONENTIAL_DECAY), 1.0),
    (_tail(lambda x: math.exp(-x) * math.sin(x), TailClass.EXPONENTIAL_DECAY), 0.5),
    (_tail(lambda x: math.exp(-x * x), TailClass.SUPER_EXPONENTIAL_DECAY), math.sqrt(math.pi) / 2),
    (_finite(math.log, 0.0, 1.0), -1.0),
    (_finite(lambda x: x * math.log(x), 0.0, 1.0), -0.25),
    (_finite(math.sqrt, 0.0, 1.0), 2.0 / 3.0),
    (_finite(lambda x: math.exp(-x), 0.0, 1.0), 1.0 - math.exp(-1.0)),
    (_finite(math.sin, 0.0, math.pi), 2.0),
    (_finite(lambda x: math.cos(x) ** 2, 0.0, 2 * math.pi), math.pi),
    (_finite(lambda x: 1.0 / x, 1.0, math.e), 1.0),
    (_finite(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0), math.pi / 4),
    (_finite(lambda x: math.sqrt(max(1.0 - x * x, 0.0)), -1.0, 1.0), math.pi / 2),
    (_finite(lambda x: abs(x - 0.3), 0.0, 1.0, [0.3]), 0.29),
    (_finite(lambda x: x ** 4, 0.0, 1.0), 0.2),
    (lambda tol: integrate_log_range(lambda s: 1.0 / s, 1.0, 1e6, tol), math.log(1e6)),
]


def test_error_estimates_are_honest():
    tol = Tolerance()
    honest = 0
    for run, exact in HONESTY_BATTERY:
        r = run(tol)
        slack = 4 * sys.float_info.epsilon * abs(exact)
        if abs(r.value - exact) <= 10.0 * r.abs_error_estimate + slack:
            honest += 1
    assert len(HONESTY_BATTERY) >= 10
    assert honest >= 0.95 * len(HONESTY_BATTERY)
