import math

import numpy as np
import pytest

from errors import ConfigError, DivisionGuardError
from quadrature import Tolerance
from response import (MEASURE, EngineSettings, ResponseRequest, asymptotic_delta,
                      asymptotic_excess, nonlocal_excess, relative_response, response_breakdown,
                      response_massive, response_massless)
from spectral import get_spectral
from switching import get_switching
from units import C_LIGHT, TimeRegime
from special_functions import erfc

TIGHT = Tolerance(rel_tol=1e-10, abs_tol=1e-14)
EXP_RHO = get_spectral("exponential")


def _req(kind, a, lam, spectral=EXP_RHO, tol=None):
    return ResponseRequest(a, lam, get_switching(kind), spectral, tol or Tolerance())


# ---------------------------------------------------------
# F_0 gegen geschlossene Formen
# ---------------------------------------------------------

@pytest.mark.parametrize("a", [-20.0, -5.0, 0.0, 5.0])
def test_gaussian_massless_closed_form(a):
    exact = (math.exp(-a * a / 2) - a * math.sqrt(math.pi / 2) * erfc(a / math.sqrt(2))) / (4 * math.pi)
    r = response_massless(a, get_switching("gaussian"), TIGHT)
    assert r.converged
    assert r.value == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("a", [-10.0, -1.0, 0.0, 1.0, 10.0])
def test_exponential_massless_closed_form(a):
    exact = (1.0 - a * math.atan2(1.0, a)) / (2 * math.pi ** 2)
    r = response_massless(a, get_switching("exponential"), TIGHT)
    assert r.value == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("a", [-3.0, 0.0, 2.0, 10.0])
def test_lorentzian_massless_closed_form(a):
    exact = math.exp(-2 * a) / 16 if a >= 0 else -a / 4 + math.exp(2 * a) / 16
    r = response_massless(a, get_switching("lorentzian"), TIGHT)
    assert r.value == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("a, exact", [(-3.0, 1.5), (-1.0, 0.5), (0.0, 0.125), (0.5, 0.03125)])
def test_sinc_massless_closed_form(a, exact):
    assert response_massless(a, get_switching("sinc"), TIGHT).value == pytest.approx(exact, rel=1e-10)


def test_sinc_vacuum_is_exactly_zero():
    for a in (1.0, 1.5, 7.0):
        r = response_massless(a, get_switching("sinc"))
        assert r.value == 0.0 and r.converged


def test_sinc_massive_closed_form():
    a, m = -2.0, 0.5
    prim = lambda w: 0.5 * (w * math.sqrt(w * w - m * m) - m * m * math.log(w + math.sqrt(w * w - m * m)))
    exact = math.pi ** 2 * (prim(3.0) - prim(1.0)) / (4 * math.pi ** 2)
    assert response_massive(a, m, get_switching("sinc"), TIGHT).value == pytest.approx(exact, rel=1e-9)


def test_massive_response_decreases_with_mass():
    sw = get_switching("gaussian")
    vals = [response_massive(-3.0, m, sw).value for m in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert response_massive(-3.0, 0.0, sw).value == pytest.approx(response_massless(-3.0, sw).value)
    with pytest.raises(ConfigError):
        response_massive(0.0, -1.0, sw)


@pytest.mark.parametrize("kind", ["exponential", "sinc", "lorentzian", "gaussian"])
@pytest.mark.parametrize("a", [-20.0, -1.0, 0.0, 1.0, 20.0])
def test_zero_mass_consistency(kind, a):
    sw = get_switching(kind)
    massive, massless = response_massive(a, 0.0, sw), response_massless(a, sw)
    budget = massive.abs_error_estimate + massless.abs_error_estimate
    assert abs(massive.value - massless.value) <= budget


def test_nonnegativity_over_random_requests():
    rng = np.random.default_rng(7)
    kinds = ["exponential", "sinc", "lorentzian", "gaussian"]
    for i in range(24):
        sw = get_switching(kinds[i % 4])
        a, m = float(rng.uniform(-20.0, 20.0)), float(rng.uniform(0.0, 10.0))
        assert response_massless(a, sw).value >= 0.0
        assert response_massive(a, m, sw).value >= 0.0
    for i in range(8):
        kind = kinds[i % 4]
        a = float(rng.uniform(-30.0, 6.0))
        lam = float(10 ** rng.uniform(-7.0, -4.0))
        b = response_breakdown(_req(kind, a, lam))
        assert b.f0 >= 0.0 and b.excess >= 0.0
        assert math.isnan(b.delta) or b.delta >= 0.0


# ---------------------------------------------------------
# Monte-Carlo-Orakel ueber d^3k
# ---------------------------------------------------------

def _gaussian_sampler(sigma):
    def draw(rng, n):
        k = sigma * rng.standard_normal((n, 3))
        r2 = np.sum(k * k, axis=1)
        pdf = (2 * math.pi * sigma ** 2) ** -1.5 * np.exp(-r2 / (2 * sigma ** 2))
        return np.sqrt(r2), pdf
    return draw


def _shell_sampler(w_lo, w_hi, m):
    # w gleichverteilt auf [w_lo, w_hi]: p(k) = 1 / (4 pi k w (w_hi - w_lo))
    def draw(rng, n):
        w = w_lo + (w_hi - w_lo) * rng.random(n)
        k = np.sqrt(w * w - m * m)
        return k, 1.0 / (4 * math.pi * k * w * (w_hi - w_lo))
    return draw


def _mc_response(kind, a, m, draw, n=200_000, seed=20240611):
    """int d^3k / ((2 pi)^3 2 w) chi~^2(w + a), importance sampled."""
    rng = np.random.default_rng(seed)
    sw = get_switching(kind)
    k, pdf = draw(rng, n)
    w = np.sqrt(k * k + m * m)
    chi2 = np.array([sw.fourier_sq(x) for x in w + a])
    samples = chi2 / ((2 * math.pi) ** 3 * 2 * w) / pdf
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(n))


@pytest.mark.parametrize("kind, a, m, draw", [
    ("gaussian", -2.0, 0.5, _gaussian_sampler(2.0)),
    ("lorentzian", -1.0, 0.3, _gaussian_sampler(3.0)),
    ("sinc", -2.0, 0.5, _shell_sampler(1.0, 3.0, 0.5)),
])
def test_massive_response_against_monte_carlo(kind, a, m, draw):
    mean, sigma = _mc_response(kind, a, m, draw)
    value = response_massive(a, m, get_switching(kind), TIGHT).value
    assert abs(value - mean) <= 3.0 * sigma


# ---------------------------------------------------------
# Excess / Delta
# ---------------------------------------------------------

def test_excess_vanishes_at_zero_scale():
    r = nonlocal_excess(_req("gaussian", -10.0, 0.0))
    assert r.value == 0.0 and r.converged


def test_excess_positive_and_quadratic_in_scale():
    e1 = nonlocal_excess(_req("gaussian", 1e-3, 1e-5)).value
    e2 = nonlocal_excess(_req("gaussian", 1e-3, 2e-5)).value
    assert e1 > 0
    assert e2 / e1 == pytest.approx(4.0, rel=1e-3)


def test_short_time_sign_symmetry():
    plus = nonlocal_excess(_req("gaussian", 1e-4, 1e-5)).value
    minus = nonlocal_excess(_req("gaussian", -1e-4, 1e-5)).value
    assert plus == pytest.approx(minus, rel=1e-3)


# ---------------------------------------------------------
# exponentielles Fenster: 1/w^4-Schwanz von chi~^2
# ---------------------------------------------------------

def _exp_window_large_mass(a, m):
    # chi~^2 = 4/(1+(w+a)^2)^2 ~ 4 [w^-4 - 4a w^-5 + (10a^2 - 2) w^-6]
    return 4 / (3 * m ** 2) - math.pi * a / m ** 3 + 4 * (10 * a * a - 2) * 2 / (15 * m ** 4)


@pytest.mark.parametrize("a, m", [(0.0, 1e6), (5.0, 1e4), (-5.0, 1e4), (1e-3, 1e9)])
def test_exponential_window_large_mass_inner_integral(a, m):
    r = response_massive(a, m, get_switching("exponential"), measure=1.0)
    assert r.converged, r.message
    assert r.value == pytest.approx(_exp_window_large_mass(a, m), rel=1e-6)


def test_exponential_window_short_time_excess_converges():
    r = nonlocal_excess(_req("exponential", 1e-3, 1e-5))
    assert r.converged, r.message
    assert r.value > 0
    assert r.abs_error_estimate <= 1e-6 * r.value


def test_exponential_window_log_corrected_slope():
    lams = (1e-5, 2e-5)
    ex = [nonlocal_excess(_req("exponential", 1e-3, lam)).value for lam in lams]
    slope = math.log(ex[1] / ex[0]) / math.log(2.0)
    shift = sum(8.0 / 3.0 * MEASURE * lam ** 2 / e for lam, e in zip(lams, ex)) / 2
    assert slope == pytest.approx(2.0 - shift, abs=0.01)
    assert slope < 1.99


@pytest.mark.slow
def test_exponential_window_emission_point():
    sw = get_switching("exponential")
    causal = get_spectral("causal-set")
    r = nonlocal_excess(ResponseRequest(-1e3, 1e-9, sw, causal, Tolerance()))
    assert r.converged, r.message
    asym = asymptotic_excess(-1e3, 1e-9, sw, plateau=causal.plateau)
    assert abs(r.value - asym) / r.value <= 0.01


def test_breakdown_fields_and_regime():
    b = response_breakdown(_req("lorentzian", -200.0, 1e-7))
    assert b.converged
    assert b.excess == pytest.approx(b.delta * b.f0, rel=1e-12)
    assert b.regime.time_regime is TimeRegime.LONG
    assert b.evaluations > 0


def test_delta_independent_of_measure_constant():
    req = _req("gaussian", -30.0, 1e-4)
    base = response_breakdown(req)
    unit = response_breakdown(req, measure=1.0)
    assert unit.delta == base.delta
    assert unit.f0 == pytest.approx(base.f0 / MEASURE, rel=1e-14)
    assert unit.excess == pytest.approx(base.excess / MEASURE, rel=1e-14)


def test_division_guard():
    req = _req("sinc", 2.0, 1e-3)
    with pytest.raises(DivisionGuardError) as e:
        relative_response(req)
    assert e.value.f0 == 0.0 and e.value.excess == 0.0
    b = response_breakdown(req)
    assert math.isnan(b.delta) and "abs_tol" in b.message


def test_request_validation():
    with pytest.raises(ConfigError) as e:
        _req("gaussian", math.nan, 1e-3)
    assert e.value.field == "a"
    with pytest.raises(ConfigError) as e:
        _req("gaussian", 1.0, -1e-3)
    assert e.value.field == "lambda"
    with pytest.raises(ConfigError):
        EngineSettings(window_rel=0.5)


# ---------------------------------------------------------
# Asymptotik
# ---------------------------------------------------------

def test_asymptotic_excess_formula():
    sw = get_switching("gaussian")
    lam, a = 1e-4, -50.0
    expected = lam ** 2 * abs(a) ** 3 * sw.ft_norm_squared() / (6 * math.pi ** 2)
    assert asymptotic_excess(a, lam, sw) == pytest.approx(expected, rel=1e-14)
    assert asymptotic_excess(a, lam, sw, plateau=math.pi) == pytest.approx(math.pi * expected, rel=1e-14)
    assert asymptotic_excess(a, 0.0, sw) == 0.0


@pytest.mark.parametrize("a, lam", [(5.0, 1e-4), (-5.0, 1e-4), (-50.0, 1e-3), (-50.0, -1e-4)])
def test_asymptotic_excess_preconditions(a, lam):
    with pytest.raises(ConfigError):
        asymptotic_excess(a, lam, get_switching("gaussian"))


def test_asymptotic_delta():
    assert asymptotic_delta(1e22, 1e-19) == pytest.approx((1e3 / C_LIGHT) ** 2, rel=1e-14)
    assert asymptotic_delta(-1e22, 1e-19) == asymptotic_delta(1e22, 1e-19)


def test_excess_approaches_asymptotic_form():
    sw = get_switching("gaussian")
    ex = nonlocal_excess(ResponseRequest(-50.0, 1e-4, sw, EXP_RHO, TIGHT)).value
    asym = asymptotic_excess(-50.0, 1e-4, sw)
    assert abs(ex - asym) / ex <= 0.01


@pytest.mark.slow
def test_scale_dependent_residual_shrinks_fourfold():
    sw = get_switching("gaussian")
    lams = [1e-4, 5e-5, 2.5e-5]
    r = [nonlocal_excess(ResponseRequest(-50.0, lam, sw, EXP_RHO, TIGHT)).value
         / asymptotic_excess(-50.0, lam, sw) - 1.0 for lam in lams]
    d1, d2 = r[0] - r[1], r[1] - r[2]
    assert d1 / d2 == pytest.approx(4.0, rel=0.1)
