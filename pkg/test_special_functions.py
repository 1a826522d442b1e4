import math

import pytest

from errors import SpecialFunctionDomainError
from special_functions import (EULER_GAMMA, SCALED_ASYMPTOTIC_SWITCH, CutSide, erfc,
                               expint_E1, expint_E2, expint_E2_complex, expint_E2_on_cut,
                               expint_Ei, scaled_cut_real)


@pytest.mark.parametrize("x, ei, e1, e2", [
    (0.5, 0.45421990486317358, 0.55977359477616081, 0.32664386232455301),
    (1.0, 1.8951178163559368, 0.21938393439552026, 0.14849550677592205),
    (5.0, 40.185275355803177, 0.0011482955912753257, 0.00099646904270883803),
])
def test_real_axis_values(x, ei, e1, e2):
    assert expint_Ei(x) == pytest.approx(ei, rel=1e-13)
    assert expint_E1(x) == pytest.approx(e1, rel=1e-13)
    assert expint_E2(x) == pytest.approx(e2, rel=1e-10)


def test_e2_at_zero_is_one():
    assert expint_E2(0.0) == 1.0


def test_ei_small_argument_log_behaviour():
    x = 1e-10
    assert expint_Ei(x) == pytest.approx(EULER_GAMMA + math.log(x) + x, rel=1e-12)


@pytest.mark.parametrize("fn, x", [
    (expint_Ei, 0.0), (expint_Ei, -1.0), (expint_Ei, 800.0), (expint_Ei, 1e-320),
    (expint_Ei, math.nan), (expint_E1, 0.0), (expint_E2, -0.5), (expint_E2, math.inf),
])
def test_domain_errors(fn, x):
    with pytest.raises(SpecialFunctionDomainError):
        fn(x)


@pytest.mark.parametrize("x", [0.25, 1.0, 3.0, 12.0])
def test_cut_value_matches_complex_branch_just_above(x):
    above = expint_E2_on_cut(x, "above")
    near = expint_E2_complex(complex(-x, 1e-12 * max(1.0, x)))
    assert above.side is CutSide.ABOVE
    assert above.real_part == pytest.approx(near.real, rel=1e-8)
    assert above.imag_part == pytest.approx(near.imag, rel=1e-8)
    assert above.imag_part == pytest.approx(-math.pi * x, rel=1e-15)


def test_below_cut_is_conjugate():
    up, down = expint_E2_on_cut(2.0, CutSide.ABOVE), expint_E2_on_cut(2.0, CutSide.BELOW)
    assert down.as_complex() == up.as_complex().conjugate()
    assert up.abs_squared() == pytest.approx(abs(up.as_complex()) ** 2, rel=1e-14)


def test_cut_rejects_off_side_and_bad_x():
    with pytest.raises(SpecialFunctionDomainError):
        expint_E2_on_cut(1.0, CutSide.OFF)
    with pytest.raises(SpecialFunctionDomainError):
        expint_E2_on_cut(1.0, "sideways")
    with pytest.raises(SpecialFunctionDomainError):
        expint_E2_on_cut(0.0)


def test_scaled_cut_real_matches_unscaled_form():
    for u in (0.1, 1.0, 7.5, 30.0):
        direct = expint_E2_on_cut(u).real_part * math.exp(-u)
        assert scaled_cut_real(u) == pytest.approx(direct, rel=1e-11)


def test_scaled_cut_real_is_continuous_at_series_switch():
    below = scaled_cut_real(SCALED_ASYMPTOTIC_SWITCH)
    above = scaled_cut_real(SCALED_ASYMPTOTIC_SWITCH + 1e-9)
    assert above == pytest.approx(below, rel=1e-10)


def test_scaled_cut_real_limits():
    assert scaled_cut_real(0.0) == 1.0
    u = 1e6
    assert scaled_cut_real(u) == pytest.approx(-(1 / u + 2 / u ** 2), rel=1e-10)
    with pytest.raises(SpecialFunctionDomainError):
        scaled_cut_real(-1.0)


def test_erfc():
    assert erfc(0.0) == 1.0
    assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-14)
