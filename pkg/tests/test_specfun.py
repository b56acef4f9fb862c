import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from stabletool import GammaPoleError, gamma_fn, reflection_product
from stabletool.errors import DomainError
from stabletool.specfun import gamma_ratio, odd_stable_constant, stable_constant


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0)])
def test_gamma_exact_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-15)


@given(st.floats(-19.5, 20.0).filter(lambda x: abs(x - round(x)) > 1e-3 or x > 0.5))
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)


@pytest.mark.parametrize("pole", [0.0, -1.0, -7.0, -3.0 + 5e-9])
def test_gamma_poles_raise(pole):
    with pytest.raises(GammaPoleError):
        gamma_fn(pole)


def test_gamma_near_pole_is_finite():
    assert math.isfinite(gamma_fn(-2.0 + 1e-6))


@pytest.mark.parametrize("x, expected", [(0.5, math.pi), (0.25, math.pi * math.sqrt(2))])
def test_reflection_values(x, expected):
    assert reflection_product(x) == pytest.approx(expected, rel=1e-14)


@given(st.floats(-4.9, 4.9).filter(lambda x: abs(x - round(x)) > 1e-3))
def test_reflection_matches_product(x):
    assert reflection_product(x) == pytest.approx(gamma_fn(x) * gamma_fn(1 - x), rel=1e-12)


def test_reflection_integer_raises():
    with pytest.raises(DomainError):
        reflection_product(2.0)


def test_gamma_ratio_at_pole_is_zero():
    assert gamma_ratio(1.5, -2.0) == 0.0
    assert gamma_ratio(3.0, 2.0) == pytest.approx(2.0)


def _tail(s):
    """``int_1^inf e^{it} t^{-1-2s} dt`` through the upper incomplete gamma function."""
    a = 1 + 2 * s
    return mpmath.exp(1j * mpmath.pi * (1 - a) / 2) * mpmath.gammainc(1 - a, -1j)


@pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.7, 0.9])
def test_stable_constant_matches_radial_integral(s):
    # int_0^inf (1 - cos t) t^{-1-2s} dt by oscillatory quadrature
    with mpmath.workdps(30):
        # the leading term t^2/2 is integrated exactly
        f = lambda t: (2 * mpmath.sin(t / 2) ** 2 - t ** 2 / 2) * t ** (-1 - 2 * s)
        near = mpmath.quad(f, [0, 1]) + 1 / (2 * (2 - 2 * s))
        ref = near + 1 / (2 * s) - _tail(s).real
    assert stable_constant(s) == pytest.approx(float(ref), rel=1e-10)


def test_stable_constant_quarter_is_sqrt_2pi():
    assert 2 * stable_constant(0.25) == pytest.approx(2 * math.sqrt(2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("s", [0.15, 0.3, 0.45])
def test_odd_constant_matches_sine_integral(s):
    with mpmath.workdps(30):
        f = lambda t: (mpmath.sin(t) - t) * t ** (-1 - 2 * s)
        ref = mpmath.quad(f, [0, 1]) + 1 / (1 - 2 * s) + _tail(s).imag
    assert odd_stable_constant(s) == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("s", [0.6, 0.8])
def test_odd_constant_compensated_above_half(s):
    f1 = lambda t: (mpmath.sin(t) - t) * t ** (-1 - 2 * s)
    with mpmath.workdps(30):
        ref = mpmath.quad(f1, [0, 1]) + _tail(s).imag - 1 / (2 * s - 1)
    assert odd_stable_constant(s) == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.2, 1.5])
def test_stable_constant_domain(s):
    with pytest.raises(DomainError):
        stable_constant(s)


def test_odd_constant_singular_at_half():
    with pytest.raises(DomainError):
        odd_stable_constant(0.5)


def test_stable_constant_continuous_through_half():
    vals = [stable_constant(0.5 + d) for d in (-1e-7, 0.0, 1e-7)]
    assert np.ptp(vals) < 1e-6
    assert vals[1] == pytest.approx(math.pi / 2)
