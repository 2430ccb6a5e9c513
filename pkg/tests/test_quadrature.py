import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.interpolate import CubicSpline

from mincouple import _quadrature as q
from mincouple.errors import NonConvergent, QuadratureError


@given(st.floats(min_value=-60, max_value=60), st.floats(min_value=-60, max_value=60))
def test_exp_moments_vs_mpmath(re, im):
    w = complex(re, im)
    got = q.exp_moments(np.array([w]), 4)[:, 0]
    for k in range(5):
        ref = mpmath.quad(lambda u: u ** k * mpmath.exp(w * u), [0, 1])
        assert abs(got[k] - complex(ref)) <= 1e-11 * max(1.0, abs(complex(ref)))


@pytest.mark.parametrize("z", [0.3j, 5j, 40j, 400j, -2.0 + 3j])
def test_filon_exact_for_polynomials(z):
    x = np.linspace(0.0, 2.0, 9)
    pp = CubicSpline(x, x ** 3 - x)  # reproduces the cubic exactly
    got = q.ppoly_exp_integral(pp, np.array([z]))[0]
    ref = mpmath.quad(lambda s: (s ** 3 - s) * mpmath.exp(z * s), mpmath.linspace(0, 2, 200))
    assert abs(got - complex(ref)) < 1e-12 * max(1.0, abs(complex(ref)))


def test_fit_power_law():
    x = np.logspace(0, 1, 20)
    c, a = q.fit_power_law(x, 3.0 * x ** -1.7)
    assert c == pytest.approx(3.0) and a == pytest.approx(-1.7)
    assert q.fit_power_law(x, np.where(x < 3, 1.0, -1.0)) is None


@pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.5])
def test_power_tail_sine_vs_mpmath(p):
    t, x0 = 1.7, 2.0
    got = q.power_tail_sine(2.0, p, x0, t)
    ref = mpmath.quadosc(lambda x: 2.0 * x ** -p * mpmath.sin(t * x), [x0, mpmath.inf], omega=t)
    assert got == pytest.approx(float(ref), rel=1e-8)


def test_power_tail_sine_abel_constant():
    # int_x0^inf sin(tx) dx regularised -> cos(t x0) / t
    assert q.power_tail_sine(1.0, 0.0, 1.0, 2.0) == pytest.approx(math.cos(2.0) / 2.0)


def test_power_tail_growing_rejected():
    with pytest.raises(NonConvergent):
        q.power_tail_sine(1.0, -0.5, 1.0, 1.0)


@pytest.mark.parametrize("qq", [-0.5, 0.0, 1.0, 2.0])
def test_power_head_sine_vs_mpmath(qq):
    got = q.power_head_sine(1.5, qq, 0.8, 3.0)
    ref = mpmath.quad(lambda x: 1.5 * x ** qq * mpmath.sin(3.0 * x), [0, 0.8])
    assert got == pytest.approx(float(ref), rel=1e-10)


def test_power_tail_laplace_vs_mpmath():
    s = 0.7 + 2.0j
    got = q.power_tail_laplace(1.0, 1.5, 1.0, s)
    ref = mpmath.quad(lambda x: x ** -1.5 * mpmath.exp(-s * x), [1, mpmath.inf])
    assert abs(got - complex(ref)) < 1e-8


def test_principal_value_vs_cauchy_weight():
    f = lambda x: math.exp(-x) * (1 + x)  # noqa: E731
    got = q.principal_value(f, 0.0, 3.0, 1.2, 1e-2)
    # scipy computes PV int f(x) / (x - c); ours divides by (pole - x)
    ref, _ = integrate.quad(f, 0.0, 3.0, weight="cauchy", wvar=1.2, epsabs=1e-13)
    assert got == pytest.approx(-ref, rel=1e-9)


@given(st.floats(min_value=0.2, max_value=2.8))
def test_principal_value_linear_closed_form(c):
    # PV int_0^3 1 / (c - x) dx = ln(c / (3 - c))
    got = q.principal_value(lambda x: 1.0, 0.0, 3.0, c, min(1e-2, 0.5 * c, 0.5 * (3 - c)))
    assert got == pytest.approx(math.log(c / (3 - c)), rel=1e-8, abs=1e-10)


def test_checked_quad_raises():
    with pytest.raises(QuadratureError):
        q.checked_quad(lambda x: math.sin(1 / x) / x, 1e-9, 1.0, rtol=1e-13, limit=5)
