import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mincouple import bath_model as bm
from mincouple import two_level as tl
from mincouple.errors import IRDivergent, ModelValidationError, NonConvergent

THREE = bm.Geometry.THREE_D


def params(beta=0.1, W0=1.0, x2=1.0, g_beta=None, consts=bm.NATURAL):
    f = bm.ohmic_step(beta, THREE, consts)
    g = None if g_beta is None else bm.ohmic_step(g_beta, THREE, consts)
    return tl.TwoLevelParams(W0, x2, f, g, consts)


@given(st.floats(min_value=1e-3, max_value=1.0), st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=1e-2, max_value=10.0))
def test_decay_constant_closed_form(beta, W0, x2):
    p = params(beta, W0, x2)
    assert tl.decay_constant(p) == pytest.approx(W0 * beta * x2 / 2.0, rel=1e-12)


def test_decay_constant_with_hbar():
    c = bm.PhysConsts(hbar=3.0, c=2.0)
    p = params(0.1, 1.0, 1.0, consts=c)
    assert tl.decay_constant(p) == pytest.approx(0.1 / (2 * 3.0), rel=1e-12)


def test_g_term_carries_no_frequency_factor():
    p = tl.TwoLevelParams(2.0, 1.0, None, bm.ohmic_step(0.1, THREE))
    assert tl.decay_constant(p) == pytest.approx(0.1 / (2 * 2.0 ** 3), rel=1e-12)


def test_markov_consistency():
    p = params(0.1)
    mc = tl.markov_check(p, 1000.0, (1e-3, 1e3))
    assert mc.rel_err < 0.02
    assert mc.beta_decay == pytest.approx(0.05)


def test_markov_improves_with_time():
    p = params(0.1)
    errs = [tl.markov_check(p, t, (1e-3, 1e3)).rel_err for t in (100.0, 1000.0, 5000.0)]
    assert errs[0] > errs[1] > errs[2]


def test_memory_kernel_vs_direct_quadrature():
    p = params(0.1)
    window = (0.2, 5.0)
    tau = 1.7
    got = tl.memory_kernel_gamma(p, tau, window)
    re = integrate.quad(lambda w: float(p.h(w)) * math.cos((1.0 - w) * tau), *window, limit=200,
                        epsabs=0, epsrel=1e-12)[0]
    im = integrate.quad(lambda w: float(p.h(w)) * math.sin((1.0 - w) * tau), *window, limit=200,
                        epsabs=0, epsrel=1e-12)[0]
    assert got == pytest.approx(-p.K * complex(re, im), rel=1e-9)
    g0 = tl.memory_kernel_gamma(p, 0.0, window)
    assert g0.imag == 0.0 and g0.real < 0


def test_memory_kernel_ir_divergent():
    with pytest.raises(IRDivergent):
        tl.memory_kernel_gamma(params(0.1), 1.0, (0.0, 2.0))


def test_shift_closed_form():
    # PV int_{1/2}^{3/2} dw / (w (1 - w)) = ln 3
    p = params(0.1)
    assert tl.frequency_shift(p, (0.5, 1.5)) == pytest.approx(0.1 * math.log(3) / (2 * math.pi), rel=1e-10)


def test_shift_vs_cauchy_weight():
    p = params(0.1, W0=1.3, g_beta=0.05)
    window = (0.2, 4.0)
    ref, _ = integrate.quad(lambda w: float(p.h(w)), *window, weight="cauchy", wvar=1.3,
                            epsabs=1e-14, epsrel=1e-12)
    assert tl.frequency_shift(p, window) == pytest.approx(-p.K * ref, rel=1e-9)


@settings(max_examples=10)
@given(st.floats(min_value=0.3, max_value=3.0))
def test_shift_stable_under_excision_refinement(W0):
    p = params(0.1, W0=W0)
    window = (0.1 * W0, 3.0 * W0)
    a = tl.frequency_shift(p, window, eps=1e-2 * W0)
    b = tl.frequency_shift(p, window, eps=1e-3 * W0)
    assert abs(a - b) < 1e-6


def test_shift_infinite_window():
    p = params(0.1)
    lo = 0.5
    got = tl.frequency_shift(p, (lo, math.inf))
    # closed form: (beta / 2 pi) * PV int_lo^inf dw / (w (1 - w)) = (beta / 2 pi) ln(lo / (1 - lo))
    assert got == pytest.approx(0.1 / (2 * math.pi) * math.log(lo / (1 - lo)), abs=1e-9)


def test_shift_rejects_non_decaying_weight():
    w = np.logspace(-1, 2, 300)
    flat = bm.TabulatedCoupling(w, 1.0 / w ** 2)  # w^2 |f|^2 = 1
    p = tl.TwoLevelParams(1.0, 1.0, flat)
    with pytest.raises(NonConvergent):
        tl.frequency_shift(p, (0.5, math.inf))


def test_trivial_coupling():
    p = tl.TwoLevelParams(1.0, 0.0, bm.ohmic_step(0.1, THREE))
    assert tl.frequency_shift(p, (0.5, 1.5)) == 0.0
    assert tl.memory_kernel_gamma(p, 1.0) == 0.0


def test_report_fields():
    rep = tl.decay_report(params(0.1), (0.5, 1.5))
    assert set(rep) == {"beta", "delta", "window", "pv_epsilon"}
    assert rep["pv_epsilon"] == pytest.approx(1e-2)


def test_invalid_params():
    with pytest.raises(ModelValidationError):
        tl.TwoLevelParams(0.0, 1.0)
    with pytest.raises(ModelValidationError):
        tl.TwoLevelParams(1.0, -1.0)
    with pytest.raises(ModelValidationError):
        tl.frequency_shift(params(), (2.0, 1.0))
