import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from mincouple import bath_model as bm
from mincouple.errors import IRDivergent, ModelValidationError, UnphysicalKernel

ONE, THREE = bm.Geometry.ONE_D, bm.Geometry.THREE_D

pos = st.floats(min_value=1e-2, max_value=1e2)
closed_kernels = st.one_of(
    st.builds(bm.StepKernel, pos),
    st.builds(bm.ExponentialKernel, pos, st.floats(min_value=0.05, max_value=20.0)),
    st.builds(bm.BoxKernel, st.floats(min_value=0.01, max_value=0.99), pos, pos,
              st.floats(min_value=0.05, max_value=10.0)),
)
geometries = st.sampled_from(list(bm.Geometry))


def test_prefactors_natural_units():
    assert bm.prefactor(ONE) == pytest.approx(8 * math.pi, rel=1e-15)
    assert bm.prefactor(THREE) == pytest.approx(16 * math.pi / 3, rel=1e-15)
    assert bm.inverse_prefactor(ONE) == pytest.approx(1 / (4 * math.pi ** 2), rel=1e-15)
    assert bm.inverse_prefactor(THREE) == pytest.approx(3 / (8 * math.pi ** 2), rel=1e-15)


def test_prefactor_with_units():
    c = bm.PhysConsts(hbar=1.0545718e-34, c=2.99792458e8, kB=1.380649e-23)
    assert bm.prefactor(ONE, c) == pytest.approx(8 * math.pi / (c.hbar * c.c ** 3), rel=1e-15)


@pytest.mark.parametrize("beta", [0.01, 0.1, 1.0])
def test_ohmic_coupling_closed_form(beta):
    w = np.logspace(-2, 2, 50)
    f1 = bm.ohmic_step(beta, ONE).f2(w)
    f3 = bm.ohmic_step(beta, THREE).f2(w)
    np.testing.assert_allclose(f1, beta / (4 * math.pi ** 2 * w ** 3), rtol=1e-14)
    np.testing.assert_allclose(f3, 3 * beta / (8 * math.pi ** 2 * w ** 3), rtol=1e-14)


def test_box_coupling_closed_form():
    a, m, w0, d = 0.5, 1.3, 0.7, 2.0
    w = np.logspace(-2, 2, 50)
    x = 0.5 * w * d
    want = 3 * a * m * w0 ** 2 / (8 * math.pi ** 2 * w ** 2) * np.sin(x) ** 2 / x
    np.testing.assert_allclose(bm.box_coupling(a, m, w0, d).f2(w), want, rtol=1e-13)


def test_box_kernel_values():
    k = bm.BoxKernel(0.5, 2.0, 1.5, 2.0)
    h = 0.5 * 2.0 * 1.5 ** 2 / 2.0
    np.testing.assert_allclose(k(np.array([0.25, 1.0, 1.999])), h)
    assert k(2.5) == 0.0 and k(-0.1) == 0.0


@pytest.mark.parametrize("tau", [0.1, 1.0])
def test_exponential_sine_transform_vs_mpmath(tau):
    k = bm.ExponentialKernel(1.0, tau)
    for w in (0.3, 2.0):
        ref = mpmath.quad(lambda t: mpmath.exp(-t / tau) * mpmath.sin(w * t), [0, mpmath.inf])
        assert float(k.sine_transform(w)) == pytest.approx(float(ref), rel=1e-10)


def test_tabulated_kernel_sine_transform_vs_dawson():
    # chi = 1 - exp(-t**2): transform 1/w - D(w/2) with D the Dawson function
    t = np.linspace(0.0, 120.0, 12001)
    k = bm.TabulatedKernel(t, 1.0 - np.exp(-t ** 2))
    w = np.array([0.5, 1.0, 3.0, 7.0])
    np.testing.assert_allclose(k.sine_transform(w), 1 / w - special.dawsn(w / 2), rtol=1e-6)


def test_tabulated_coupling_exponential_roundtrip():
    k = bm.ExponentialKernel(1.0, 1.0)
    grid = np.logspace(-4, 4, 6000)
    tab = bm.TabulatedCoupling(grid, bm.KernelCoupling(k).f2(grid))
    t = np.logspace(-2, 1.5, 50)
    err = np.max(np.abs(bm.susceptibility_from_coupling(tab, ONE, t) - k(t)))
    assert err < 1e-5 * np.max(k(t))


def test_tabulated_step_coupling_gives_constant():
    grid = np.logspace(-4, 4, 6000)
    tab = bm.TabulatedCoupling(grid, bm.ohmic_step(0.1).f2(grid))
    t = np.logspace(-2, 2, 60)
    np.testing.assert_allclose(bm.susceptibility_from_coupling(tab, ONE, t), 0.1, atol=1e-8)


def test_tabulated_coupling_slow_tail_rejected():
    from mincouple.errors import NonConvergent

    w = np.logspace(-2, 2, 400)
    tab = bm.TabulatedCoupling(w, w ** -2.5)  # w^2 |f|^2 ~ w^-0.5
    with pytest.raises(NonConvergent):
        bm.susceptibility_from_coupling(tab, ONE, 1.0)


def test_csv_roundtrip(tmp_path):
    t = np.linspace(0, 5, 11)
    k = bm.TabulatedKernel(t, 1 - np.exp(-t))
    k.to_csv(tmp_path / "k.csv")
    k2 = bm.load_tabulated(tmp_path / "k.csv")
    assert isinstance(k2, bm.TabulatedKernel)
    np.testing.assert_array_equal(k2.chi_samples, k.chi_samples)
    w = np.logspace(-1, 1, 11)
    c = bm.TabulatedCoupling(w, w ** -3)
    c.to_csv(tmp_path / "c.csv")
    c2 = bm.load_tabulated(tmp_path / "c.csv")
    np.testing.assert_array_equal(c2.f2_samples, c.f2_samples)


def test_load_rejects_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n3,4\n")
    with pytest.raises(ModelValidationError):
        bm.load_tabulated(p)


def test_load_rejects_unsorted(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,chi\n0,0\n2,1\n1,1\n")
    with pytest.raises(ModelValidationError):
        bm.load_tabulated(p)


def test_unphysical_kernel_detected():
    t = np.linspace(0.0, 100.0, 10001)
    k = bm.TabulatedKernel(t, np.where(t < 3 * np.pi, np.sin(t), 0.0))
    with pytest.raises(UnphysicalKernel):
        bm.coupling_from_susceptibility(k, ONE, np.linspace(0.1, 5, 50))
    assert validate_fails(k)


def validate_fails(k):
    rep = bm.validate_passivity(k, np.linspace(0.1, 5, 50))
    return rep.unphysical and not rep.passed and rep.negative_regions


def test_box_amplifier_flag():
    rep = bm.validate_passivity(bm.BoxKernel(0.5, 1, 1, 1), alpha=1.2)
    assert rep.amplifier and not rep.passed
    assert bm.validate_passivity(bm.BoxKernel(0.5, 1, 1, 1)).passed


def test_kernel_laplace():
    assert bm.kernel_laplace(bm.StepKernel(0.3), 2.0) == pytest.approx(0.15)
    k = bm.ExponentialKernel(2.0, 0.5)
    s = 1.5 + 0.5j
    assert bm.kernel_laplace(k, s) == pytest.approx(2.0 / (s + 2.0), rel=1e-14)
    with pytest.raises(ModelValidationError):
        bm.kernel_laplace(k, -1.0)


def test_noise_ohmic_zero_temperature():
    bath = bm.BathSpec(ONE)
    v = bm.noise_correlation(bm.ohmic_step(0.1), bath, 0.0, (0.01, 1.0))
    assert v.imag == 0.0
    assert v.real == pytest.approx(0.1 * math.log(100) / math.pi, rel=1e-10)


def test_noise_ohmic_ir_divergence():
    with pytest.raises(IRDivergent):
        bm.noise_correlation(bm.ohmic_step(0.1), bm.BathSpec(ONE), 0.0, (0.0, 1.0))


def test_noise_thermal_vs_mpmath():
    T = 0.7
    v = bm.noise_correlation(bm.ohmic_step(0.1), bm.BathSpec(ONE, temperature=T), 0.0, (0.05, 3.0))
    ref = 0.1 / math.pi * mpmath.quad(lambda w: mpmath.coth(w / (2 * T)) / w, [0.05, 3.0])
    assert v.real == pytest.approx(float(ref), rel=1e-9)


def test_noise_finite_tau_is_hermitian_pair():
    f = bm.exponential_coupling(1.0, 1.0)
    bath = bm.BathSpec(ONE, temperature=0.5)
    a = bm.noise_correlation(f, bath, 0.8, (0.0, 50.0))
    b = bm.noise_correlation(f, bath, -0.8, (0.0, 50.0))
    assert a == pytest.approx(b.conjugate(), rel=1e-9)


def test_bose_occupation():
    assert bm.bose_occupation(1.0, 0.0) == 0.0
    assert bm.bose_occupation(2.0, 1.0) == pytest.approx(1 / math.expm1(2.0))


def test_validation_errors():
    with pytest.raises(UnphysicalKernel):
        bm.coupling_from_susceptibility(bm.StepKernel(-1.0), ONE, [1.0])
    with pytest.raises(ModelValidationError):
        bm.PhysConsts(hbar=0.0)
    with pytest.raises(ModelValidationError):
        bm.BathSpec(temperature=-1.0)


# properties


@given(closed_kernels, geometries, st.floats(min_value=-100, max_value=0))
def test_causality(k, g, t):
    assert bm.susceptibility_from_coupling(bm.KernelCoupling(k, g), g, t) == 0.0


@given(closed_kernels, st.floats(min_value=1e-2, max_value=1e2))
def test_geometry_ratio(k, t):
    f = bm.KernelCoupling(k, ONE)
    a = bm.susceptibility_from_coupling(f, THREE, t)
    b = bm.susceptibility_from_coupling(f, ONE, t)
    assert a == pytest.approx(2.0 / 3.0 * b, rel=1e-14)


@given(closed_kernels, geometries)
def test_roundtrip_closed_form(k, g):
    w = np.logspace(-2, 2, 50)
    f = bm.KernelCoupling(k, g)
    t = np.logspace(-2, 2, 50)
    np.testing.assert_allclose(bm.susceptibility_from_coupling(f, g, t), k(t), rtol=1e-8)
    f2 = bm.coupling_from_susceptibility(k, g, w)
    np.testing.assert_allclose(bm.KernelCoupling(k, g).f2(w), f2, rtol=1e-8)


@given(closed_kernels)
def test_passive_kernels_have_nonnegative_coupling(k):
    w = np.logspace(-3, 3, 601)
    if bm.validate_passivity(k, w).passed:
        assert np.all(bm.coupling_from_susceptibility(k, ONE, w) >= 0)


@given(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=0.05, max_value=0.5))
def test_noise_zero_lag_real_nonnegative(T, lo):
    bath = bm.BathSpec(ONE, temperature=T)
    v = bm.noise_correlation(bm.exponential_coupling(1.0, 1.0), bath, 0.0, (lo, 10.0))
    assert v.imag == 0.0 and v.real >= 0.0
