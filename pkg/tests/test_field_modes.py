import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mincouple import bath_model as bm
from mincouple import field_modes as fm
from mincouple import memory_dynamics as md
from mincouple.errors import AmplifierRegime, ModelValidationError, Overdamped
from mincouple.io import read_csv


def test_mode_frequencies():
    p = fm.ScalarFieldParams(2.0, 1.0, 4.0, n_max=3)
    np.testing.assert_allclose(fm.mode_frequencies(p), 2.0 * np.arange(1, 4) * math.pi / 2.0)


def test_static_limit():
    p = fm.ScalarFieldParams(1.0, 1.0, 2.0, n_max=10_000)
    for x, xp in ((0.1, 0.3), (0.5, 0.5), (0.9, 0.2)):
        g = fm.green_function(x, xp, 1e-10, p, bm.StepKernel(0.1))
        assert g.value.real == pytest.approx(fm.static_green(x, xp, p), abs=1e-4)


def test_undamped_green_closed_form():
    L, lam, mu, s = 1.5, 2.0, 3.0, 0.8
    p = fm.ScalarFieldParams(L, lam, mu, n_max=200_000)
    k = s * math.sqrt(lam / mu)
    x, xp = 0.4, 1.1
    ref = math.sinh(k * x) * math.sinh(k * (L - xp)) / (mu * k * math.sinh(k * L))
    g = fm.green_function(x, xp, s, p)
    assert g.value.real == pytest.approx(ref, abs=g.tail_bound)
    assert abs(g.value.real - ref) < 1e-5


@settings(max_examples=20)
@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.05, max_value=5.0), st.integers(min_value=16, max_value=2048))
def test_truncation_convergence(x, xp, s, N):
    p = fm.ScalarFieldParams(1.0, 1.0, 1.0)
    k = bm.StepKernel(0.2)
    a = fm.green_function(x, xp, s, p, k, n_max=N)
    b = fm.green_function(x, xp, s, p, k, n_max=2 * N)
    assert abs(a.value - b.value) <= a.tail_bound
    assert a.tail_bound <= 2.0 / (math.pi ** 2 * N) * 1.01


@pytest.mark.parametrize("n", [1, 2, 5, 20, 100])
def test_poles_match_mode_rates(n):
    p = fm.ScalarFieldParams(1.0, 2.0, 3.0)
    beta = 0.3
    lo, hi = fm.green_poles(p, n, beta)
    w = fm.mode_frequencies(p, n)[-1]
    g = beta / (2 * p.lam)
    W = math.sqrt(w * w - g * g)
    assert abs(lo - complex(-g, -W)) < 1e-10 and abs(hi - complex(-g, W)) < 1e-10


def test_poles_match_mode_solution():
    # the pole pair reproduces the mode trajectory as a sum of two exponentials
    p = fm.ScalarFieldParams(1.0, 1.0, 1.0)
    beta, x0, v0 = 0.4, 0.7, -0.2
    s1, s2 = fm.green_poles(p, 3, beta)
    t = np.linspace(0.0, 10.0, 101)
    a = (v0 - s2 * x0) / (s1 - s2)
    b = x0 - a
    from_poles = (a * np.exp(s1 * t) + b * np.exp(s2 * t)).real
    np.testing.assert_allclose(fm.mode_solution(p, 3, t, x0, v0, beta), from_poles, atol=1e-12)


def test_mode_oscillator_equivalence():
    p = fm.ScalarFieldParams(1.0, 1.5, 2.0)
    beta, x0, v0 = 0.3, 1.0, 0.5
    sys = fm.mode_oscillator(p, 2, beta, x0, v0)
    traj = md.evolve_mean(sys, 5.0, 1e-4)
    np.testing.assert_allclose(traj.q, fm.mode_solution(p, 2, traj.t, x0, v0, beta), atol=1e-6)
    q, _ = md.analytic_underdamped(sys, traj.t)
    np.testing.assert_allclose(q, fm.mode_solution(p, 2, traj.t, x0, v0, beta), atol=1e-12)


def test_overdamped_mode():
    p = fm.ScalarFieldParams(1.0, 1.0, 1.0)
    with pytest.raises(Overdamped):
        fm.mode_solution(p, 1, [1.0], 1.0, 0.0, beta=10.0)
    rows = fm.mode_table(fm.ScalarFieldParams(1.0, 1.0, 1.0, n_max=3), beta=10.0)
    assert math.isnan(rows[0][2]) and not math.isnan(rows[-1][2])


def test_tables_csv(tmp_path):
    p = fm.ScalarFieldParams(1.0, 1.0, 1.0, n_max=4)
    fm.mode_table(p, 0.1, tmp_path / "m.csv")
    head, data = read_csv(tmp_path / "m.csv")
    assert tuple(head) == fm.MODE_HEADER and data.shape == (4, 3)
    fm.green_grid([0.2, 0.6], 1.0, p, bm.StepKernel(0.1), tmp_path / "g.csv")
    head, data = read_csv(tmp_path / "g.csv")
    assert tuple(head) == fm.GREEN_HEADER and data.shape == (4, 4)
    # reciprocity G(x, x') = G(x', x)
    assert data[1, 2] == pytest.approx(data[2, 2])


def test_green_domain_checks():
    p = fm.ScalarFieldParams(1.0, 1.0, 1.0)
    with pytest.raises(ModelValidationError):
        fm.green_function(1.5, 0.2, 1.0, p)
    with pytest.raises(ModelValidationError):
        fm.ScalarFieldParams(-1.0, 1.0, 1.0)


def test_vector_reduce_zero_width():
    p = fm.VectorModeParams(2.0, 1.5, 0.36, 0.1)
    sys = fm.vector_mode_reduce(p)
    assert sys.m == 2.0 and sys.omega0 == pytest.approx(0.8 * 1.5)
    assert sys.position_kernel is None


def test_vector_reduce_alpha_zero_allowed():
    sys = fm.vector_mode_reduce(fm.VectorModeParams(1.0, 1.0, 0.0, 0.1))
    assert sys.omega0 == 1.0


@pytest.mark.parametrize("alpha", [1.0, 1.5, -0.1])
def test_vector_reduce_amplifier(alpha):
    with pytest.raises(AmplifierRegime):
        fm.vector_mode_reduce(fm.VectorModeParams(1.0, 1.0, alpha, 0.1))


def test_vector_reduce_finite_width_approaches_limit():
    alpha = 0.36
    p = fm.VectorModeParams(1.0, 1.0, alpha, 0.0, delta=1e-3)
    sys = fm.vector_mode_reduce(p)
    assert isinstance(sys.position_kernel, bm.BoxKernel)
    traj = md.evolve_mean(sys, 40.0, 1e-3)
    ref = fm.vector_mode_reduce(fm.VectorModeParams(1.0, 1.0, alpha, 0.0))
    crossings = traj.t[1:][np.diff(np.sign(traj.q)) > 0]
    assert np.mean(np.diff(crossings)) == pytest.approx(2 * math.pi / ref.omega0, rel=1e-3)
