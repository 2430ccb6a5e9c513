import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mincouple import bath_model as bm
from mincouple import transitions as tr
from mincouple.errors import DeltaRegularization, ModelValidationError
from mincouple.io import read_csv

pos = st.floats(min_value=1e-2, max_value=1e2)


@pytest.mark.parametrize("beta", [0.01, 0.1, 1.0])
@pytest.mark.parametrize("n", [1, 2, 7])
def test_vacuum_rate_ohmic(beta, n):
    for m in (0.5, 1.0, 3.0):
        for w0 in (0.2, 1.0, 5.0):
            got = tr.rate_vacuum_down(n, m, w0, bm.ohmic_step(beta))
            assert got == pytest.approx(n * beta / m, rel=1e-12)


def test_vacuum_rate_generic_coupling():
    # tabulated coupling has no kernel shortcut; the golden-rule base must still agree
    w = np.logspace(-2, 2, 200)
    tab = bm.TabulatedCoupling(w, bm.ohmic_step(0.1).f2(w))
    assert tr.rate_vacuum_down(2, 1.0, 1.0, tab) == pytest.approx(0.2, rel=1e-5)


def test_three_d_ohmic_base():
    assert tr.golden_rule_base(1.0, 1.0, bm.ohmic_step(0.1, bm.Geometry.THREE_D)) == pytest.approx(0.15)


def test_example_two_quanta():
    rep = tr.rates_thermal(2, 0.0, 1.0, 1.0, bm.ohmic_step(0.1))
    assert rep.gamma_down == 0.2 and rep.gamma_up == 0.0
    assert rep.basis is tr.Basis.VACUUM


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_detailed_balance(n, x):
    rep = tr.rates_thermal(n, 1.0 / x, 1.0, 1.0, bm.ohmic_step(0.1))
    assert rep.gamma_down / rep.gamma_up == pytest.approx(n / (n + 1) * math.exp(x), rel=1e-12)


def test_detailed_balance_uses_hbar():
    c = bm.PhysConsts(hbar=2.0, kB=0.5)
    rep = tr.rates_thermal(1, 3.0, 1.0, 1.5, bm.ohmic_step(0.1, consts=c), c)
    x = 2.0 * 1.5 / (0.5 * 3.0)
    assert rep.gamma_down / rep.gamma_up == pytest.approx(0.5 * math.exp(x), rel=1e-12)


@given(st.integers(min_value=1, max_value=20), st.floats(min_value=2.0, max_value=30.0))
def test_vacuum_limit(n, x):
    f = bm.ohmic_step(0.1)
    rep = tr.rates_thermal(n, 1.0 / x, 1.0, 1.0, f)
    vac = tr.rate_vacuum_down(n, 1.0, 1.0, f)
    assert abs(rep.gamma_down - vac) / vac < 10 * math.exp(-x)


@given(st.integers(min_value=1, max_value=50), pos, pos, pos, st.floats(min_value=0, max_value=10))
def test_linear_in_n(n, beta, m, w0, T):
    f = bm.ohmic_step(beta)
    a = tr.rates_thermal(n, T, m, w0, f).gamma_down
    b = tr.rates_thermal(2 * n, T, m, w0, f).gamma_down
    assert b / a == pytest.approx(2.0, rel=1e-14)


def test_thermal_factors():
    assert tr.thermal_factors(1.0, 0.0) == (1.0, 0.0)
    e, a = tr.thermal_factors(1.0, 1.0)
    assert e - a == pytest.approx(1.0)
    assert a == pytest.approx(1 / math.expm1(1.0))
    assert tr.thermal_factors(1.0, 1e-4) == (1.0, 0.0)
    with pytest.raises(ModelValidationError):
        tr.thermal_factors(1.0, -1.0)


def test_excited_environment_needs_line_density():
    f = bm.ohmic_step(0.1)
    with pytest.raises(DeltaRegularization):
        tr.rates_excited_env(1, 2, 1.0, 1.0, f)
    rep0 = tr.rates_excited_env(1, 0, 1.0, 1.0, f)
    assert rep0.gamma_up == 0.0 and rep0.gamma_down == pytest.approx(0.1)


def test_excited_environment_scaling():
    f = bm.ohmic_step(0.1)
    base = tr.rates_excited_env(1, 1, 1.0, 1.0, f, line_density=1.0).gamma_up
    assert base == pytest.approx(2 * 0.1 / (4 * math.pi), rel=1e-12)
    assert tr.rates_excited_env(1, 3, 1.0, 1.0, f, line_density=2.0).gamma_up == pytest.approx(6 * base)
    assert tr.rates_excited_env(2, 1, 1.0, 1.0, f, line_density=1.0).gamma_up == pytest.approx(1.5 * base)


def test_validity_window():
    rep = tr.rates_thermal(1, 0.5, 1.0, 2.0, bm.ohmic_step(0.01))
    lo, hi = rep.validity_window
    assert lo == pytest.approx(5.0)
    assert hi == pytest.approx(0.1 / max(rep.gamma_down, rep.gamma_up))


def test_report_json():
    data = json.loads(tr.rates_thermal(1, 1.0, 1.0, 1.0, bm.ohmic_step(0.1)).to_json())
    assert data["basis"] == "thermal"
    assert set(data) == {"gamma_down", "gamma_up", "basis", "validity_window", "params"}


def test_scalar_mode_rates():
    f = bm.ohmic_step(0.1)
    rep, cross = tr.scalar_mode_rates(3, 2.0, 0.5, 1.0, f, other_modes=[1.0, 3.0])
    assert rep.gamma_down == pytest.approx(3 * 0.2 * (1 + 1 / math.expm1(2.0)))
    assert cross[1.0] == pytest.approx(0.2 / math.expm1(1.0))
    rep0, cross0 = tr.scalar_mode_rates(0, 2.0, 0.5, 1.0, f, other_modes=[1.0, 3.0])
    assert cross0 == cross


def test_sweep_csv(tmp_path):
    rows = tr.rate_sweep([1, 2], [0.0, 1.0], 1.0, 1.0, bm.ohmic_step(0.1), path=tmp_path / "r.csv")
    head, data = read_csv(tmp_path / "r.csv")
    assert tuple(head) == tr.RATE_HEADER
    assert data.shape == (4, 4)
    assert rows[2] == (2, 0.0, 0.2, 0.0)


def test_invalid_inputs():
    f = bm.ohmic_step(0.1)
    with pytest.raises(ModelValidationError):
        tr.rate_vacuum_down(-1, 1.0, 1.0, f)
    with pytest.raises(ModelValidationError):
        tr.golden_rule_base(0.0, 1.0, f)
