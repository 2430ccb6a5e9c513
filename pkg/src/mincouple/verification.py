"""The nine acceptance checks, runnable from tests or the ``verify`` subcommand."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bath_model as bm
from . import discrete_bath_oracle as oracle
from . import energy_balance as eb
from . import field_modes as fm
from . import memory_dynamics as md
from . import transitions as tr
from . import two_level as tl


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float
    time_limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} [{self.number}] {self.name}: {self.detail} "
                f"({self.elapsed:.2f} s, limit {self.time_limit:g} s)")


def _relmax(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def criterion_1() -> tuple[bool, str]:
    """Closed-form transforms at 1e-8 and tabulated round trips at 1e-5."""
    omega = np.logspace(-2, 2, 50)
    t = np.logspace(-2, 2, 50)
    one, three = bm.Geometry.ONE_D, bm.Geometry.THREE_D
    closed_err = 0.0
    tab_err = 0.0
    kernels = [bm.StepKernel(b) for b in (0.01, 0.1, 1.0)]
    kernels += [bm.BoxKernel(0.5, 1.0, 1.0, 1.0)]
    kernels += [bm.ExponentialKernel(1.0, tau) for tau in (0.1, 1.0)]
    for k in kernels:
        geom = three if isinstance(k, bm.BoxKernel) else one
        f2 = bm.coupling_from_susceptibility(k, geom, omega)
        if isinstance(k, bm.StepKernel):
            ref = k.beta / (4 * math.pi ** 2 * omega ** 3)
        elif isinstance(k, bm.BoxKernel):
            x = 0.5 * omega * k.delta
            ref = 3 * k.alpha * k.m * k.omega0 ** 2 / (8 * math.pi ** 2 * omega ** 2) * np.sin(x) ** 2 / x
        else:
            ref = k.gamma * k.tau ** 2 / (4 * math.pi ** 2 * omega * (1 + (omega * k.tau) ** 2))
        closed_err = max(closed_err, _relmax(f2, ref))
        chi = bm.susceptibility_from_coupling(bm.KernelCoupling(k, geom), geom, t)
        closed_err = max(closed_err, _relmax(chi, k(t)))

        if isinstance(k, bm.BoxKernel):
            continue  # discontinuous kernel and oscillatory |f|^2 tail: closed form only
        # sampled coupling -> chi by Filon quadrature
        grid = np.logspace(-4, 4, 6000)
        tab = bm.TabulatedCoupling(grid, bm.KernelCoupling(k, geom).f2(grid))
        tab_err = max(tab_err, _relmax(bm.susceptibility_from_coupling(tab, geom, t), k(t)))
        # sampled kernel -> |f|^2
        span = 100.0 if isinstance(k, bm.StepKernel) else 60.0 * k.tau
        tg = np.linspace(0.0, span, 20001)
        tk = bm.TabulatedKernel(tg, k(np.maximum(tg, 1e-300)))
        tab_err = max(tab_err, _relmax(bm.coupling_from_susceptibility(tk, geom, omega), ref))
    ok = closed_err < 1e-8 and tab_err < 1e-5
    return ok, f"closed-form max rel err {closed_err:.2e}, tabulated {tab_err:.2e}"


def criterion_2() -> tuple[bool, str]:
    t = np.logspace(-2, 2, 200)
    worst = 0.0
    beta = 0.1
    for geom in (bm.Geometry.ONE_D, bm.Geometry.THREE_D):
        f = bm.ohmic_step(beta, geom)
        worst = max(worst, float(np.max(np.abs(bm.susceptibility_from_coupling(f, geom, t) - beta))))
        grid = np.logspace(-4, 4, 6000)
        tab = bm.TabulatedCoupling(grid, f.f2(grid))
        worst = max(worst, float(np.max(np.abs(bm.susceptibility_from_coupling(tab, geom, t) - beta))))
    return worst < 1e-8, f"max |chi - beta| = {worst:.2e} (closed form and tabulated, 1D and 3D)"


def criterion_3() -> tuple[bool, str]:
    worst_e = worst_i = 0.0
    for g in (0.01, 0.1, 0.5):
        for w0 in (0.5, 1.0, 2.0):
            for n in (0, 1, 3):
                e0 = eb.initial_energy(n, w0)
                worst_e = max(worst_e, abs(eb.absorbed_energy_integral(n, 1.0, g, w0) - e0) / e0)
            worst_i = max(worst_i, abs(eb.lorentzian_integral(w0, g) * g / math.pi - 1.0))
    ok = worst_e < 1e-6 and worst_i < 1e-8
    return ok, f"energy rel err {worst_e:.2e}, residue rel err {worst_i:.2e}"


def criterion_4() -> tuple[bool, str]:
    sys = md.OscillatorSystem(1.0, 1.0, bm.StepKernel(0.2), 1.0, 0.0)
    errs = []
    for h in (4e-3, 2e-3, 1e-3):
        traj = md.evolve_mean(sys, 20.0, h)
        q, _ = md.analytic_underdamped(sys, traj.t)
        errs.append(float(np.max(np.abs(traj.q - q))))
    order = math.log2(errs[1] / errs[2])
    ok = errs[-1] < 1e-6 and abs(order - 2.0) <= 0.2
    return ok, f"max err {errs[-1]:.2e} at h=1e-3, observed order {order:.3f}"


def criterion_5() -> tuple[bool, str]:
    worst_v = worst_db = 0.0
    for beta in (0.01, 0.1, 1.0):
        for m in (0.5, 1.0, 3.0):
            for w0 in (0.5, 1.0, 2.0):
                f = bm.ohmic_step(beta)
                for n in (1, 2, 5):
                    r = tr.rate_vacuum_down(n, m, w0, f)
                    worst_v = max(worst_v, abs(r - n * beta / m) / (n * beta / m))
    f = bm.ohmic_step(0.1)
    for n in range(1, 6):
        for x in (0.1, 0.5, 1.0, 2.0, 5.0):
            rep = tr.rates_thermal(n, 1.0 / x, 1.0, 1.0, f)
            want = n / (n + 1) * math.exp(x)
            worst_db = max(worst_db, abs(rep.gamma_down / rep.gamma_up - want) / want)
    ok = worst_v < 1e-12 and worst_db < 1e-12
    return ok, f"vacuum rate rel err {worst_v:.1e}, detailed balance rel err {worst_db:.1e}"


def criterion_6() -> tuple[bool, str]:
    cfg = oracle.OracleConfig(N=512, window=(0.2, 3.0), t_grid=(0.0, 500.0, 5001), n=1,
                              beta=0.01, fit_window=(20.0, 200.0), fit_method="log")
    res = oracle.run_oracle(cfg, bm.ohmic_step(cfg.beta))
    rate_err = abs(res.fit.rate - cfg.beta) / cfg.beta
    e_bath = res.rows[-1][3]
    bath_err = abs(e_bath - 1.0)
    ok = rate_err < 0.05 and res.energy_drift < 1e-8 and bath_err < 0.03
    return ok, (f"rate {res.fit.rate:.6f} (rel err {rate_err:.2%}), drift {res.energy_drift:.1e}, "
                f"E_bath(500) {e_bath:.5f}")


def criterion_7() -> tuple[bool, str]:
    beta, W0, x2 = 0.1, 1.0, 1.0
    p = tl.TwoLevelParams(W0, x2, bm.ohmic_step(beta, bm.Geometry.THREE_D))
    want = W0 * beta * x2 / 2.0
    dec_err = abs(tl.decay_constant(p) - want) / want
    mc = tl.markov_check(p, 1000.0, (1e-3, 1e3))
    s1 = tl.frequency_shift(p, (0.5, 1.5), eps=1e-2)
    s2 = tl.frequency_shift(p, (0.5, 1.5), eps=1e-3)
    ok = dec_err < 1e-12 and mc.rel_err < 0.02 and abs(s1 - s2) < 1e-6
    return ok, (f"decay rel err {dec_err:.1e}, Markov rel err {mc.rel_err:.2e}, "
                f"shift {s2:.8f} (eps change {abs(s1 - s2):.1e})")


def criterion_8() -> tuple[bool, str]:
    p = fm.ScalarFieldParams(1.0, 1.0, 2.0, n_max=10_000)
    beta = 0.1
    s0 = 1e-10
    worst = 0.0
    for x, xp in ((0.1, 0.3), (0.5, 0.5), (0.25, 0.9), (0.7, 0.2)):
        g = fm.green_function(x, xp, s0, p, bm.StepKernel(beta)).value
        worst = max(worst, abs(g.real - fm.static_green(x, xp, p)))
    pole_err = 0.0
    g = beta / (2 * p.lam)
    for n in (1, 2, 5, 20):
        w = fm.mode_frequencies(p, n)[-1]
        W = math.sqrt(w * w - g * g)
        lo, hi = fm.green_poles(p, n, beta)
        pole_err = max(pole_err, abs(lo - complex(-g, -W)), abs(hi - complex(-g, W)))
    ok = worst < 1e-4 and pole_err < 1e-10
    return ok, f"static limit abs err {worst:.2e}, pole err {pole_err:.1e}"


def criterion_9() -> tuple[bool, str]:
    p = fm.ScalarFieldParams(math.pi, 1.0, 1.0, n_max=3)
    modes = fm.mode_frequencies(p)
    beta, lam = 0.2, 1.0
    e = eb.scalar_bath_energy(modes, beta, lam)
    e_err = abs(e - float(np.sum(modes))) / float(np.sum(modes))
    formula = eb.scalar_residual_momentum(modes, beta, lam)
    direct = eb.residual_momentum_direct(modes, beta, lam)
    mom_err = abs(formula - direct) / formula
    ok = e_err < 1e-6 and mom_err <= 4 * np.finfo(float).eps
    return ok, f"bath energy rel err {e_err:.1e}, residual momentum formula vs direct {mom_err:.1e}"


CRITERIA: list[tuple[int, str, Callable, float]] = [
    (1, "transform round-trip", criterion_1, 10.0),
    (2, "step-kernel reproduction", criterion_2, 10.0),
    (3, "energy conservation", criterion_3, 5.0),
    (4, "solver vs closed form", criterion_4, 10.0),
    (5, "rates", criterion_5, 10.0),
    (6, "oracle validation", criterion_6, 120.0),
    (7, "two-level decay", criterion_7, 30.0),
    (8, "Green function", criterion_8, 10.0),
    (9, "scalar energy transfer", criterion_9, 10.0),
]


def run_criterion(number: int) -> CriterionResult:
    num, name, fn, limit = CRITERIA[number - 1]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported not raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if elapsed > limit:
        ok, detail = False, detail + f"; exceeded time limit {limit:g} s"
    return CriterionResult(num, name, ok, detail, elapsed, limit)


def run_all() -> list[CriterionResult]:
    return [run_criterion(n) for n, *_ in CRITERIA]
