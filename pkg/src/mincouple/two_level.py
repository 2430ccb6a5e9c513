"""Spontaneous decay of a two-level system coupled to the two-field bath.

The excited-state amplitude obeys ``c'(t) = int_0^t gamma(t - u) c(u) du`` with

    gamma(tau) = -K int_0^inf h(w) exp(i (W0 - w) tau) dw,
    h(w)       = w**2 (W0**2 |f(w)|**2 + |g(w)|**2),
    K          = 4 pi |x12|**2 / (3 hbar**2 c**3)

after averaging ``|x12 . k|**2`` over directions.  In the Markov limit the
amplitude decays as ``exp(-(beta + i Delta) t)``.  The decay constant is
implemented with a ``g`` term that carries no ``W0**2`` factor, while the
shift integral weights ``|g|**2`` by ``w**2``.  With ``g = 0`` the two agree
with the Markov limit of ``gamma``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _quadrature as quad
from .bath_model import NATURAL, CouplingFunction, PhysConsts
from .errors import IRDivergent, ModelValidationError, NonConvergent, QuadratureError

__all__ = ["TwoLevelParams", "memory_kernel_gamma", "decay_constant", "frequency_shift",
           "MarkovCheck", "markov_check", "decay_report"]


@dataclass(frozen=True)
class TwoLevelParams:
    Omega0: float
    x12_sq: float
    f: CouplingFunction | None = None
    g: CouplingFunction | None = None
    consts: PhysConsts = NATURAL

    def __post_init__(self):
        if not self.Omega0 > 0:
            raise ModelValidationError("Omega0 must be positive")
        if not self.x12_sq >= 0:
            raise ModelValidationError("|x12|^2 must be >= 0")

    @property
    def K(self) -> float:
        c = self.consts
        return 4.0 * math.pi * self.x12_sq / (3.0 * c.hbar ** 2 * c.c ** 3)

    def h(self, omega):
        """Spectral weight ``w**2 (W0**2 |f|**2 + |g|**2)``."""
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        if self.f is not None:
            out = out + self.Omega0 ** 2 * self.f.spectral_weight(omega)
        if self.g is not None:
            out = out + self.g.spectral_weight(omega)
        return out

    @property
    def trivial(self) -> bool:
        return self.x12_sq == 0 or (self.f is None and self.g is None)


def _window(p: TwoLevelParams, window) -> tuple[float, float]:
    lo, hi = (0.0, math.inf) if window is None else map(float, window)
    if not (0 <= lo < hi):
        raise ModelValidationError("window must satisfy 0 <= w_min < w_max")
    if lo == 0.0:
        a, b = float(p.h(1e-8)), float(p.h(1e-7))
        if a != 0 and b != 0 and math.log10(abs(b / a)) <= -1.0 + 1e-6:
            raise IRDivergent("spectral weight is not integrable at w = 0; supply a window")
    return lo, hi


def _quad(func, a, b, tol: float = 1e-6, **kw) -> float:
    """``integrate.quad`` that raises when the error estimate is poor."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, **kw)
    if not math.isfinite(val) or err > tol * abs(val) + 1e-13:
        raise QuadratureError(f"integral over [{a:g}, {b:g}] unresolved (error {err:.2e})")
    return val


def memory_kernel_gamma(p: TwoLevelParams, tau, window=None, rtol: float = 1e-10):
    """``gamma(tau)``; an Ohmic ``f`` needs an explicit frequency window."""
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if p.trivial:
        out = np.zeros(taus.shape, dtype=complex)
        return out if np.ndim(tau) else complex(out[0])
    lo, hi = _window(p, window)

    def h(w):
        return float(p.h(w))

    kw = dict(epsabs=0.0, epsrel=rtol, limit=500)
    out = np.empty(taus.shape, dtype=complex)
    for i, t in enumerate(taus):
        if t == 0:
            re = _quad(h, lo, hi, **kw)
            im = 0.0
        else:
            if math.isinf(hi):
                kw_inf = dict(epsabs=rtol * abs(h(lo + 1.0)), limlst=200)
                c = _quad(h, lo, hi, weight="cos", wvar=t, **kw_inf)
                s = _quad(h, lo, hi, weight="sin", wvar=t, **kw_inf)
            else:
                c = _quad(h, lo, hi, weight="cos", wvar=t, **kw)
                s = _quad(h, lo, hi, weight="sin", wvar=t, **kw)
            # exp(i (W0 - w) t) = exp(i W0 t) (cos wt - i sin wt)
            phase = complex(math.cos(p.Omega0 * t), math.sin(p.Omega0 * t))
            val = phase * complex(c, -s)
            re, im = val.real, val.imag
        out[i] = -p.K * complex(re, im)
    return out if np.ndim(tau) else complex(out[0])


def decay_constant(p: TwoLevelParams) -> float:
    """Markov decay constant; the ``g`` term omits the ``W0**2`` of the Markov limit."""
    c = p.consts
    pre = 4.0 * math.pi ** 2 * p.x12_sq / (3.0 * c.hbar ** 2 * c.c ** 3)
    f2 = 0.0 if p.f is None else float(p.f.f2(p.Omega0))
    g2 = 0.0 if p.g is None else float(p.g.f2(p.Omega0))
    return pre * p.Omega0 ** 4 * f2 + pre * g2


def frequency_shift(p: TwoLevelParams, window, eps: float | None = None,
                    levels: int = 2) -> float:
    """Principal-value frequency shift over ``window`` (excision + extrapolation)."""
    if p.trivial:
        return 0.0
    lo, hi = _window(p, window)
    if math.isinf(hi):
        # compare envelopes a decade apart; oscillatory weights defeat point samples
        near = np.max(np.abs(p.h(np.linspace(1e6, 2e6, 97) * p.Omega0)))
        far = np.max(np.abs(p.h(np.linspace(1e7, 2e7, 97) * p.Omega0)))
        if near > 0 and far >= near:
            raise NonConvergent("spectral weight does not decay; supply a finite window")
    if eps is None:
        eps = 1e-2 * p.Omega0
    h = lambda w: float(p.h(w))  # noqa: E731
    if math.isinf(hi):
        cut = max(4.0 * p.Omega0, 2.0 * lo)
        tail = _quad(lambda w: h(w) / (p.Omega0 - w), cut, math.inf,
                     epsabs=0.0, epsrel=1e-10, limit=1000)
        return p.K * (quad.principal_value(h, lo, cut, p.Omega0, eps, levels) + tail)
    return p.K * quad.principal_value(h, lo, hi, p.Omega0, eps, levels)


@dataclass
class MarkovCheck:
    t: float
    beta_markov: float
    beta_decay: float
    rel_err: float


def markov_check(p: TwoLevelParams, t: float, window, rtol: float = 1e-10) -> MarkovCheck:
    """Compare ``-(1/t) int_0^t int_0^u Re gamma`` with :func:`decay_constant`.

    The double time integral is done analytically, leaving the Fejer-type
    kernel ``(1 - cos(d t)) / (d**2 t)`` with ``d = W0 - w``.
    """
    lo, hi = _window(p, window)
    W0 = p.Omega0

    def fejer(w):
        x = 0.5 * (W0 - w) * t
        # (1 - cos dt) / (d^2 t) = (t / 2) sinc^2(dt / 2)
        return float(p.h(w)) * 0.5 * t * np.sinc(x / math.pi) ** 2

    def smooth(w):
        return float(p.h(w)) / ((W0 - w) ** 2 * t)

    def oscillating(lo_, hi_):
        # int smooth(w) cos((W0 - w) t) dw via the cos/sin weights in w
        kw = dict(epsabs=0.0, epsrel=rtol, limit=2000) if math.isfinite(hi_) else \
            dict(epsabs=rtol * abs(smooth(lo_)) / t, limlst=400)
        c, _ = integrate.quad(smooth, lo_, hi_, weight="cos", wvar=t, **kw)
        s, _ = integrate.quad(smooth, lo_, hi_, weight="sin", wvar=t, **kw)
        return math.cos(W0 * t) * c + math.sin(W0 * t) * s

    band = 50.0 / t
    a, b = max(lo, W0 - band), min(hi, W0 + band)
    val = 0.0
    if a < b:
        val += integrate.quad(fejer, a, b, points=[W0] if a < W0 < b else None,
                              epsabs=0.0, epsrel=rtol, limit=2000)[0]
    for lo_, hi_ in ((lo, a), (b, hi)):
        if hi_ > lo_:
            val += integrate.quad(smooth, lo_, hi_, epsabs=0.0, epsrel=rtol, limit=2000)[0]
            val -= oscillating(lo_, hi_)
    bm = p.K * val
    bd = decay_constant(p)
    rel = abs(bm - bd) / bd if bd else abs(bm)
    return MarkovCheck(t, bm, bd, rel)


def decay_report(p: TwoLevelParams, window, eps: float | None = None) -> dict:
    eps = 1e-2 * p.Omega0 if eps is None else eps
    return {"beta": decay_constant(p), "delta": frequency_shift(p, window, eps),
            "window": list(map(float, window)), "pv_epsilon": eps}
