"""Oscillatory and singular quadrature primitives.

The workhorse is :func:`ppoly_exp_integral`, a Filon-type rule: the
tabulated function is replaced by its piecewise-polynomial interpolant and
the product with ``exp(z x)`` is integrated exactly on every panel, so the
error is that of the interpolant alone and does not grow with ``|z|``.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PPoly

from .errors import NonConvergent, QuadratureError

_SERIES_CUTOFF = 1.0
_SERIES_TERMS = 30
_Z_CHUNK = 256
# fitted exponents this close to 1 are treated as exactly 1/x tails
P_SNAP = 1e-3


def exp_moments(w: np.ndarray, kmax: int) -> np.ndarray:
    """Scaled moments ``m_k(w) = int_0^1 u**k exp(w u) du`` for k <= kmax.

    Returns an array of shape ``(kmax + 1,) + w.shape``.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty((kmax + 1,) + w.shape, dtype=complex)
    small = np.abs(w) < _SERIES_CUTOFF

    if np.any(small):
        ws = w[small]
        # m_k = sum_j w^j / (j! (k + j + 1))
        powers = np.ones_like(ws)
        acc = np.zeros((kmax + 1,) + ws.shape, dtype=complex)
        fact = 1.0
        for j in range(_SERIES_TERMS):
            if j > 0:
                powers = powers * ws
                fact *= j
            term = powers / fact
            for k in range(kmax + 1):
                acc[k] += term / (k + j + 1)
        out[:, small] = acc

    big = ~small
    if np.any(big):
        wb = w[big]
        ew = np.exp(wb)
        m = (ew - 1.0) / wb
        out[0, big] = m
        for k in range(1, kmax + 1):
            m = (ew - k * m) / wb
            out[k, big] = m
    return out


def ppoly_exp_integral(pp: PPoly, z) -> np.ndarray:
    """Exact ``int_{x[0]}^{x[-1]} P(x) exp(z x) dx`` for a piecewise polynomial.

    ``z`` may be a complex scalar or array; the result has the shape of ``z``.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    x = pp.x
    h = np.diff(x)
    c = pp.c  # c[j, i] multiplies (x - x_i)**(deg - j)
    deg = c.shape[0] - 1
    out = np.empty(zf.shape, dtype=complex)
    # coefficient of u**k scaled by h**(k+1)
    hk = np.vstack([h ** (k + 1) for k in range(deg + 1)])
    coef = np.vstack([c[deg - k] for k in range(deg + 1)]) * hk
    for lo in range(0, zf.size, _Z_CHUNK):
        zc = zf[lo:lo + _Z_CHUNK]
        w = zc[:, None] * h[None, :]
        mom = exp_moments(w, deg)  # (deg+1, nz, npanel)
        panel = np.einsum("kp,kzp->zp", coef, mom)
        phase = np.exp(zc[:, None] * x[None, :-1])
        out[lo:lo + _Z_CHUNK] = np.sum(panel * phase, axis=1)
    return out.reshape(shape)


def fit_power_law(x: np.ndarray, y: np.ndarray) -> tuple[float, float] | None:
    """Least-squares fit ``y ~ C x**a`` in log space.

    Returns ``(C, a)``, ``(0.0, 0.0)`` when every sample is zero, or ``None``
    when the samples change sign (no algebraic model applies).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = np.max(np.abs(y)) if y.size else 0.0
    if scale == 0.0:
        return 0.0, 0.0
    if np.all(y > 0):
        sign = 1.0
    elif np.all(y < 0):
        sign = -1.0
    else:
        return None
    a, logc = np.polyfit(np.log(x), np.log(sign * y), 1)
    return sign * math.exp(logc), float(a)


def power_head_sine(c: float, q: float, x1: float, t: float) -> float:
    """``int_0^x1 c x**q sin(t x) dx`` for ``q > -2``."""
    if c == 0.0 or t == 0.0:
        return 0.0
    if q <= -2.0:
        raise NonConvergent(f"integrand ~ x**{q} is not integrable at the origin")

    def smooth(x):
        return c * t * np.sinc(t * x / np.pi)

    val, err = integrate.quad(smooth, 0.0, x1, weight="alg", wvar=(q + 1.0, 0.0),
                              epsabs=0.0, epsrel=1e-12, limit=200)
    return float(val)


def power_tail_sine(c: float, p: float, x0: float, t: float) -> float:
    """``int_x0^inf c x**(-p) sin(t x) dx`` (Abel-regularised when ``p == 0``)."""
    if c == 0.0 or t == 0.0:
        return 0.0
    if p < -1e-9:
        raise NonConvergent(f"tail grows like x**{-p}")
    if abs(p) <= 1e-9:
        return c * math.cos(t * x0) / t
    sgn = 1.0 if t > 0 else -1.0
    if abs(p - 1.0) <= P_SNAP:
        si, _ = special.sici(abs(t) * x0)
        return sgn * c * (0.5 * math.pi - si)
    with warnings.catch_warnings():
        # steep tails of negligible size trip QAWF's cycle diagnostics
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(lambda x: c * x ** (-p), x0, np.inf, weight="sin",
                                  wvar=abs(t), epsabs=1e-14 * abs(c) * x0 ** (-p) / abs(t) + 1e-300,
                                  limlst=200)
    return sgn * float(val)


def power_tail_laplace(c: float, p: float, x0: float, s: complex) -> complex:
    """``int_x0^inf c x**(-p) exp(-s x) dx`` for ``Re s > 0``."""
    if c == 0.0:
        return 0.0
    if abs(p) <= 1e-9:
        return c * np.exp(-s * x0) / s

    def part(fn):
        v, _ = integrate.quad(lambda x: fn(c * x ** (-p) * np.exp(-s * x)), x0, np.inf,
                              epsabs=0.0, epsrel=1e-12, limit=400)
        return v

    return complex(part(np.real), part(np.imag))


def principal_value(func, a: float, b: float, pole: float, eps: float,
                    levels: int = 2, rtol: float = 1e-12) -> float:
    """PV of ``int_a^b func(x) / (pole - x) dx`` by symmetric excision.

    The excised strip ``|x - pole| < eps`` contributes only odd powers of
    ``eps``, so the excision values at ``eps, eps/2, ...`` are combined by
    Richardson extrapolation eliminating ``eps**1, eps**3, ...``.
    """
    if not (a < pole < b):
        val, _ = integrate.quad(lambda x: func(x) / (pole - x), a, b,
                                epsabs=0.0, epsrel=rtol, limit=400)
        return float(val)
    eps = min(eps, 0.5 * (pole - a), 0.5 * (b - pole))

    def excised(e):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            lo, elo = integrate.quad(lambda x: func(x) / (pole - x), a, pole - e,
                                     epsabs=0.0, epsrel=rtol, limit=2000)
            hi, ehi = integrate.quad(lambda x: func(x) / (pole - x), pole + e, b,
                                     epsabs=0.0, epsrel=rtol, limit=2000)
        if elo + ehi > 1e-8 * (abs(lo) + abs(hi)) + 1e-14:
            raise QuadratureError(f"principal-value panels unresolved (error {elo + ehi:.2e})")
        return lo + hi

    table = [excised(eps / 2 ** k) for k in range(levels + 1)]
    for j in range(levels):
        factor = 2.0 ** (2 * j + 1)
        table = [(factor * table[k + 1] - table[k]) / (factor - 1.0)
                 for k in range(len(table) - 1)]
    return float(table[0])


def checked_quad(func, a, b, rtol=1e-10, **kw) -> float:
    """``scipy.integrate.quad`` that raises on a poor error estimate."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, epsabs=0.0, epsrel=rtol, full_output=False,
                                  **{"limit": 400, **kw})
    if not np.isfinite(val) or err > max(1e3 * rtol * abs(val), 1e-14):
        raise QuadratureError(f"quadrature error estimate {err:.3e} for value {val:.6e}")
    return float(val)
