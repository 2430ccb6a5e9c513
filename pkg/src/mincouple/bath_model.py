"""Coupling functions, memory kernels and the transforms between them.

A bath is characterised either microscopically, by the coupling strength
``|f(w)|**2`` of each field mode, or macroscopically, by the causal
susceptibility ``chi(t)``.  With the linear dispersion ``w = c|k|`` the two
are a sine-transform pair::

    chi(t)    = A * int_0^inf dw w**2 |f(w)|**2 sin(w t),         t > 0
    |f(w)|**2 = 2 / (pi A w**2) * int_0^inf dt chi(t) sin(w t),   w > 0

where the prefactor ``A`` depends on the bath geometry (see
:func:`prefactor`).  Closed-form families are transformed analytically;
tabulated data goes through a spline Filon rule with algebraic end models.
"""
from __future__ import annotations

import abc
import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline, PPoly

from . import _quadrature as quad
from .errors import IRDivergent, ModelValidationError, NonConvergent, UnphysicalKernel

__all__ = [
    "PhysConsts", "NATURAL", "Geometry", "prefactor", "inverse_prefactor",
    "MemoryKernel", "StepKernel", "BoxKernel", "ExponentialKernel", "TabulatedKernel",
    "CouplingFunction", "KernelCoupling", "TabulatedCoupling",
    "ohmic_step", "box_coupling", "exponential_coupling",
    "BathSpec", "bose_occupation",
    "susceptibility_from_coupling", "coupling_from_susceptibility", "kernel_laplace",
    "noise_correlation", "PassivityReport", "validate_passivity", "load_tabulated",
]

CLOSED_FORM_RTOL = 1e-8
TABULATED_RTOL = 1e-5


@dataclass(frozen=True)
class PhysConsts:
    """Physical constants; the default is natural units."""
    hbar: float = 1.0
    c: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "kB"):
            if not getattr(self, name) > 0:
                raise ModelValidationError(f"{name} must be strictly positive")


NATURAL = PhysConsts()


class Geometry(enum.Enum):
    ONE_D = "1d"
    THREE_D = "3d"
    SCALAR_MODE = "scalar"
    VECTOR_MODE = "vector"


def prefactor(geometry: Geometry, consts: PhysConsts = NATURAL) -> float:
    """Coefficient ``A`` in ``chi(t) = A int w**2 |f|**2 sin(w t) dw``."""
    base = math.pi / (consts.hbar * consts.c ** 3)
    if geometry is Geometry.THREE_D:
        return 16.0 / 3.0 * base
    return 8.0 * base


def inverse_prefactor(geometry: Geometry, consts: PhysConsts = NATURAL) -> float:
    """``2 / (pi A)``: ``hbar c**3 / 4 pi**2`` in 1D, ``3 hbar c**3 / 8 pi**2`` in 3D."""
    return 2.0 / (math.pi * prefactor(geometry, consts))


# ---------------------------------------------------------------------------
# memory kernels


class MemoryKernel(abc.ABC):
    """Causal susceptibility ``chi(t)``, identically zero for ``t <= 0``."""

    closed_form = True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        pos = t > 0
        if np.any(pos):
            out[pos] = self._value(t[pos])
        return out if out.ndim else float(out)

    @abc.abstractmethod
    def _value(self, t: np.ndarray) -> np.ndarray:
        ...

    @property
    @abc.abstractmethod
    def chi0(self) -> float:
        """Right limit ``chi(0+)``."""

    @property
    def support(self) -> float:
        """End of the support of ``chi``; ``inf`` for infinite memory."""
        return math.inf

    @abc.abstractmethod
    def laplace(self, s):
        ...

    @abc.abstractmethod
    def sine_transform(self, omega):
        """``int_0^inf chi(t) sin(omega t) dt``."""

    @abc.abstractmethod
    def primitives(self, s) -> tuple[np.ndarray, np.ndarray]:
        """``(int_0^s chi, int_0^s u chi(u) du)``."""

    def hat_moments(self, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-interval moments on ``[k h, (k+1) h]`` for ``k < n``.

        Returns ``M0[k] = int chi`` and ``M1[k] = int chi(s) (s - k h) / h``.
        """
        s = h * np.arange(n + 1)
        f0, f1 = self.primitives(s)
        m0 = np.diff(f0)
        m1 = np.diff(f1) / h - np.arange(n) * m0
        return m0, m1


@dataclass(frozen=True)
class StepKernel(MemoryKernel):
    """``chi(t) = beta`` for ``t > 0``: pure Ohmic friction ``beta * qdot``."""
    beta: float

    def _value(self, t):
        return np.full(t.shape, float(self.beta))

    @property
    def chi0(self):
        return float(self.beta)

    def laplace(self, s):
        return self.beta / np.asarray(s, dtype=complex)

    def sine_transform(self, omega):
        omega = np.asarray(omega, dtype=float)
        with np.errstate(divide="ignore"):
            return self.beta / omega

    def primitives(self, s):
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        return self.beta * s, 0.5 * self.beta * s * s

    def hat_moments(self, h, n):
        return np.full(n, self.beta * h), np.full(n, 0.5 * self.beta * h)


@dataclass(frozen=True)
class BoxKernel(MemoryKernel):
    """``chi(t) = alpha m omega0**2 / delta`` on ``0 < t < delta``."""
    alpha: float
    m: float
    omega0: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ModelValidationError("box width delta must be positive")

    @property
    def height(self) -> float:
        return self.alpha * self.m * self.omega0 ** 2 / self.delta

    @property
    def chi0(self):
        return self.height

    @property
    def support(self):
        return self.delta

    def _value(self, t):
        return np.where(t < self.delta, self.height, 0.0)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        return -self.height * np.expm1(-s * self.delta) / s

    def sine_transform(self, omega):
        omega = np.asarray(omega, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2.0 * self.height * np.sin(0.5 * omega * self.delta) ** 2 / omega

    def primitives(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.delta)
        return self.height * s, 0.5 * self.height * s * s

    def hat_moments(self, h, n):
        a = h * np.arange(n)
        u = np.clip(self.delta - a, 0.0, h)
        return self.height * u, 0.5 * self.height * u * u / h


@dataclass(frozen=True)
class ExponentialKernel(MemoryKernel):
    """``chi(t) = gamma exp(-t / tau)``."""
    gamma: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ModelValidationError("tau must be positive")

    @property
    def chi0(self):
        return float(self.gamma)

    def _value(self, t):
        return self.gamma * np.exp(-t / self.tau)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        return self.gamma * self.tau / (1.0 + s * self.tau)

    def sine_transform(self, omega):
        omega = np.asarray(omega, dtype=float)
        wt = omega * self.tau
        return self.gamma * self.tau * wt / (1.0 + wt * wt)

    def primitives(self, s):
        x = np.maximum(np.asarray(s, dtype=float), 0.0) / self.tau
        f0 = -self.gamma * self.tau * np.expm1(-x)
        f1 = self.gamma * self.tau ** 2 * (-np.expm1(-x) - x * np.exp(-x))
        return f0, f1

    def hat_moments(self, h, n):
        x = h / self.tau
        decay = np.exp(-np.arange(n) * x)
        m0 = -self.gamma * self.tau * np.expm1(-x) * decay
        m1 = self.gamma * self.tau / x * (-np.expm1(-x) - x * np.exp(-x)) * decay
        return m0, m1


def _tail_indices(x: np.ndarray, last: bool) -> np.ndarray:
    """Indices of the last (or first) decade of a grid, at least three points."""
    n = x.size
    if last:
        idx = np.nonzero(x >= x[-1] / 10.0)[0]
        return idx if idx.size >= 3 else np.arange(max(n - 3, 0), n)
    idx = np.nonzero(x <= 10.0 * x[0])[0]
    return idx if idx.size >= 3 else np.arange(min(3, n))


def _build_ppoly(x: np.ndarray, y: np.ndarray, interpolation: str) -> PPoly:
    if interpolation == "cubic":
        spline = CubicSpline(x, y)
        return PPoly(spline.c, spline.x)
    if interpolation == "linear":
        slopes = np.diff(y) / np.diff(x)
        return PPoly(np.vstack([slopes, y[:-1]]), x)
    raise ModelValidationError(f"unknown interpolation {interpolation!r}")


def _check_grid(x: np.ndarray, y: np.ndarray, interpolation: str, name: str):
    if x.ndim != 1 or x.shape != y.shape:
        raise ModelValidationError(f"{name} grid and samples must be 1-D of equal length")
    need = 4 if interpolation == "cubic" else 2
    if x.size < need:
        raise ModelValidationError(f"{name} needs at least {need} samples")
    if not np.all(np.diff(x) > 0):
        raise ModelValidationError(f"{name} grid must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ModelValidationError(f"{name} samples must be finite")


class TabulatedKernel(MemoryKernel):
    """Susceptibility sampled on a strictly increasing time grid.

    Samples are interpolated by a cubic spline (or linearly).  Beyond the last
    sample an algebraic tail ``C t**-p`` fitted to the last decade is used; an
    all-zero last decade means finite memory.  The value at ``t = 0`` is the
    right limit; when the grid starts later it is extrapolated linearly.
    """

    closed_form = False

    def __init__(self, t: Sequence[float], chi: Sequence[float], interpolation: str = "cubic"):
        t = np.asarray(t, dtype=float)
        chi = np.asarray(chi, dtype=float)
        _check_grid(t, chi, interpolation, "kernel")
        if t[0] < 0:
            raise ModelValidationError("kernel grid must start at t >= 0")
        self.t_samples = t
        self.chi_samples = chi
        self.interpolation = interpolation
        if t[0] > 0:
            c0 = chi[0] - t[0] * (chi[1] - chi[0]) / (t[1] - t[0])
            t = np.concatenate([[0.0], t])
            chi = np.concatenate([[c0], chi])
        self._t = t
        self._pp = _build_ppoly(t, chi, interpolation)
        self._anti0 = self._pp.antiderivative()
        self._anti1 = _times_x(self._pp).antiderivative()
        self._end = float(t[-1])

        idx = _tail_indices(t[1:], last=True) + 1
        scale = np.max(np.abs(chi))
        tail_vals = chi[idx]
        if scale == 0.0 or np.max(np.abs(tail_vals)) <= 1e-14 * scale:
            self._tail = (0.0, 0.0)
        else:
            fit = quad.fit_power_law(t[idx], tail_vals)
            self._tail = None if fit is None else (fit[0], -fit[1])

    def __repr__(self):
        return f"TabulatedKernel(n={self.t_samples.size}, t=[{self._t[0]:g}, {self._end:g}])"

    def _tail_model(self) -> tuple[float, float]:
        if self._tail is None:
            raise NonConvergent("kernel tail is not algebraic (last decade changes sign)")
        return self._tail

    @property
    def chi0(self):
        return float(self._pp(0.0))

    @property
    def support(self):
        return self._end if self._tail == (0.0, 0.0) else math.inf

    def _value(self, t):
        out = np.empty(t.shape)
        inside = t <= self._end
        out[inside] = self._pp(t[inside])
        if np.any(~inside):
            c, p = self._tail_model()
            out[~inside] = c * t[~inside] ** (-p)
        return out

    def sine_transform(self, omega):
        omega = np.asarray(omega, dtype=float)
        body = np.imag(quad.ppoly_exp_integral(self._pp, 1j * omega))
        c, p = self._tail_model()
        tail = np.array([quad.power_tail_sine(c, p, self._end, w) if w != 0 else 0.0
                         for w in np.ravel(omega)]).reshape(omega.shape)
        return body + tail

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        body = quad.ppoly_exp_integral(self._pp, -s)
        c, p = self._tail_model()
        tail = np.array([quad.power_tail_laplace(c, p, self._end, z) for z in np.ravel(s)],
                        dtype=complex).reshape(s.shape)
        return body + tail

    def primitives(self, s):
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        inside = np.minimum(s, self._end)
        f0 = self._anti0(inside)
        f1 = self._anti1(inside)
        beyond = s > self._end
        if np.any(beyond):
            c, p = self._tail_model()
            if c != 0.0:
                T = self._end
                x = s[beyond]
                f0[beyond] += c * _power_integral(T, x, -p)
                f1[beyond] += c * _power_integral(T, x, 1.0 - p)
        return f0, f1

    def to_csv(self, path):
        _write_two_columns(path, ("t", "chi"), self.t_samples, self.chi_samples)


def _times_x(pp: PPoly) -> PPoly:
    """Piecewise polynomial ``x * P(x)`` on the same breakpoints."""
    c = pp.c
    deg = c.shape[0] - 1
    xi = pp.x[:-1]
    out = np.zeros((deg + 2, c.shape[1]))
    out[:deg + 1] += c          # (x - xi) * P: raise every power by one
    out[1:] += xi * c           # xi * P
    return PPoly(out, pp.x)


def _power_integral(a: float, b: np.ndarray, k: float) -> np.ndarray:
    """``int_a^b x**k dx``."""
    if abs(k + 1.0) < 1e-12:
        return np.log(b / a)
    return (b ** (k + 1.0) - a ** (k + 1.0)) / (k + 1.0)


# ---------------------------------------------------------------------------
# coupling functions


class CouplingFunction(abc.ABC):
    """Coupling strength ``|f(w)|**2`` of the bath modes (only the modulus enters)."""

    consts: PhysConsts

    @abc.abstractmethod
    def f2(self, omega):
        ...

    def spectral_weight(self, omega):
        """``w**2 |f(w)|**2``, the density entering every frequency integral."""
        omega = np.asarray(omega, dtype=float)
        return omega ** 2 * self.f2(omega)

    @abc.abstractmethod
    def sine_integral(self, t):
        """``int_0^inf w**2 |f(w)|**2 sin(w t) dw``."""


@dataclass(frozen=True)
class KernelCoupling(CouplingFunction):
    """The coupling that produces ``kernel`` in the given geometry."""
    kernel: MemoryKernel
    geometry: Geometry = Geometry.ONE_D
    consts: PhysConsts = NATURAL

    def f2(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        pos = omega > 0
        if np.any(pos):
            w = omega[pos]
            out[pos] = inverse_prefactor(self.geometry, self.consts) * self.kernel.sine_transform(w) / w ** 2
        return out if out.ndim else float(out)

    def spectral_weight(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        pos = omega > 0
        if np.any(pos):
            out[pos] = inverse_prefactor(self.geometry, self.consts) * self.kernel.sine_transform(omega[pos])
        return out if out.ndim else float(out)

    def sine_integral(self, t):
        return self.kernel(t) / prefactor(self.geometry, self.consts)


def ohmic_step(beta: float, geometry: Geometry = Geometry.ONE_D,
               consts: PhysConsts = NATURAL) -> KernelCoupling:
    """``|f|**2 = beta hbar c**3 / (4 pi**2 w**3)`` in 1D, ``3 beta hbar c**3 / (8 pi**2 w**3)`` in 3D."""
    return KernelCoupling(StepKernel(beta), geometry, consts)


def box_coupling(alpha: float, m: float, omega0: float, delta: float,
                 geometry: Geometry = Geometry.THREE_D,
                 consts: PhysConsts = NATURAL) -> KernelCoupling:
    return KernelCoupling(BoxKernel(alpha, m, omega0, delta), geometry, consts)


def exponential_coupling(gamma: float, tau: float, geometry: Geometry = Geometry.ONE_D,
                         consts: PhysConsts = NATURAL) -> KernelCoupling:
    return KernelCoupling(ExponentialKernel(gamma, tau), geometry, consts)


class TabulatedCoupling(CouplingFunction):
    """``|f(w)|**2`` sampled on a strictly increasing grid with ``w > 0``.

    The spectral weight ``w**2 |f|**2`` is interpolated (cubic spline by
    default).  Below the grid a power law fitted to the first decade is used
    and above it a power law fitted to the last decade; the latter must fall
    off at least like ``1/w`` or the sine integral is rejected.
    """

    def __init__(self, omega: Sequence[float], f2: Sequence[float],
                 consts: PhysConsts = NATURAL, interpolation: str = "cubic"):
        omega = np.asarray(omega, dtype=float)
        f2 = np.asarray(f2, dtype=float)
        _check_grid(omega, f2, interpolation, "coupling")
        if omega[0] <= 0:
            raise ModelValidationError("coupling grid must be strictly positive")
        self.omega_samples = omega
        self.f2_samples = f2
        self.consts = consts
        self.interpolation = interpolation
        weight = omega ** 2 * f2
        self._pp = _build_ppoly(omega, weight, interpolation)
        self._lo, self._hi = float(omega[0]), float(omega[-1])

        idx = np.arange(min(4, omega.size))
        head = quad.fit_power_law(omega[idx], weight[idx])
        # without a clean power law, ramp linearly to zero at the origin
        self._head = head if head is not None else (weight[0] / omega[0], 1.0)
        idx = _tail_indices(omega, last=True)
        tail = quad.fit_power_law(omega[idx], weight[idx])
        self._tail = None if tail is None else (tail[0], -tail[1])

    def __repr__(self):
        return f"TabulatedCoupling(n={self.omega_samples.size}, omega=[{self._lo:g}, {self._hi:g}])"

    def _tail_model(self):
        if self._tail is None:
            raise NonConvergent("coupling tail is not algebraic (last decade changes sign)")
        c, p = self._tail
        if c != 0.0 and p < 1.0 - quad.P_SNAP:
            raise NonConvergent(
                f"|f|^2 decays like w^{-(p + 2):.3f}, slower than w^-3; supply a longer grid")
        return c, p

    def f2(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        body = (omega >= self._lo) & (omega <= self._hi)
        out[body] = self._pp(omega[body]) / omega[body] ** 2
        below = (omega > 0) & (omega < self._lo)
        if np.any(below):
            c, q = self._head
            out[below] = c * omega[below] ** (q - 2.0)
        above = omega > self._hi
        if np.any(above):
            if self._tail is None:
                raise NonConvergent("coupling tail is not algebraic")
            c, p = self._tail
            out[above] = c * omega[above] ** (-p - 2.0)
        return out if out.ndim else float(out)

    def sine_integral(self, t):
        t = np.asarray(t, dtype=float)
        body = np.imag(quad.ppoly_exp_integral(self._pp, 1j * t))
        c, p = self._tail_model()
        hc, hq = self._head
        flat = np.ravel(t)
        head = [quad.power_head_sine(hc, hq, self._lo, x) for x in flat]
        tail = [quad.power_tail_sine(c, p, self._hi, x) for x in flat]
        return body + (np.array(head) + np.array(tail)).reshape(t.shape)

    def to_csv(self, path):
        _write_two_columns(path, ("omega", "f2"), self.omega_samples, self.f2_samples)


# ---------------------------------------------------------------------------
# bath specification and transforms


@dataclass(frozen=True)
class BathSpec:
    geometry: Geometry = Geometry.ONE_D
    consts: PhysConsts = field(default_factory=PhysConsts)
    temperature: float = 0.0

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ModelValidationError("temperature must be >= 0")


def bose_occupation(omega, temperature: float, consts: PhysConsts = NATURAL):
    """Mean occupation ``1 / (exp(hbar w / kB T) - 1)``; zero at ``T = 0``."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return np.zeros(omega.shape)
    with np.errstate(divide="ignore", over="ignore"):
        return 1.0 / np.expm1(consts.hbar * omega / (consts.kB * temperature))


def susceptibility_from_coupling(f: CouplingFunction, geometry: Geometry, t):
    """``chi(t)`` produced by coupling ``f`` in ``geometry``; exactly 0 for ``t <= 0``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    if np.any(pos):
        out[pos] = prefactor(geometry, f.consts) * f.sine_integral(t[pos])
    return out if out.ndim else float(out)


def coupling_from_susceptibility(chi: MemoryKernel, geometry: Geometry, omega,
                                 consts: PhysConsts = NATURAL, rtol: float | None = None):
    """``|f(w)|**2`` realising ``chi``; raises :class:`UnphysicalKernel` if negative."""
    if rtol is None:
        rtol = CLOSED_FORM_RTOL if chi.closed_form else TABULATED_RTOL
    values = KernelCoupling(chi, geometry, consts).f2(omega)
    arr = np.atleast_1d(values)
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    bad = arr < -rtol * scale
    if np.any(bad):
        w = np.atleast_1d(np.asarray(omega, dtype=float))[bad]
        raise UnphysicalKernel(
            f"sine transform negative at omega = {w[:5].tolist()}; kernel is not absorptive")
    return values


def kernel_laplace(chi: MemoryKernel, s):
    """``int_0^inf chi(t) exp(-s t) dt`` for ``Re s > 0``."""
    s_arr = np.asarray(s, dtype=complex)
    if np.any(s_arr.real <= 0):
        raise ModelValidationError("Laplace variable needs Re s > 0")
    out = chi.laplace(s_arr)
    return out if np.ndim(out) else complex(out)


def _ir_exponent(func, w: float = 1e-8) -> float:
    lo, hi = func(w), func(10 * w)
    if lo == 0 or hi == 0:
        return math.inf
    return math.log10(abs(hi) / abs(lo))


def noise_correlation(f: CouplingFunction, bath: BathSpec, tau: float,
                      window: tuple[float, float], rtol: float = 1e-10) -> complex:
    """Two-point function ``<R_N(tau) R_N(0)>`` of the noise operator.

    ``window`` bounds the frequency integral and must be given explicitly;
    an Ohmic coupling is infrared divergent, so ``window[0] = 0`` raises
    :class:`IRDivergent` for it.
    """
    w_lo, w_hi = map(float, window)
    if not (0 <= w_lo < w_hi):
        raise ModelValidationError("window must satisfy 0 <= w_min < w_max")
    consts = bath.consts
    measure = 0.5 * consts.hbar * prefactor(bath.geometry, consts)
    T = bath.temperature

    def weight(w):
        w = np.asarray(w, dtype=float)
        if T > 0:
            # the coth factor is singular at w = 0; its product with g has a finite limit
            w = np.maximum(w, 1e-150)
            g = f.spectral_weight(w)
            with np.errstate(over="ignore"):
                x = consts.hbar * w / (consts.kB * T)
            return g / np.tanh(0.5 * x)
        return f.spectral_weight(w)

    def sym(w):
        return float(weight(w))

    def anti(w):
        return float(f.spectral_weight(w))

    if w_lo == 0.0 and _ir_exponent(sym) <= -1.0 + 1e-6:
        raise IRDivergent("noise spectrum is not integrable at w = 0; raise window[0]")

    kw = dict(epsabs=0.0, epsrel=rtol, limit=500)
    if tau == 0.0:
        re, _ = integrate.quad(sym, w_lo, w_hi, **kw)
        return complex(measure * re, 0.0)
    re, _ = integrate.quad(sym, w_lo, w_hi, weight="cos", wvar=tau, **kw)
    im, _ = integrate.quad(anti, w_lo, w_hi, weight="sin", wvar=tau, **kw)
    return complex(measure * re, -measure * im)


@dataclass
class PassivityReport:
    passed: bool
    unphysical: bool
    amplifier: bool
    negative_regions: list[tuple[float, float]]
    min_value: float
    messages: list[str]


def validate_passivity(obj, omega=None, alpha: float | None = None,
                       rtol: float | None = None) -> PassivityReport:
    """Check a kernel or coupling for absorptive behaviour.

    Flags negative ``|f|**2`` (equivalently a negative sine transform of the
    kernel) on the test grid, and for the box position kernel a strength
    ``alpha`` outside ``(0, 1)``, where the environment would amplify.
    """
    if omega is None:
        omega = np.logspace(-3, 3, 601)
    omega = np.asarray(omega, dtype=float)
    if isinstance(obj, MemoryKernel):
        kernel = obj
        values = obj.sine_transform(omega)
        closed = obj.closed_form
    elif isinstance(obj, CouplingFunction):
        kernel = obj.kernel if isinstance(obj, KernelCoupling) else None
        values = obj.f2(omega)
        closed = isinstance(obj, KernelCoupling) and obj.kernel.closed_form
    else:
        raise TypeError("expected a MemoryKernel or CouplingFunction")
    if rtol is None:
        rtol = CLOSED_FORM_RTOL if closed else TABULATED_RTOL
    if alpha is None and isinstance(kernel, BoxKernel):
        alpha = kernel.alpha

    values = np.atleast_1d(values)
    scale = np.max(np.abs(values)) if values.size else 0.0
    neg = values < -rtol * scale
    regions = []
    if np.any(neg):
        edges = np.flatnonzero(np.diff(np.concatenate([[0], neg.astype(int), [0]])))
        for a, b in zip(edges[::2], edges[1::2]):
            regions.append((float(omega[a]), float(omega[b - 1])))
    messages = []
    if regions:
        messages.append("sine transform negative on " + ", ".join(f"[{a:g}, {b:g}]" for a, b in regions)
                        + ": unphysical kernel")
    amplifier = alpha is not None and not (0.0 < alpha < 1.0)
    if amplifier:
        messages.append(f"alpha = {alpha:g} outside (0, 1): environment acts as an amplifier")
    return PassivityReport(
        passed=not regions and not amplifier,
        unphysical=bool(regions),
        amplifier=amplifier,
        negative_regions=regions,
        min_value=float(values.min()) if values.size else 0.0,
        messages=messages,
    )


# ---------------------------------------------------------------------------
# CSV exchange


def _write_two_columns(path, header, a, b):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for x, y in zip(a, b):
            writer.writerow([repr(float(x)), repr(float(y))])


def load_tabulated(path, consts: PhysConsts = NATURAL, interpolation: str = "cubic"):
    """Load a ``t,chi`` kernel or ``omega,f2`` coupling table."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ModelValidationError(f"{path}: empty file")
    header = tuple(h.strip() for h in rows[0])
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise ModelValidationError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != 2:
        raise ModelValidationError(f"{path}: expected two columns")
    if header == ("t", "chi"):
        return TabulatedKernel(data[:, 0], data[:, 1], interpolation)
    if header == ("omega", "f2"):
        return TabulatedCoupling(data[:, 0], data[:, 1], consts, interpolation)
    raise ModelValidationError(f"{path}: header must be 't,chi' or 'omega,f2', got {','.join(header)}")
