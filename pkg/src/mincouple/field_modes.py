"""Damped scalar-field modes on ``[0, L]`` and the per-mode vector-field reduction.

With Dirichlet walls the field splits into modes ``sin(n pi x / L)`` of
frequency ``w_n = sqrt(mu / lam) n pi / L``.  Each mode is a damped
oscillator of mass ``lam``, so everything here maps onto
:mod:`mincouple.memory_dynamics` under ``(m, w0) -> (lam, w_n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bath_model import BoxKernel, MemoryKernel, StepKernel
from .errors import AmplifierRegime, ModelValidationError, Overdamped
from .io import write_csv
from .memory_dynamics import OscillatorSystem

__all__ = ["ScalarFieldParams", "VectorModeParams", "mode_frequencies", "mode_solution",
           "mode_oscillator", "mode_table", "GreenValue", "green_function", "green_poles",
           "static_green", "green_grid", "vector_mode_reduce", "MODE_HEADER", "GREEN_HEADER"]

MODE_HEADER = ("n", "omega_n", "Omega_n")
GREEN_HEADER = ("x", "xp", "re", "im")


@dataclass(frozen=True)
class ScalarFieldParams:
    L: float
    lam: float
    mu: float
    n_max: int = 1024

    def __post_init__(self):
        if not (self.L > 0 and self.lam > 0 and self.mu > 0):
            raise ModelValidationError("L, lambda and mu must be positive")
        if int(self.n_max) < 1:
            raise ModelValidationError("n_max must be >= 1")


@dataclass(frozen=True)
class VectorModeParams:
    rho: float
    omega0: float
    alpha: float
    beta: float
    delta: float = 0.0

    def __post_init__(self):
        if not (self.rho > 0 and self.omega0 > 0):
            raise ModelValidationError("rho and omega0 must be positive")
        if not self.delta >= 0:
            raise ModelValidationError("delta must be >= 0")


def mode_frequencies(p: ScalarFieldParams, n_max: int | None = None) -> np.ndarray:
    n = np.arange(1, (p.n_max if n_max is None else n_max) + 1)
    return math.sqrt(p.mu / p.lam) * n * math.pi / p.L


def _omega_n(p: ScalarFieldParams, n: int) -> float:
    if n < 1:
        raise ModelValidationError("mode index starts at 1")
    return math.sqrt(p.mu / p.lam) * n * math.pi / p.L


def mode_solution(p: ScalarFieldParams, n: int, t, x0: float, v0: float, beta: float):
    """Mean amplitude of mode ``n`` under Ohmic damping ``beta``."""
    w = _omega_n(p, n)
    g = beta / (2.0 * p.lam)
    if g >= w:
        raise Overdamped(f"mode {n}: beta/2lam = {g:g} >= omega_n = {w:g}")
    W = math.sqrt(w * w - g * g)
    t = np.asarray(t, dtype=float)
    return np.exp(-g * t) * (x0 * np.cos(W * t) + (g * x0 + v0) / W * np.sin(W * t))


def mode_oscillator(p: ScalarFieldParams, n: int, beta: float, x0: float = 1.0,
                    v0: float = 0.0) -> OscillatorSystem:
    """The equivalent oscillator ``(m, w0) = (lam, w_n)`` with a step kernel."""
    return OscillatorSystem(p.lam, _omega_n(p, n), StepKernel(beta), x0, p.lam * v0)


def mode_table(p: ScalarFieldParams, beta: float, path=None) -> list[tuple]:
    """Rows ``(n, omega_n, Omega_n)``; ``Omega_n`` is NaN for overdamped modes."""
    g = beta / (2.0 * p.lam)
    rows = []
    for n, w in enumerate(mode_frequencies(p), start=1):
        W = math.sqrt(w * w - g * g) if w > g else math.nan
        rows.append((n, float(w), W))
    if path is not None:
        write_csv(path, MODE_HEADER, rows)
    return rows


def _chi_bar(chi_bar, s: complex) -> complex:
    if chi_bar is None:
        return 0.0
    if isinstance(chi_bar, MemoryKernel):
        return complex(chi_bar.laplace(s))
    if callable(chi_bar):
        return complex(chi_bar(s))
    return complex(chi_bar)


@dataclass
class GreenValue:
    value: complex
    tail_bound: float
    n_max: int


def green_function(x: float, xp: float, s: complex, p: ScalarFieldParams,
                   chi_bar: MemoryKernel | Callable | complex | None = None,
                   n_max: int | None = None) -> GreenValue:
    """Truncated mode sum for the Laplace-domain Green function.

    ``chi_bar`` is the Laplace-transformed susceptibility at ``s`` (a kernel,
    a callable or a number).  ``tail_bound`` bounds the dropped terms by
    ``2 L / (mu pi**2 N)`` times the worst denominator ratio.
    """
    if not (0.0 <= x <= p.L and 0.0 <= xp <= p.L):
        raise ModelValidationError("x and x' must lie in [0, L]")
    N = p.n_max if n_max is None else int(n_max)
    s = complex(s)
    cb = _chi_bar(chi_bar, s)
    n = np.arange(1, N + 1)
    k = n * math.pi / p.L
    wn2 = (p.mu / p.lam) * k * k
    den = p.lam * s * s + s * s * cb + p.lam * wn2
    terms = np.sin(k * x) * np.sin(k * xp) / den
    value = 2.0 / p.L * complex(np.sum(terms))
    # for large n the denominator approaches lam w_n**2 = mu k**2
    ratio = abs(p.lam * wn2[-1] / den[-1])
    tail = 2.0 * p.L / (p.mu * math.pi ** 2 * N) * max(ratio, 1.0)
    return GreenValue(value, tail, N)


def static_green(x: float, xp: float, p: ScalarFieldParams) -> float:
    """Closed-form ``s -> 0`` limit ``x_< (L - x_>) / (mu L)``."""
    lo, hi = min(x, xp), max(x, xp)
    return lo * (p.L - hi) / (p.mu * p.L)


def green_poles(p: ScalarFieldParams, n: int, beta: float) -> tuple[complex, complex]:
    """Roots in ``s`` of the mode-``n`` denominator with ``chi_bar = beta / s``.

    The quadratic ``lam s**2 + beta s + lam w_n**2`` is solved by the
    companion-matrix eigenvalues and polished with one Newton step.
    """
    w = _omega_n(p, n)
    coeffs = [p.lam, beta, p.lam * w * w]
    roots = np.roots(coeffs).astype(complex)
    polished = []
    for r in roots:
        f = (coeffs[0] * r + coeffs[1]) * r + coeffs[2]
        df = 2 * coeffs[0] * r + coeffs[1]
        polished.append(r - f / df if df != 0 else r)
    polished.sort(key=lambda z: z.imag)
    return polished[0], polished[1]


def green_grid(xs, s: complex, p: ScalarFieldParams, chi_bar=None, path=None) -> list[tuple]:
    rows = []
    for x in xs:
        for xp in xs:
            g = green_function(float(x), float(xp), s, p, chi_bar).value
            rows.append((float(x), float(xp), g.real, g.imag))
    if path is not None:
        write_csv(path, GREEN_HEADER, rows)
    return rows


def vector_mode_reduce(p: VectorModeParams, q0=1.0, p0=0.0) -> OscillatorSystem:
    """Effective oscillator for one vector-field mode.

    With ``delta == 0`` the box kernel collapses to a frequency shift and the
    result is a step-kernel oscillator at ``sqrt(1 - alpha) w0``; otherwise
    the box is kept as a position kernel.
    """
    if not (0.0 <= p.alpha < 1.0):
        raise AmplifierRegime(f"alpha = {p.alpha:g} outside the absorptive range")
    if p.delta == 0.0:
        w = math.sqrt(1.0 - p.alpha) * p.omega0
        return OscillatorSystem(p.rho, w, StepKernel(p.beta), q0, p0)
    box = BoxKernel(p.alpha, p.rho, p.omega0, p.delta)
    return OscillatorSystem(p.rho, p.omega0, StepKernel(p.beta), q0, p0, position_kernel=box)
