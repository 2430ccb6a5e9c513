"""Energy bookkeeping between the oscillator (or field modes) and the bath.

The bath absorbs, in the long-time limit, the energy

    E_B = (hbar beta w0 / pi m) (n + 1/2) I,
    I   = int_0^inf (w0**2 + x**2) / ((w0**2 - x**2)**2 + g**2 x**2) dx,   g = beta/m

and residue calculus gives ``I = pi / g`` exactly, so ``E_B`` equals the
initial energy ``(n + 1/2) hbar w0``.  Here ``I`` is evaluated by quadrature
so the identity is a genuine check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .bath_model import NATURAL, PhysConsts
from .errors import ModelValidationError, Overdamped, QuadratureError
from .io import json_text, write_csv

__all__ = ["initial_energy", "lorentzian_integral", "absorbed_energy_integral",
           "scalar_residual_momentum", "residual_momentum_direct", "mode_position_variance",
           "scalar_bath_energy", "EnergyReport", "energy_report", "energy_sweep",
           "SWEEP_HEADER"]

SWEEP_HEADER = ("omega0", "beta", "E_init", "E_bath", "rel_err")


def initial_energy(n: int, omega0: float, consts: PhysConsts = NATURAL) -> float:
    """``(n + 1/2) hbar omega0``."""
    if n < 0:
        raise ModelValidationError("Fock level must be >= 0")
    return (n + 0.5) * consts.hbar * omega0


def lorentzian_integral(omega0: float, gamma: float, rtol: float = 1e-12) -> float:
    """Quadrature value of ``I`` above; equals ``pi / gamma`` for ``0 < gamma < 2 omega0``."""
    if not gamma > 0:
        raise ModelValidationError("damping rate must be positive")
    if not gamma < 2.0 * omega0:
        raise Overdamped(f"gamma = {gamma:g} >= 2 omega0")
    w2, g2 = omega0 * omega0, gamma * gamma

    def f(x):
        x2 = x * x
        return (w2 + x2) / ((w2 - x2) ** 2 + g2 * x2)

    # panels of width ~gamma around the resonance, then the 1/x**2 tail
    width = min(gamma, omega0)
    breaks = [0.0]
    for k in (-8, -2, -0.5, 0, 0.5, 2, 8):
        b = omega0 + k * width
        if b > breaks[-1]:
            breaks.append(b)
    total = err_total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        v, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=200)
        total += v
        err_total += e
    v, e = integrate.quad(f, breaks[-1], np.inf, epsabs=0.0, epsrel=rtol, limit=200)
    total += v
    err_total += e
    if err_total > 1e3 * rtol * total:
        raise QuadratureError(f"Lorentzian integral error estimate {err_total:.3e}")
    return total


def absorbed_energy_integral(n: int, m: float, beta: float, omega0: float,
                             consts: PhysConsts = NATURAL) -> float:
    """Long-time bath energy for an oscillator started in Fock state ``n``."""
    if n < 0:
        raise ModelValidationError("Fock level must be >= 0")
    if not (m > 0 and beta > 0):
        raise ModelValidationError("m and beta must be positive")
    inner = lorentzian_integral(omega0, beta / m)
    return consts.hbar * beta * omega0 / (math.pi * m) * (n + 0.5) * inner


def _modes(modes: Iterable[float]) -> np.ndarray:
    w = np.asarray(list(modes), dtype=float)
    if np.any(w <= 0):
        raise ModelValidationError("mode frequencies must be positive")
    return w


def scalar_residual_momentum(modes: Sequence[float], beta: float, lam: float,
                             hbar: float = 1.0) -> float:
    """Residual kinetic term ``(beta**2 hbar / 4 lam**2) sum 1/omega`` of the excited modes."""
    w = _modes(modes)
    if w.size == 0:
        raise ModelValidationError("mode list must be nonempty")
    return beta * beta * hbar / (4.0 * lam * lam) * float(np.sum(1.0 / w))


def mode_position_variance(omega: float, lam: float, hbar: float = 1.0,
                           n: int = 0, normal_ordered: bool = False) -> float:
    """``<x**2>`` of a mode of mass ``lam`` in Fock state ``n``.

    The plain value is ``(2n + 1) hbar / (2 lam omega)``; normal ordering
    drops the vacuum part, leaving ``n hbar / (lam omega)``.
    """
    unit = hbar / (2.0 * lam * omega)
    return 2.0 * n * unit if normal_ordered else (2 * n + 1) * unit


def residual_momentum_direct(modes: Sequence[float], beta: float, lam: float,
                             hbar: float = 1.0) -> float:
    """``(beta**2 / 2 lam) sum <x_m**2(0)>`` built from per-mode position variances.

    Each excited mode enters at its vacuum variance, which is what the
    closed form in :func:`scalar_residual_momentum` sums.
    """
    w = _modes(modes)
    if w.size == 0:
        raise ModelValidationError("mode list must be nonempty")
    var = sum(mode_position_variance(x, lam, hbar) for x in w)
    return beta * beta / (2.0 * lam) * var


def scalar_bath_energy(modes: Sequence[float], beta: float, lam: float,
                       hbar: float = 1.0) -> float:
    """Energy absorbed by the bath from singly excited field modes."""
    total = 0.0
    for w in _modes(modes):
        inner = lorentzian_integral(w, beta / lam)
        total += hbar * beta / (math.pi * lam) * w * inner
    return total


@dataclass
class EnergyReport:
    E_system_initial: float
    E_system_asymptotic: float
    E_bath_asymptotic: float
    residual_p_variance: float

    @property
    def relative_error(self) -> float:
        return abs(self.E_bath_asymptotic - self.E_system_initial) / self.E_system_initial

    def to_json(self) -> str:
        return json_text({**self.__dict__, "relative_error": self.relative_error})


def energy_report(n: int, m: float, beta: float, omega0: float,
                  consts: PhysConsts = NATURAL) -> EnergyReport:
    """Energy balance of the damped oscillator started in Fock state ``n``.

    The asymptotic normal-ordered system energy is zero; the residual
    momentum entry uses the field-mode formula with ``lam -> m``.
    """
    return EnergyReport(
        E_system_initial=initial_energy(n, omega0, consts),
        E_system_asymptotic=0.0,
        E_bath_asymptotic=absorbed_energy_integral(n, m, beta, omega0, consts),
        residual_p_variance=scalar_residual_momentum([omega0], beta, m, consts.hbar),
    )


def energy_sweep(omegas: Sequence[float], gammas: Sequence[float], n: int = 0, m: float = 1.0,
                 consts: PhysConsts = NATURAL, path=None) -> list[tuple]:
    """Rows ``(omega0, beta, E_init, E_bath, rel_err)`` over ``omega0 x beta/m``."""
    rows = []
    for w0 in omegas:
        for g in gammas:
            beta = g * m
            e0 = initial_energy(n, w0, consts)
            eb = absorbed_energy_integral(n, m, beta, w0, consts)
            rows.append((float(w0), float(beta), e0, eb, abs(eb - e0) / e0))
    if path is not None:
        write_csv(path, SWEEP_HEADER, rows)
    return rows
