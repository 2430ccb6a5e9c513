"""First-order transition rates of a damped oscillator or field mode.

All rates share the golden-rule base

    base = 4 pi**2 w0**3 |f(w0)|**2 / (m hbar c**3)

which reduces to ``beta / m`` for the Ohmic coupling.  Rates are per unit
time; each report carries the window ``10/w0 < t < 0.1/Gamma`` in which a
linear-in-time transition probability is meaningful.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .bath_model import NATURAL, CouplingFunction, Geometry, KernelCoupling, PhysConsts
from .errors import DeltaRegularization, ModelValidationError
from .io import json_text, write_csv

__all__ = ["Basis", "RateReport", "golden_rule_base", "thermal_factors", "rate_vacuum_down",
           "rates_excited_env", "rates_thermal", "scalar_mode_rates", "rate_sweep",
           "RATE_HEADER"]

RATE_HEADER = ("n", "T", "gamma_down", "gamma_up")


class Basis(enum.Enum):
    VACUUM = "vacuum"
    EXCITED_ENV = "excited_env"
    THERMAL = "thermal"


@dataclass
class RateReport:
    gamma_down: float
    gamma_up: float
    basis: Basis
    validity_window: tuple[float, float]
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json_text(self)


def _window(omega0: float, rates: Sequence[float]) -> tuple[float, float]:
    gamma = max(rates)
    return 10.0 / omega0, (0.1 / gamma if gamma > 0 else math.inf)


def golden_rule_base(m: float, omega0: float, f: CouplingFunction,
                     consts: PhysConsts = NATURAL) -> float:
    if not (m > 0 and omega0 > 0):
        raise ModelValidationError("m and omega0 must be positive")
    if isinstance(f, KernelCoupling) and f.consts == consts:
        # same quantity via the kernel's sine transform; avoids the pi**2 round trip
        scale = 1.5 if f.geometry is Geometry.THREE_D else 1.0
        return scale * omega0 * float(f.kernel.sine_transform(omega0)) / m
    f2 = float(f.f2(omega0))
    return 4.0 * math.pi ** 2 * omega0 ** 3 * f2 / (m * consts.hbar * consts.c ** 3)


def thermal_factors(omega0: float, T: float, consts: PhysConsts = NATURAL) -> tuple[float, float]:
    """``(e**x / (e**x - 1), 1 / (e**x - 1))`` with ``x = hbar w0 / kB T``; ``(1, 0)`` at ``T = 0``."""
    if T < 0:
        raise ModelValidationError("temperature must be >= 0")
    if T == 0:
        return 1.0, 0.0
    x = consts.hbar * omega0 / (consts.kB * T)
    return -1.0 / math.expm1(-x), (1.0 / math.expm1(x) if x < 700 else 0.0)


def rate_vacuum_down(n: int, m: float, omega0: float, f: CouplingFunction,
                     consts: PhysConsts = NATURAL) -> float:
    """Decay rate ``n * base`` from Fock level ``n`` into the vacuum."""
    if n < 0:
        raise ModelValidationError("Fock level must be >= 0")
    return n * golden_rule_base(m, omega0, f, consts)


def rates_excited_env(n: int, j_res: int, m: float, omega0: float, f: CouplingFunction,
                      consts: PhysConsts = NATURAL,
                      line_density: float | None = None) -> RateReport:
    """Rates when the bath holds ``j_res`` quanta resonant with ``omega0``.

    The absorption rate involves a delta function in frequency, which is
    replaced by ``line_density`` (spectral density of the resonant quanta,
    units of inverse frequency).
    """
    if n < 0 or j_res < 0:
        raise ModelValidationError("counts must be >= 0")
    down = rate_vacuum_down(n, m, omega0, f, consts)
    up = 0.0
    if j_res > 0:
        if line_density is None:
            raise DeltaRegularization("resonant quanta need a line_density")
        if line_density < 0:
            raise ModelValidationError("line_density must be >= 0")
        f2 = float(f.f2(omega0))
        up = (n + 1) * math.pi * omega0 * f2 / (m * consts.hbar) * j_res * line_density
    return RateReport(down, up, Basis.EXCITED_ENV, _window(omega0, [down, up]),
                      {"n": n, "j_res": j_res, "line_density": line_density})


def rates_thermal(n: int, T: float, m: float, omega0: float, f: CouplingFunction,
                  consts: PhysConsts = NATURAL) -> RateReport:
    """Emission and absorption rates in a thermal bath at temperature ``T``."""
    if n < 0:
        raise ModelValidationError("Fock level must be >= 0")
    base = golden_rule_base(m, omega0, f, consts)
    emit, absorb = thermal_factors(omega0, T, consts)
    down = base * n * emit
    up = base * (n + 1) * absorb
    basis = Basis.THERMAL if T > 0 else Basis.VACUUM
    return RateReport(down, up, basis, _window(omega0, [down, up]), {"n": n, "T": T})


def scalar_mode_rates(r: int, omega_m: float, lam: float, T: float, f: CouplingFunction,
                      consts: PhysConsts = NATURAL,
                      other_modes: Sequence[float] = ()) -> tuple[RateReport, dict[float, float]]:
    """Rates for a field mode holding ``r`` quanta, plus thermal excitation of other modes.

    The second value maps each frequency in ``other_modes`` to the rate at
    which that empty mode is excited; it does not depend on ``r``.
    """
    report = rates_thermal(r, T, lam, omega_m, f, consts)
    report.params = {"r": r, "omega_m": omega_m, "T": T}
    cross = {}
    for w in other_modes:
        _, absorb = thermal_factors(w, T, consts)
        cross[float(w)] = golden_rule_base(lam, w, f, consts) * absorb
    return report, cross


def rate_sweep(ns: Sequence[int], temps: Sequence[float], m: float, omega0: float,
               f: CouplingFunction, consts: PhysConsts = NATURAL, path=None) -> list[tuple]:
    rows = []
    for n in ns:
        for T in temps:
            rep = rates_thermal(int(n), float(T), m, omega0, f, consts)
            rows.append((int(n), float(T), rep.gamma_down, rep.gamma_up))
    if path is not None:
        write_csv(path, RATE_HEADER, rows)
    return rows
