"""Exact evolution of the oscillator coupled to a finite, discretised bath.

The continuum of bath modes is replaced by ``N`` modes on a uniform midpoint
grid.  Each carries the squared coupling ``g_j**2 = (4 pi w_j**2 / c**3)
|f(w_j)|**2 dw``, the Riemann-sum image of the ``d^3k`` measure.  In the
rotating-wave approximation the Hamiltonian (in units of ``hbar``)

    H = w0 a^+ a + sum_j w_j b_j^+ b_j - i sum_j k_j (a^+ b_j - b_j^+ a),
    k_j = sqrt(w0 / (2 m hbar)) g_j

conserves the total excitation number, so a Fock initial state evolves
inside one small sector.  The sector Hamiltonian is sparse and is
propagated with ``scipy.sparse.linalg.expm_multiply``.

Energies are normal ordered; the system zero-point ``hbar w0 / 2`` is added
only on request in reports.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from .bath_model import NATURAL, CouplingFunction, PhysConsts
from .errors import (DimensionBudget, ModelValidationError, WindowExcludesResonance,
                     WindowInvalid)
from .io import write_csv

__all__ = ["DiscreteBath", "discretize_bath", "SectorSpace", "TruncatedState", "Evolution",
           "fock_state", "evolve_exact", "Observables", "evolve_observables", "RateFit", "measure_rate", "energy_partition",
           "single_particle_propagator", "beam_splitter_probability",
           "thermal_transition_probabilities", "OracleConfig", "run_oracle",
           "TRAJECTORY_HEADER", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 2_000_000
TRAJECTORY_HEADER = ("t", "P_n", "E_sys", "E_bath", "norm")


@dataclass(frozen=True)
class DiscreteBath:
    omega: np.ndarray
    g2: np.ndarray
    d_omega: float
    cutoff: int = 1
    consts: PhysConsts = NATURAL

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        g2 = np.asarray(self.g2, dtype=float)
        if w.ndim != 1 or w.shape != g2.shape or w.size < 1:
            raise ModelValidationError("omega and g2 must be equal-length 1-D arrays")
        if np.any(np.diff(w) <= 0):
            raise ModelValidationError("mode frequencies must be strictly increasing")
        if np.any(g2 < 0):
            raise ModelValidationError("g_j^2 must be >= 0")
        if int(self.cutoff) < 1:
            raise ModelValidationError("per-mode Fock cutoff must be >= 1")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "g2", g2)

    @property
    def N(self) -> int:
        return self.omega.size

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / self.d_omega if self.d_omega > 0 else math.inf

    def couplings(self, omega0: float, m: float) -> np.ndarray:
        """Rates ``k_j`` (energy coupling divided by ``hbar``)."""
        return np.sqrt(omega0 / (2.0 * m * self.consts.hbar) * self.g2)


def discretize_bath(f: CouplingFunction, window: tuple[float, float], N: int,
                    omega0: float | None = None, cutoff: int = 1,
                    consts: PhysConsts | None = None) -> DiscreteBath:
    """Midpoint discretisation of ``f`` on ``window`` with ``N`` modes."""
    lo, hi = map(float, window)
    if N < 2:
        raise ModelValidationError("need at least two bath modes")
    if not (0.0 < lo < hi):
        raise ModelValidationError("window must satisfy 0 < w_min < w_max")
    consts = f.consts if consts is None else consts
    if omega0 is not None and not (lo <= omega0 <= hi):
        warnings.warn(f"omega0 = {omega0:g} outside window [{lo:g}, {hi:g}]",
                      WindowExcludesResonance, stacklevel=2)
    dw = (hi - lo) / N
    w = lo + dw * (np.arange(N) + 0.5)
    g2 = 4.0 * math.pi * w ** 2 / consts.c ** 3 * np.asarray(f.f2(w), dtype=float) * dw
    return DiscreteBath(w, g2, dw, cutoff, consts)


def _count_configs(N: int, k: int, cutoff: int) -> int:
    """Number of bath occupations with total ``k`` and each ``m_j <= cutoff``."""
    # coefficient of x**k in (1 + x + ... + x**cutoff)**N
    base = [1] * (min(cutoff, k) + 1)
    e = N
    result = [1]
    while e:
        if e & 1:
            result = _poly_mul(result, base, k)
        base = _poly_mul(base, base, k)
        e >>= 1
    return result[k] if k < len(result) else 0


def _poly_mul(a, b, k):
    out = [0] * min(len(a) + len(b) - 1, k + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if i + j > k:
                break
            out[i + j] += x * y
    return out


class SectorSpace:
    """Basis of fixed total excitation ``K``.

    A basis state is ``(n_s, modes)`` with ``modes`` a sorted tuple listing
    each excited bath mode once per quantum.
    """

    def __init__(self, N: int, K: int, sys_cutoff: int | None = None, bath_cutoff: int = 1,
                 budget: int = DEFAULT_BUDGET):
        if K < 0:
            raise ModelValidationError("excitation number must be >= 0")
        self.N, self.K = N, K
        self.sys_cutoff = K if sys_cutoff is None else int(sys_cutoff)
        self.bath_cutoff = int(bath_cutoff)
        dim = sum(_count_configs(N, K - ns, self.bath_cutoff)
                  for ns in range(0, min(K, self.sys_cutoff) + 1))
        if dim > budget:
            raise DimensionBudget(f"sector dimension {dim} exceeds budget {budget}")
        states = []
        for ns in range(min(K, self.sys_cutoff), -1, -1):
            for modes in itertools.combinations_with_replacement(range(N), K - ns):
                if self.bath_cutoff < K - ns and _max_mult(modes) > self.bath_cutoff:
                    continue
                states.append((ns, modes))
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}
        self.sys_level = np.array([s[0] for s in states])

    @property
    def dim(self) -> int:
        return len(self.states)

    def full_dimension(self) -> int:
        """Dimension of the whole truncated product space (all sectors)."""
        return (self.sys_cutoff + 1) * (self.bath_cutoff + 1) ** self.N

    def hamiltonian(self, bath: DiscreteBath, omega0: float, m: float) -> sparse.csr_matrix:
        kappa = bath.couplings(omega0, m)
        diag = np.array([omega0 * ns + sum(bath.omega[j] for j in modes)
                         for ns, modes in self.states])
        rows, cols, vals = [], [], []
        for src, (ns, modes) in enumerate(self.states):
            if ns + 1 > self.sys_cutoff:
                continue
            for j, mult in _multiplicities(modes):
                rest = list(modes)
                rest.remove(j)
                dst = self.index.get((ns + 1, tuple(rest)))
                if dst is None:
                    continue
                # <ns+1, m_j-1| -i k_j a^+ b_j |ns, m_j>
                amp = -1j * kappa[j] * math.sqrt(ns + 1) * math.sqrt(mult)
                rows += [dst, src]
                cols += [src, dst]
                vals += [amp, np.conj(amp)]
        off = sparse.coo_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))
        return (sparse.diags(diag) + off).tocsr()

    def bath_energy_diag(self, bath: DiscreteBath) -> np.ndarray:
        return np.array([sum(bath.omega[j] for j in modes) for _, modes in self.states])


def _max_mult(modes) -> int:
    return max((len(list(g)) for _, g in itertools.groupby(modes)), default=0)


def _multiplicities(modes):
    for j, g in itertools.groupby(modes):
        yield j, len(list(g))


@dataclass
class TruncatedState:
    space: SectorSpace
    amps: np.ndarray
    t: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def population(self, n: int) -> float:
        return float(np.sum(np.abs(self.amps[self.space.sys_level == n]) ** 2))


def fock_state(bath: DiscreteBath, n: int, bath_modes: Sequence[int] = (),
               sys_cutoff: int | None = None, budget: int = DEFAULT_BUDGET) -> TruncatedState:
    """``|n> (x) |bath occupations>``; ``bath_modes`` lists excited modes (repeats allowed)."""
    modes = tuple(sorted(int(j) for j in bath_modes))
    if any(not (0 <= j < bath.N) for j in modes):
        raise ModelValidationError("bath mode index out of range")
    K = n + len(modes)
    space = SectorSpace(bath.N, K, sys_cutoff, bath.cutoff, budget)
    key = (n, modes)
    if key not in space.index:
        raise ModelValidationError("initial state lies outside the truncated space")
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index[key]] = 1.0
    return TruncatedState(space, amps, 0.0)


@dataclass
class Evolution:
    space: SectorSpace
    t: np.ndarray
    amps: np.ndarray        # (len(t), dim)
    H: sparse.csr_matrix = field(repr=False)

    def state(self, i: int) -> TruncatedState:
        return TruncatedState(self.space, self.amps[i], float(self.t[i]))

    def populations(self, n: int) -> np.ndarray:
        mask = self.space.sys_level == n
        return np.sum(np.abs(self.amps[:, mask]) ** 2, axis=1)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.amps) ** 2, axis=1))


STORE_LIMIT = 50_000_000  # stored amplitudes (time points x dimension)


def _check_grid(t_arr: np.ndarray) -> None:
    if t_arr.size > 1:
        steps = np.diff(t_arr)
        if not (steps[0] > 0 and np.allclose(steps, steps[0], rtol=1e-9, atol=0)):
            raise ModelValidationError("time grid must be uniform and increasing")


def _propagate(A, psi0: TruncatedState, t_arr: np.ndarray, chunk: int):
    """Yield ``(t_chunk, amps_chunk)`` along a uniform grid, restarting from the last state."""
    psi, t_prev = psi0.amps, psi0.t
    for lo in range(0, t_arr.size, chunk):
        tc = t_arr[lo:lo + chunk]
        if tc[0] != t_prev:
            psi = expm_multiply(A * (tc[0] - t_prev), psi)
        if tc.size == 1:
            block = psi[None, :]
        else:
            block = np.asarray(expm_multiply(A, psi, start=0.0, stop=tc[-1] - tc[0],
                                             num=tc.size, endpoint=True))
        psi, t_prev = block[-1], tc[-1]
        yield tc, block


def evolve_exact(bath: DiscreteBath, psi0: TruncatedState, t, omega0: float,
                 m: float = 1.0) -> TruncatedState | Evolution:
    """Propagate ``psi0`` to time ``t`` (scalar) or over a uniform grid ``t``."""
    space = psi0.space
    H = space.hamiltonian(bath, omega0, m)
    A = -1j * H
    if np.ndim(t) == 0:
        amps = expm_multiply(A * (float(t) - psi0.t), psi0.amps)
        return TruncatedState(space, amps, float(t))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_grid(t_arr)
    if t_arr.size * space.dim > STORE_LIMIT:
        raise DimensionBudget("trajectory too large to store; use evolve_observables")
    blocks = [b for _, b in _propagate(A, psi0, t_arr, max(t_arr.size, 1))]
    return Evolution(space, t_arr, np.concatenate(blocks), H)


@dataclass
class Observables:
    t: np.ndarray
    populations: dict
    E_sys: np.ndarray
    E_bath: np.ndarray
    E_total: np.ndarray
    norm: np.ndarray


def evolve_observables(bath: DiscreteBath, psi0: TruncatedState, t, omega0: float,
                       m: float = 1.0, levels: Sequence[int] | None = None) -> Observables:
    """Populations and energies along a uniform grid without storing the state."""
    space = psi0.space
    H = space.hamiltonian(bath, omega0, m)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_grid(t_arr)
    levels = list(range(space.sys_cutoff + 1)) if levels is None else list(levels)
    hbar = bath.consts.hbar
    e_bath_diag = space.bath_energy_diag(bath)
    chunk = max(1, min(t_arr.size, 4_000_000 // max(space.dim, 1)))
    pops = {n: [] for n in levels}
    es, eb, et, nr = [], [], [], []
    for _, block in _propagate(-1j * H, psi0, t_arr, chunk):
        p = np.abs(block) ** 2
        for n in levels:
            pops[n].append(p[:, space.sys_level == n].sum(axis=1))
        es.append(hbar * omega0 * (p @ space.sys_level))
        eb.append(hbar * (p @ e_bath_diag))
        et.append(hbar * np.einsum("ti,ti->t", block.conj(), (H @ block.T).T).real)
        nr.append(np.sqrt(p.sum(axis=1)))
    cat = np.concatenate
    return Observables(t_arr, {n: cat(v) for n, v in pops.items()}, cat(es), cat(eb),
                       cat(et), cat(nr))


@dataclass
class RateFit:
    rate: float
    intercept: float
    residual: float
    window: tuple[float, float]
    method: str


def measure_rate(t, P, window: tuple[float, float], method: str = "linear",
                 recurrence_time: float | None = None, t_min: float | None = None) -> RateFit:
    """Least-squares decay rate of a population over ``window``.

    ``linear`` fits the slope of ``1 - P``; ``log`` fits the slope of
    ``-ln P``, which removes the constant wavefunction-renormalisation
    offset and the curvature of the exponential.
    """
    t = np.asarray(t, dtype=float)
    P = np.asarray(P, dtype=float)
    a, b = map(float, window)
    if not a < b:
        raise WindowInvalid("fit window must satisfy t_start < t_end")
    if recurrence_time is not None and b > recurrence_time:
        raise WindowInvalid(f"window end {b:g} beyond recurrence time {recurrence_time:g}")
    if t_min is not None and a < t_min:
        raise WindowInvalid(f"window start {a:g} before {t_min:g}")
    sel = (t >= a) & (t <= b)
    if np.count_nonzero(sel) < 2:
        raise WindowInvalid("fewer than two samples in the fit window")
    x = t[sel]
    if method == "linear":
        y = 1.0 - P[sel]
    elif method == "log":
        if np.any(P[sel] <= 0):
            raise WindowInvalid("population reaches zero inside the window")
        y = -np.log(P[sel])
    else:
        raise ModelValidationError(f"unknown fit method {method!r}")
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return RateFit(float(coef[0]), float(coef[1]), resid, (a, b), method)


def energy_partition(state: TruncatedState, bath: DiscreteBath, omega0: float,
                     m: float = 1.0, zero_point: bool = False) -> tuple[float, float, float]:
    """``(E_sys, E_bath, E_int)``; add ``hbar w0 / 2`` to ``E_sys`` if ``zero_point``."""
    hbar = bath.consts.hbar
    space = state.space
    p = np.abs(state.amps) ** 2
    e_sys = hbar * omega0 * float(np.sum(p * space.sys_level))
    e_bath = hbar * float(np.sum(p * space.bath_energy_diag(bath)))
    H = space.hamiltonian(bath, omega0, m)
    e_tot = hbar * float(np.vdot(state.amps, H @ state.amps).real)
    if zero_point:
        e_sys += 0.5 * hbar * omega0
        e_tot += 0.5 * hbar * omega0
    return e_sys, e_bath, e_tot - e_sys - e_bath


def single_particle_propagator(bath: DiscreteBath, omega0: float, t, m: float = 1.0) -> np.ndarray:
    """Row ``u(t)`` with ``a(t) = u_0 a + sum_j u_{j+1} b_j`` (Heisenberg picture)."""
    space = SectorSpace(bath.N, 1, 1, 1)
    H = space.hamiltonian(bath, omega0, m)
    e0 = np.zeros(space.dim, dtype=complex)
    e0[0] = 1.0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    # <0|exp(-iHt)|k> = conj(<k|exp(iHt)|0>); |u_k|^2 is all that is used downstream
    if t_arr.size == 1:
        cols = expm_multiply(-1j * H * t_arr[0], e0)[None, :]
    else:
        cols = expm_multiply(-1j * H, e0, start=t_arr[0], stop=t_arr[-1], num=t_arr.size,
                             endpoint=True)
    out = np.asarray(cols)
    return out[0] if np.ndim(t) == 0 else out


def beam_splitter_probability(k: int, n: int, l: int, eta: float) -> float:
    """``P(k | n, l)``: system Fock ``k`` after mixing ``|n>`` with ``|l>`` at transmissivity ``eta``."""
    if not 0 <= k <= n + l:
        return 0.0
    t, r = math.sqrt(eta), math.sqrt(max(0.0, 1.0 - eta))
    amp = 0.0
    for i in range(max(0, k - l), min(n, k) + 1):
        j = k - i
        amp += (math.comb(n, i) * math.comb(l, j) * t ** i * (-r) ** (n - i)
                * r ** j * t ** (l - j))
    amp *= math.sqrt(math.factorial(k) * math.factorial(n + l - k)
                     / (math.factorial(n) * math.factorial(l)))
    return amp * amp


def thermal_transition_probabilities(bath: DiscreteBath, omega0: float, n: int, T: float,
                                     t, m: float = 1.0, tol: float = 1e-14) -> dict:
    """Down/up transition probabilities from ``|n>`` with a thermal bath.

    Under the quadratic RWA dynamics the system output mode mixes the input
    with one effective bath mode; a product of thermal modes makes that mode
    thermal with occupation ``sum |u_j|^2 nbar_j / (1 - eta)``, so the
    ensemble average is an exact beam-splitter sum.
    """
    if T < 0:
        raise ModelValidationError("temperature must be >= 0")
    consts = bath.consts
    if T == 0:
        nbar = np.zeros(bath.N)
    else:
        nbar = 1.0 / np.expm1(consts.hbar * bath.omega / (consts.kB * T))
    u = np.atleast_2d(single_particle_propagator(bath, omega0, t, m))
    eta = np.abs(u[:, 0]) ** 2
    env = np.abs(u[:, 1:]) ** 2 @ nbar
    down = np.zeros(eta.size)
    up = np.zeros(eta.size)
    stay = np.zeros(eta.size)
    for i, (e, s) in enumerate(zip(eta, env)):
        ne = s / (1.0 - e) if e < 1.0 else 0.0
        weight, l = 1.0 / (1.0 + ne), 0
        q = ne / (1.0 + ne)
        while True:
            if n >= 1:
                down[i] += weight * beam_splitter_probability(n - 1, n, l, e)
            up[i] += weight * beam_splitter_probability(n + 1, n, l, e)
            stay[i] += weight * beam_splitter_probability(n, n, l, e)
            l += 1
            weight *= q
            if weight < tol or l > 400:
                break
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    return {"t": t_arr, "down": down, "up": up, "stay": stay, "eta": eta}


@dataclass
class OracleConfig:
    N: int = 512
    window: tuple[float, float] = (0.2, 3.0)
    cutoffs: dict = field(default_factory=lambda: {"system": None, "bath": 1})
    t_grid: tuple[float, float, int] = (0.0, 200.0, 2001)
    n: int = 1
    omega0: float = 1.0
    m: float = 1.0
    beta: float = 0.01
    fit_window: tuple[float, float] = (20.0, 200.0)
    fit_method: str = "log"
    window_relative: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> "OracleConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ModelValidationError(f"unknown oracle config keys: {sorted(unknown)}")
        kw = dict(data)
        for key in ("window", "t_grid", "fit_window"):
            if key in kw:
                kw[key] = tuple(kw[key])
        cfg = cls(**kw)
        if cfg.t_grid[2] < 2:
            raise ModelValidationError("t_grid needs at least two points")
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "OracleConfig":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True, default=list)


@dataclass
class OracleResult:
    config: OracleConfig
    rows: list[tuple]
    fit: RateFit
    energy_drift: float
    bath: DiscreteBath = field(repr=False)

    def to_csv(self, path):
        write_csv(path, TRAJECTORY_HEADER, self.rows)


def run_oracle(cfg: OracleConfig, f: CouplingFunction) -> OracleResult:
    """Evolve ``|n> (x) |0>`` and fit the decay of ``P_n``."""
    lo, hi = cfg.window
    if cfg.window_relative:
        lo, hi = lo * cfg.omega0, hi * cfg.omega0
    bath = discretize_bath(f, (lo, hi), cfg.N, cfg.omega0, cutoff=cfg.cutoffs.get("bath", 1) or 1)
    psi0 = fock_state(bath, cfg.n, sys_cutoff=cfg.cutoffs.get("system"))
    t = np.linspace(*cfg.t_grid[:2], int(cfg.t_grid[2]))
    obs = evolve_observables(bath, psi0, t, cfg.omega0, cfg.m, levels=[cfg.n])
    Pn, e_sys, e_bath, e_tot = obs.populations[cfg.n], obs.E_sys, obs.E_bath, obs.E_total
    drift = float(np.max(np.abs(e_tot - e_tot[0])) / abs(e_tot[0])) if e_tot[0] else 0.0
    fit = measure_rate(t, Pn, cfg.fit_window, cfg.fit_method, bath.recurrence_time)
    rows = list(zip(t, Pn, e_sys, e_bath, obs.norm))
    return OracleResult(cfg, rows, fit, drift, bath)
