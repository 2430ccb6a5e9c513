"""Mean-value Langevin dynamics with memory.

The mean position obeys::

    m q'' + d/dt int_0^t chi(t - u) q'(u) du - int_0^t chi2(t - u) q(u) du = -m w0**2 q

where ``chi2`` is the optional position kernel of the two-field model.  The
solver integrates the first-integral form in the canonical momentum
``p = m q' + (chi * q')``::

    q' = (p - chi * q') / m,      p' = -m w0**2 q + chi2 * q

so no derivative of ``chi`` is ever taken (the step kernel has none).  Time
stepping is the trapezoidal rule; both convolutions use product integration
of the exact kernel against the piecewise-linear interpolant of the history,
which keeps the scheme second order for discontinuous kernels.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bath_model import ExponentialKernel, MemoryKernel, StepKernel
from .errors import ModelValidationError, NonConvergent, Overdamped, PoleOnAxis, StepTooLarge

__all__ = ["OscillatorSystem", "Trajectory", "evolve_mean", "analytic_underdamped",
           "laplace_solution", "talbot_inverse", "talbot_trajectory", "damping_regime"]

STEP_GUARD = 0.1


@dataclass(frozen=True)
class OscillatorSystem:
    """Damped oscillator in a linear bath.

    ``q0`` may be a scalar or a length-3 vector; the dynamics are isotropic,
    so components evolve independently.  ``p0`` is the initial mean
    momentum ``m q'(0)``.
    """
    m: float
    omega0: float
    kernel: MemoryKernel
    q0: float | tuple = 1.0
    p0: float | tuple = 0.0
    position_kernel: MemoryKernel | None = None

    def __post_init__(self):
        if not self.m > 0:
            raise ModelValidationError("mass must be positive")
        if not self.omega0 >= 0:
            raise ModelValidationError("omega0 must be >= 0")
        q = np.atleast_1d(np.asarray(self.q0, dtype=float))
        p = np.atleast_1d(np.asarray(self.p0, dtype=float))
        if q.shape != p.shape and p.size != 1 and q.size != 1:
            raise ModelValidationError("q0 and p0 must have matching shapes")
        if max(q.size, p.size) not in (1, 3):
            raise ModelValidationError("dimension must be 1 or 3")

    @property
    def dimension(self) -> int:
        return max(np.size(self.q0), np.size(self.p0))

    def initial_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.dimension
        q = np.broadcast_to(np.asarray(self.q0, dtype=float), (d,)).copy()
        p = np.broadcast_to(np.asarray(self.p0, dtype=float), (d,)).copy()
        return q, p

    def rate_scale(self) -> float:
        """Fastest natural rate of the problem, used by the step-size guard."""
        rates = [self.omega0, abs(self.kernel.chi0) / self.m]
        if self.position_kernel is not None:
            k = self.position_kernel
            span = k.support if math.isfinite(k.support) else 1.0 / max(self.omega0, 1e-300)
            strength = abs(float(k.primitives(np.array([span]))[0][0]))
            rates.append(math.sqrt(strength / self.m))
        return max(rates)


def damping_regime(sys: OscillatorSystem) -> str:
    """``underdamped``, ``critical`` or ``overdamped`` for a step kernel, else ``memory``."""
    if not isinstance(sys.kernel, StepKernel) or sys.position_kernel is not None:
        return "memory"
    g = sys.kernel.beta / (2.0 * sys.m)
    if math.isclose(g, sys.omega0, rel_tol=1e-12):
        return "critical"
    return "underdamped" if g < sys.omega0 else "overdamped"


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    E: np.ndarray
    metadata: dict = field(default_factory=dict)

    def to_csv(self, path, fmt: Callable[[float], str] = repr):
        one_d = self.q.ndim == 1
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if one_d:
                w.writerow(["t", "q", "dq", "E"])
                for row in zip(self.t, self.q, self.dq, self.E):
                    w.writerow([fmt(float(x)) for x in row])
            else:
                w.writerow(["t", "q_x", "q_y", "q_z", "dq_x", "dq_y", "dq_z", "E"])
                for i in range(self.t.size):
                    vals = [self.t[i], *self.q[i], *self.dq[i], self.E[i]]
                    w.writerow([fmt(float(x)) for x in vals])

    def metadata_json(self) -> str:
        return json.dumps(self.metadata, indent=2, sort_keys=True, default=str)

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        head, data = rows[0], np.array(rows[1:], dtype=float)
        if head == ["t", "q", "dq", "E"]:
            return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3])
        if len(head) == 8:
            return cls(data[:, 0], data[:, 1:4], data[:, 4:7], data[:, 7])
        raise ModelValidationError(f"{path}: not a trajectory table")


class _Convolution:
    """Product-integration weights for ``int_0^t k(t - u) y(u) du``.

    With ``y`` linear between grid points the value at step ``N`` is
    ``R[0] y_N + sum_{k=1}^{N-1} (L[k] + R[k]) y_{N-k} + L[N] y_0``.
    """

    def __init__(self, kernel: MemoryKernel, h: float, n: int):
        span = n
        if math.isfinite(kernel.support):
            span = min(n, int(math.ceil(kernel.support / h)) + 1)
        m0, m1 = kernel.hat_moments(h, span)
        right = m0 - m1
        left = np.concatenate([[0.0], m1])
        self.r0 = float(right[0])
        self.span = span
        # W[k] = L[k] + R[k] for 1 <= k < span, L[span] closes the support
        inner = left[1:span] + right[1:span]
        self.weights = np.concatenate([[0.0], inner, [left[span]], [0.0]])
        self.left = left

    def history(self, y: np.ndarray, N: int) -> np.ndarray:
        """All terms of the step-``N`` value except ``R[0] y_N``."""
        if N == 0:
            return np.zeros(y.shape[1:])
        if N <= self.span:
            w = self.weights[1:N].copy() if N > 1 else np.empty(0)
            past = y[N - 1:0:-1] if N > 1 else y[:0]
            out = w @ past if w.size else np.zeros(y.shape[1:])
            return out + self.left[N] * y[0]
        # truncated support: only lags 1..span+1 contribute
        w = self.weights[1:self.span + 1]
        past = y[N - 1:N - 1 - self.span:-1]
        return w @ past


def evolve_mean(sys: OscillatorSystem, t_end: float, h: float,
                estimate_error: bool = False) -> Trajectory:
    """Integrate the mean dynamics on the uniform grid ``0, h, ..., t_end``."""
    if not h > 0:
        raise ModelValidationError("step h must be positive")
    if not t_end >= h:
        raise ModelValidationError("t_end must be at least one step")
    rate = sys.rate_scale()
    if h * rate > STEP_GUARD:
        raise StepTooLarge(f"h = {h:g} exceeds {STEP_GUARD:g}/rate with rate {rate:g}")

    n = int(round(t_end / h))
    t = h * np.arange(n + 1)
    q, v = _integrate(sys, h, n)
    if q.ndim > 1:
        energy = 0.5 * sys.m * (np.sum(v ** 2, axis=1) + sys.omega0 ** 2 * np.sum(q ** 2, axis=1))
    else:
        energy = 0.5 * sys.m * (v ** 2 + sys.omega0 ** 2 * q ** 2)

    meta = {
        "solver": "trapezoidal, product-integration convolution",
        "h": h,
        "t_end": float(t[-1]),
        "steps": n,
        "regime": damping_regime(sys),
        "params": {"m": sys.m, "omega0": sys.omega0, "kernel": repr(sys.kernel),
                   "position_kernel": repr(sys.position_kernel),
                   "q0": np.atleast_1d(sys.q0).tolist(), "p0": np.atleast_1d(sys.p0).tolist()},
    }
    if estimate_error and n % 2 == 0 and 2 * h * rate <= STEP_GUARD:
        q2, _ = _integrate(sys, 2 * h, n // 2)
        meta["error_estimate"] = float(np.max(np.abs(q[::2] - q2)) / 3.0)
    return Trajectory(t, q, v, energy, meta)


def _integrate(sys: OscillatorSystem, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    q0, p0 = sys.initial_vectors()
    d = q0.size
    m, w2 = sys.m, sys.omega0 ** 2
    q = np.empty((n + 1, d))
    v = np.empty((n + 1, d))
    q[0] = q0
    v[0] = p0 / m

    kern = sys.kernel
    step = isinstance(kern, StepKernel)
    conv = None if step else _Convolution(kern, h, n)
    pconv = None if sys.position_kernel is None else _Convolution(sys.position_kernel, h, n)

    r0 = 0.5 * kern.beta * h if step else conv.r0
    rt0 = 0.0 if pconv is None else pconv.r0
    a = -m * w2 + rt0
    denom = m + r0 - a * h * h / 4.0

    p = p0.copy()
    force = -m * w2 * q0  # the position convolution vanishes at t = 0
    for N in range(n):
        if step:
            # trapezoidal q makes the step-kernel convolution beta (q - q0) exactly
            hist = kern.beta * (q[N] + 0.5 * h * v[N] - q0)
        else:
            hist = conv.history(v, N + 1)
        htil = 0.0 if pconv is None else pconv.history(q, N + 1)
        P0 = p + 0.5 * h * force
        Q0 = q[N] + 0.5 * h * v[N]
        vn = (P0 + 0.5 * h * (a * Q0 + htil) - hist) / denom
        qn = Q0 + 0.5 * h * vn
        force = a * qn + htil
        p = P0 + 0.5 * h * force
        q[N + 1] = qn
        v[N + 1] = vn
    if np.ndim(sys.q0) == 0 and np.ndim(sys.p0) == 0:
        return q[:, 0], v[:, 0]
    return q, v


def analytic_underdamped(sys: OscillatorSystem, t) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form mean ``(q, p)`` for the step kernel in the underdamped regime.

    ``p`` is the canonical mean ``m q' + beta (q - q0)``, which tends to
    ``-beta q0`` rather than zero.
    """
    if not isinstance(sys.kernel, StepKernel) or sys.position_kernel is not None:
        raise ModelValidationError("closed form needs a pure step kernel")
    beta, m, w0 = sys.kernel.beta, sys.m, sys.omega0
    g = beta / (2.0 * m)
    if g >= w0:
        raise Overdamped(f"beta/2m = {g:g} >= omega0 = {w0:g}")
    w1 = math.sqrt(w0 * w0 - g * g)
    t = np.asarray(t, dtype=float)
    q0 = np.asarray(sys.q0, dtype=float)
    v0 = np.asarray(sys.p0, dtype=float) / m
    tt = t[..., None] if q0.ndim or v0.ndim else t
    decay = np.exp(-g * tt)
    c, s = np.cos(w1 * tt), np.sin(w1 * tt)
    q = decay * (q0 * c + (v0 + g * q0) / w1 * s)
    dq = decay * (v0 * c - (w1 * q0 + g * (v0 + g * q0) / w1) * s)
    return q, m * dq + beta * (q - q0)


def laplace_solution(sys: OscillatorSystem, s, _continued: bool = False):
    """Laplace transform of the mean position, ``q_bar(s)``, for ``Re s > 0``."""
    s = np.asarray(s, dtype=complex)
    if not _continued and np.any(s.real <= 0):
        raise ModelValidationError("Laplace variable needs Re s > 0")
    m, w2 = sys.m, sys.omega0 ** 2
    q0 = np.asarray(sys.q0, dtype=float)
    p0 = np.asarray(sys.p0, dtype=float)
    chib = sys.kernel.laplace(s)
    chit = 0.0 if sys.position_kernel is None else sys.position_kernel.laplace(s)
    den = m * w2 + m * s * s + s * s * chib - chit
    scale = m * (w2 + np.abs(s) ** 2) + np.abs(s * s * chib) + np.abs(chit)
    if np.any(np.abs(den) <= 1e-14 * scale):
        raise PoleOnAxis("denominator vanishes at the requested s")
    if q0.ndim or p0.ndim:
        s_, chib_, den_ = (np.asarray(x)[..., None] for x in (s, chib, den))
        return ((m * s_ + s_ * chib_) * q0 + p0) / den_
    return ((m * s + s * chib) * q0 + p0) / den


def talbot_inverse(F: Callable, t, M: int = 32):
    """Fixed-Talbot numerical inverse Laplace transform of ``F`` at ``t > 0``.

    ``F`` must accept complex arrays and be analytic left of the imaginary
    axis along the Talbot contour, so tabulated kernels are not supported.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ModelValidationError("Talbot inversion needs t > 0")
    k = np.arange(1, M)
    theta = k * math.pi / M
    cot = 1.0 / np.tan(theta)
    sigma = theta + (theta * cot - 1.0) * cot
    out = np.empty(t.shape)
    for i, ti in enumerate(t):
        r = 2.0 * M / (5.0 * ti)
        nodes = r * theta * (cot + 1j)
        vals = np.asarray(F(np.concatenate([[r + 0j], nodes])))
        head = 0.5 * np.real(vals[0]) * math.exp(r * ti)
        body = np.sum(np.real(np.exp(ti * nodes) * vals[1:] * (1.0 + 1j * sigma)))
        out[i] = r / M * (head + body)
    return out


def _talbot_ok(kernel: MemoryKernel | None) -> bool:
    # box transforms carry exp(-s delta), which blows up on the left of the contour
    return kernel is None or isinstance(kernel, (StepKernel, ExponentialKernel))


TALBOT_MAX_NODES = 55  # eps * exp(2 M / 5) stays below 1e-6


def talbot_trajectory(sys: OscillatorSystem, t, M: int | None = None) -> np.ndarray:
    """Mean position by inverting :func:`laplace_solution` (1-D systems).

    Only step and exponential kernels are supported.  The contour has to
    pass above the oscillator poles near ``+-i w0``, which takes about
    ``2 w0 t`` nodes; the cancellation error grows like ``exp(2 M / 5)``, so
    times with ``w0 t`` beyond roughly 27 raise :class:`NonConvergent`.
    """
    if not (_talbot_ok(sys.kernel) and _talbot_ok(sys.position_kernel)):
        raise ModelValidationError("Talbot inversion needs step or exponential kernels")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    F = lambda s: laplace_solution(sys, s, _continued=True)  # noqa: E731
    out = np.empty(t.shape)
    for i, ti in enumerate(t):
        need = max(32, math.ceil(2.0 * sys.rate_scale() * ti)) if M is None else M
        if need > TALBOT_MAX_NODES:
            raise NonConvergent(f"Talbot inversion at t = {ti:g} needs {need} nodes; "
                                f"double precision allows {TALBOT_MAX_NODES}")
        out[i] = talbot_inverse(F, [ti], need)[0]
    return out
