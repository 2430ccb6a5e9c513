"""Batch front-end: ``mincouple <subcommand> [flags] [--config file.json]``.

Every subcommand writes one CSV or JSON table to ``--output`` (stdout when
omitted).  Relative output paths are resolved against ``$MINCOUPLE_OUTPUT_DIR``
when it is set.  Keys in a ``--config`` file override flags of the same name;
unknown keys are rejected.

Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bath_model as bm
from . import discrete_bath_oracle as oracle
from . import energy_balance as eb
from . import field_modes as fm
from . import memory_dynamics as md
from . import transitions as tr
from . import two_level as tl
from .errors import ModelValidationError, NumericalError
from .io import csv_text, json_text

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
OUTPUT_ENV = "MINCOUPLE_OUTPUT_DIR"

GEOMETRIES = {"1d": bm.Geometry.ONE_D, "3d": bm.Geometry.THREE_D,
              "scalar": bm.Geometry.SCALAR_MODE, "vector": bm.Geometry.VECTOR_MODE}

FORMULAS = {
    "step": "chi(t) = beta; |f|^2 = beta hbar c^3 / (4 pi^2 w^3) in 1D, 3 beta hbar c^3 / (8 pi^2 w^3) in 3D",
    "box": "chi(t) = alpha m w0^2 / Delta on (0, Delta), zero after",
    "exponential": "chi(t) = gamma exp(-t / tau)",
    "tabulated": "Filon spline quadrature with power-law end corrections",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return vals[0], vals[1]


def _grid(text: str) -> tuple[float, float, int]:
    vals = _floats(text)
    if len(vals) != 3 or vals[2] != int(vals[2]):
        raise argparse.ArgumentTypeError(f"expected start,stop,count, got {text!r}")
    return vals[0], vals[1], int(vals[2])


def _common(p: argparse.ArgumentParser, fmt_default: str = "csv"):
    p.add_argument("--config", type=Path, help="JSON file whose keys override flags")
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)


def _kernel_flags(p: argparse.ArgumentParser):
    p.add_argument("--family", choices=("step", "box", "exponential", "tabulated"), default="step")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--file", type=Path, help="tabulated t,chi or omega,f2 CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mincouple", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("chi", help="coupling/susceptibility transforms")
    _kernel_flags(p)
    p.add_argument("--geometry", choices=tuple(GEOMETRIES), default="1d")
    p.add_argument("--invert", action="store_true", help="compute |f(w)|^2 from chi")
    p.add_argument("--t", type=_floats, default=None, help="comma-separated times")
    p.add_argument("--omega", type=_floats, default=None, help="comma-separated frequencies")
    p.add_argument("--grid", type=_grid, default=(0.01, 10.0, 100), help="start,stop,count")
    _common(p)

    p = sub.add_parser("evolve", help="mean dynamics with memory")
    _kernel_flags(p)
    p.add_argument("--q0", type=_floats, default=[1.0])
    p.add_argument("--p0", type=_floats, default=[0.0])
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--h", type=float, default=1e-3)
    _common(p)

    p = sub.add_parser("energy", help="energy balance")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--beta", type=_floats, default=[0.1], help="comma-separated beta values")
    p.add_argument("--omega0", type=_floats, default=[1.0], help="comma-separated omega0 values")
    _common(p)

    p = sub.add_parser("rates", help="transition rates")
    p.add_argument("--n", type=_ints, default=[1])
    p.add_argument("--T", type=_floats, default=[0.0])
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--geometry", choices=tuple(GEOMETRIES), default="1d")
    _common(p)

    p = sub.add_parser("decay", help="two-level decay constant and shift")
    p.add_argument("--Omega0", type=float, default=1.0)
    p.add_argument("--x12-sq", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.1, help="Ohmic strength of f")
    p.add_argument("--g-beta", type=float, default=0.0, help="Ohmic strength of g")
    p.add_argument("--window", type=_pair, default=(0.5, 1.5))
    p.add_argument("--eps", type=float, default=None)
    _common(p, "json")

    p = sub.add_parser("field", help="scalar-field modes and Green function")
    p.add_argument("--what", choices=("modes", "green", "poles"), default="modes")
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--s", type=float, default=1.0, help="real Laplace variable for --what green")
    p.add_argument("--xs", type=_floats, default=[0.25, 0.5, 0.75])
    _common(p)

    p = sub.add_parser("oracle", help="exact discrete-bath evolution")
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--window", type=_pair, default=(0.2, 3.0))
    p.add_argument("--cutoffs", type=json.loads, default={"system": None, "bath": 1},
                   help='JSON object, e.g. \'{"system": null, "bath": 1}\'')
    p.add_argument("--t-grid", type=_grid, default=(0.0, 200.0, 2001))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--fit-window", type=_pair, default=(20.0, 200.0))
    p.add_argument("--fit-method", choices=("linear", "log"), default="log")
    _common(p)

    p = sub.add_parser("verify", help="run the acceptance checks and print a table")
    p.add_argument("--only", type=_ints, default=None, help="comma-separated criterion numbers")
    _common(p)
    return parser


_NOT_CONFIGURABLE = {"subcommand", "config", "handler"}


def _apply_config(args: argparse.Namespace) -> None:
    if args.config is None:
        return
    try:
        data = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelValidationError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelValidationError("config must be a JSON object")
    allowed = set(vars(args)) - _NOT_CONFIGURABLE
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ModelValidationError(f"unknown config keys for {args.subcommand}: {unknown}")
    for key, value in data.items():
        setattr(args, key, value)


def _as_list(x) -> list:
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _kernel(a) -> bm.MemoryKernel:
    if a.family == "step":
        return bm.StepKernel(a.beta)
    if a.family == "box":
        return bm.BoxKernel(a.alpha, a.m, a.omega0, a.delta)
    if a.family == "exponential":
        return bm.ExponentialKernel(a.gamma, a.tau)
    if a.file is None:
        raise ModelValidationError("family 'tabulated' needs --file")
    obj = bm.load_tabulated(a.file)
    if not isinstance(obj, bm.MemoryKernel):
        raise ModelValidationError(f"{a.file} holds a coupling table, expected t,chi")
    return obj


def _abscissae(explicit, grid) -> np.ndarray:
    if explicit is not None:
        return np.asarray(_as_list(explicit), dtype=float)
    start, stop, num = grid
    return np.linspace(float(start), float(stop), int(num))


def run_chi(a):
    geom = GEOMETRIES[a.geometry]
    if a.invert:
        w = _abscissae(a.omega, a.grid)
        f2 = np.atleast_1d(bm.coupling_from_susceptibility(_kernel(a), geom, w))
        header, rows = ("omega", "f2"), list(zip(w, f2))
    else:
        t = _abscissae(a.t, a.grid)
        if a.family == "tabulated":
            if a.file is None:
                raise ModelValidationError("family 'tabulated' needs --file")
            f = bm.load_tabulated(a.file)
            if isinstance(f, bm.MemoryKernel):
                f = bm.KernelCoupling(f, geom)
        else:
            f = bm.KernelCoupling(_kernel(a), geom)
        chi = np.atleast_1d(bm.susceptibility_from_coupling(f, geom, t))
        header, rows = ("t", "chi"), list(zip(t, chi))
    meta = {"family": a.family, "geometry": a.geometry, "formula": FORMULAS[a.family]}
    return header, rows, meta


def run_evolve(a):
    q0, p0 = _as_list(a.q0), _as_list(a.p0)
    q0 = q0[0] if len(q0) == 1 else tuple(q0)
    p0 = p0[0] if len(p0) == 1 else tuple(p0)
    system = md.OscillatorSystem(a.m, a.omega0, _kernel(a), q0, p0)
    traj = md.evolve_mean(system, a.t_end, a.h)
    if traj.q.ndim == 1:
        header = ("t", "q", "dq", "E")
        rows = list(zip(traj.t, traj.q, traj.dq, traj.E))
    else:
        header = ("t", "q_x", "q_y", "q_z", "dq_x", "dq_y", "dq_z", "E")
        rows = [(traj.t[i], *traj.q[i], *traj.dq[i], traj.E[i]) for i in range(traj.t.size)]
    return header, rows, traj.metadata


def run_energy(a):
    rows = []
    for w0 in _as_list(a.omega0):
        for beta in _as_list(a.beta):
            rep = eb.energy_report(a.n, a.m, float(beta), float(w0))
            rows.append((float(w0), float(beta), rep.E_system_initial, rep.E_bath_asymptotic,
                         rep.relative_error))
    return eb.SWEEP_HEADER, rows, {"n": a.n, "m": a.m}


def run_rates(a):
    f = bm.ohmic_step(a.beta, GEOMETRIES[a.geometry])
    ns = [int(n) for n in _as_list(a.n)]
    temps = [float(T) for T in _as_list(a.T)]
    rows = tr.rate_sweep(ns, temps, a.m, a.omega0, f)
    return tr.RATE_HEADER, rows, {"beta": a.beta, "m": a.m, "omega0": a.omega0}


def run_decay(a):
    f = bm.ohmic_step(a.beta, bm.Geometry.THREE_D) if a.beta else None
    g = bm.ohmic_step(a.g_beta, bm.Geometry.THREE_D) if a.g_beta else None
    p = tl.TwoLevelParams(a.Omega0, a.x12_sq, f, g)
    rep = tl.decay_report(p, tuple(a.window), a.eps)
    return ("beta", "delta"), [(rep["beta"], rep["delta"])], rep


def run_field(a):
    p = fm.ScalarFieldParams(a.L, a.lam, a.mu, a.n_max)
    meta = {"L": a.L, "lam": a.lam, "mu": a.mu, "n_max": a.n_max, "beta": a.beta}
    if a.what == "modes":
        return fm.MODE_HEADER, fm.mode_table(p, a.beta), meta
    if a.what == "green":
        rows = fm.green_grid(_as_list(a.xs), a.s, p, bm.StepKernel(a.beta))
        meta["s"] = a.s
        return fm.GREEN_HEADER, rows, meta
    rows = []
    for n in range(1, a.n_max + 1):
        lo, hi = fm.green_poles(p, n, a.beta)
        rows.append((n, lo.real, lo.imag, hi.real, hi.imag))
    return ("n", "re_lower", "im_lower", "re_upper", "im_upper"), rows, meta


def run_oracle(a):
    keys = ("N", "window", "cutoffs", "t_grid", "n", "omega0", "m", "beta",
            "fit_window", "fit_method")
    cfg = oracle.OracleConfig.from_dict({k: getattr(a, k) for k in keys})
    res = oracle.run_oracle(cfg, bm.ohmic_step(cfg.beta))
    meta = {"config": json.loads(cfg.to_json()), "fit": res.fit,
            "energy_drift": res.energy_drift}
    return oracle.TRAJECTORY_HEADER, res.rows, meta


def run_verify(a):
    from . import verification

    numbers = _as_list(a.only) if a.only else [n for n, *_ in verification.CRITERIA]
    results = []
    for n in numbers:
        if not 1 <= int(n) <= len(verification.CRITERIA):
            raise ModelValidationError(f"no criterion {n}")
        r = verification.run_criterion(int(n))
        print(r.line(), file=sys.stderr)
        results.append(r)
    rows = [(r.number, r.name, r.passed, r.elapsed, r.detail) for r in results]
    meta = {"all_passed": all(r.passed for r in results)}
    return ("criterion", "name", "passed", "seconds", "detail"), rows, meta


HANDLERS = {"chi": run_chi, "evolve": run_evolve, "energy": run_energy, "rates": run_rates,
            "decay": run_decay, "field": run_field, "oracle": run_oracle, "verify": run_verify}


def _emit(args, header, rows, meta) -> None:
    if args.format == "csv":
        text = csv_text(header, rows)
    else:
        text = json_text({"columns": list(header), "rows": [list(r) for r in rows], "meta": meta})
    if args.output is None:
        sys.stdout.write(text)
        return
    path = Path(args.output)
    base = os.environ.get(OUTPUT_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        print("mincouple: error: a subcommand is required", file=sys.stderr)
        return EXIT_INVALID
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    try:
        _apply_config(args)
        header, rows, meta = HANDLERS[args.subcommand](args)
        _emit(args, header, rows, meta)
    except ModelValidationError as exc:
        print(f"mincouple: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"mincouple: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TypeError, ValueError) as exc:
        # malformed config values reach the constructors as plain type errors
        print(f"mincouple: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.subcommand == "verify" and not meta["all_passed"]:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
