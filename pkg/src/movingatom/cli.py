"""Command-line sweeps over the kernels.

Every subcommand evaluates one kernel on a 1-D grid of a dimensionless
variable and writes CSV (default) or JSON.  Grid points are computed in a
thread pool and written in grid order, so output is byte-identical for any
``--threads``.

Exit status: 0 ok, 1 acceptance failure, 2 invalid input, 3 numerical
failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import quad
from .errors import DomainError, QuadratureError, RangeError
from .free_space import m_p_first_order, sigma_ren
from .friction import FrictionQuery, friction_rate
from .params import DimensionlessSet, from_dimensionless
from .plate import m_parallel_far_limit, plate_kernel_point

SUBCOMMANDS = ("mp-scan", "sigma-scan", "friction-scan", "plate-scan", "far-limit", "acceptance")

# default grid per subcommand: (min, max, points)
_DEFAULT_GRID = {
    "mp-scan": (0.0, 5.0, 201),
    "sigma-scan": (0.01, 5.0, 200),
    "friction-scan": (0.5, 5.0, 10),
    "plate-scan": (0.5, 4.0, 351),
    "far-limit": (1.5, 5.0, 36),
}


@dataclass(frozen=True)
class SweepConfig:
    subcommand: str
    grid_min: float
    grid_max: float
    points: int
    log: bool = False
    params: dict = field(default_factory=dict)
    tol: float = quad.DEFAULT_TOL
    output: str = "-"
    format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise DomainError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand == "acceptance":
            return
        if self.points < 2:
            raise DomainError("--points must be at least 2")
        if not self.grid_min < self.grid_max:
            raise DomainError("grid needs min < max")
        if self.log and not self.grid_min > 0:
            raise DomainError("a log grid needs min > 0")
        if self.format not in ("csv", "json"):
            raise DomainError("format must be csv or json")
        if self.threads < 1:
            raise DomainError("--threads must be >= 1")
        if not self.tol > 0:
            raise DomainError("--tol must be positive")

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.grid_min, self.grid_max, self.points)
        return np.linspace(self.grid_min, self.grid_max, self.points)


def _physical(cfg: SweepConfig, nu_tilde=0.0, a_tilde=None):
    p = cfg.params
    ds = DimensionlessSet(nu_tilde=nu_tilde,
                          a_tilde=p.get("a", 1.0) if a_tilde is None else a_tilde,
                          omega_m_tilde=p.get("omega_m", 1.0), xi_tilde=p.get("xi", 0.0))
    return from_dimensionless(ds, p.get("omega_p", 1.0), p.get("g", 1.0), p.get("gamma", 1.0))


def _mp_row(cfg, x):
    atom, _, _, nu = _physical(cfg, x)
    return (x, m_p_first_order(atom, nu))


def _sigma_row(cfg, x):
    s = sigma_ren(x, cfg.tol)
    return (x, s.sigma1, s.sigma2, s.sigma3, s.total, s.abs_error_estimate)


def _friction_row(cfg, x):
    atom, mirror, a, _ = _physical(cfg, a_tilde=x)
    r = friction_rate(FrictionQuery(atom, mirror, a, cfg.params.get("u", 0.5)), cfg.tol)
    return (x, r.value, r.abs_error_estimate)


def _plate_row(cfg, x):
    atom, mirror, a, nu = _physical(cfg, x)
    k = plate_kernel_point(atom, mirror, a, nu, cfg.tol)
    return (x, k.m_parallel, k.m_perp, k.resonance_term_parallel, k.threshold_term_parallel,
            k.resonance_term_perp, k.threshold_term_perp)


def _far_row(cfg, x):
    atom, mirror, a, nu = _physical(cfg, x)
    k = plate_kernel_point(atom, mirror, a, nu, cfg.tol)
    lim = m_parallel_far_limit(atom, mirror, nu)
    rel = abs(k.m_parallel - lim) / max(abs(lim), 1e-300)
    return (x, k.m_parallel, lim, rel)


_SWEEPS = {
    "mp-scan": (("nu_over_omega", "m_p"), _mp_row),
    "sigma-scan": (("nu_over_omega", "sigma1", "sigma2", "sigma3", "total", "err"), _sigma_row),
    "friction-scan": (("a_tilde", "rate", "err"), _friction_row),
    "plate-scan": (("nu_tilde", "m_parallel", "m_perp", "resonance_parallel",
                    "threshold_parallel", "resonance_perp", "threshold_perp"), _plate_row),
    "far-limit": (("nu_tilde", "m_parallel", "far_limit", "rel_diff"), _far_row),
}


def sweep(cfg: SweepConfig):
    """Evaluate the configured sweep; returns ``(columns, rows)`` in grid order."""
    columns, row = _SWEEPS[cfg.subcommand]
    grid = [float(x) for x in cfg.grid()]
    if cfg.threads == 1:
        rows = [row(cfg, x) for x in grid]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(lambda x: row(cfg, x), grid))
    return columns, rows


def _fmt(v) -> str:
    return format(float(v), ".12g")


def render(cfg: SweepConfig, columns, rows) -> str:
    if cfg.format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    doc = {
        "subcommand": cfg.subcommand,
        "parameters": dict(sorted(cfg.params.items())),
        "columns": list(columns),
        "rows": [[float(_fmt(v)) for v in r] for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
        return
    # binary mode: LF line endings on every platform
    with open(output, "wb") as fh:
        fh.write(text.encode("ascii"))


def _check_output(output: str):
    if output == "-":
        return
    parent = os.path.dirname(os.path.abspath(output))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"output directory does not exist: {parent}")


def run(cfg: SweepConfig) -> int:
    _check_output(cfg.output)
    if cfg.subcommand == "acceptance":
        from .acceptance import run_acceptance
        return run_acceptance(cfg.output, fmt=cfg.format)
    columns, rows = sweep(cfg)
    _emit(render(cfg, columns, rows), cfg.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movingatom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--output", "-o", default="-", help="output file ('-' for stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "acceptance":
            continue
        sp.add_argument("--min", "--nu-min", dest="grid_min", type=float, default=None,
                        help="grid start (nu/Omega_p, or a*Omega_p for friction-scan)")
        sp.add_argument("--max", "--nu-max", dest="grid_max", type=float, default=None)
        sp.add_argument("--points", type=int, default=None)
        sp.add_argument("--log", action="store_true", help="logarithmic grid")
        sp.add_argument("--omega-m", type=float, default=2.0 if name != "friction-scan" else 1.0,
                        help="Omega_m / Omega_p")
        sp.add_argument("--xi", type=float, default=0.01, help="xi / Omega_p^2")
        sp.add_argument("--a", type=float, default=50.0 if name == "far-limit" else 1.0,
                        help="a * Omega_p")
        sp.add_argument("--u", type=float, default=0.5, help="speed (friction-scan)")
        sp.add_argument("--g", type=float, default=1.0)
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--omega-p", type=float, default=1.0)
        sp.add_argument("--tol", type=float, default=quad.DEFAULT_TOL)
        sp.add_argument("--threads", type=int, default=1)
    return parser


def config_from_args(args) -> SweepConfig:
    if args.subcommand == "acceptance":
        return SweepConfig("acceptance", 0.0, 1.0, 2, output=args.output, format=args.format)
    lo, hi, n = _DEFAULT_GRID[args.subcommand]
    params = {"omega_m": args.omega_m, "xi": args.xi, "a": args.a, "u": args.u,
              "g": args.g, "gamma": args.gamma, "omega_p": args.omega_p}
    return SweepConfig(
        args.subcommand,
        lo if args.grid_min is None else args.grid_min,
        hi if args.grid_max is None else args.grid_max,
        n if args.points is None else args.points,
        log=args.log, params=params, tol=args.tol, output=args.output,
        format=args.format, threads=args.threads)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, RangeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
