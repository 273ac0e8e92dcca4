"""Quantum friction on an atom moving parallel to the plate at constant speed.

The rate (Im Gamma per unit time) reduces to the single integral

    rate = gamma^2 g^2 a / (32 pi Omega_m Omega_p)
           * int_0^inf dx exp(-(2/u) sqrt(x^2 + c^2)) / (x^2 + c^2),
    c^2 = a^2 ((Omega_m + Omega_p)^2 - u^2 Omega_m^2),

already in the lossless limit.  The factor exp(-2c/u) is pulled out before
quadrature so the integrand stays O(1) even when the rate itself is tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quad
from .errors import DomainError, RangeError
from .params import AtomParams, MirrorParams
from .quad import QuadResult


@dataclass(frozen=True)
class FrictionQuery:
    atom: AtomParams
    mirror: MirrorParams
    a: float
    u: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"distance a must be positive, got {self.a!r}")
        if not (math.isfinite(self.u) and 0 < abs(self.u) < 1):
            raise DomainError(f"speed must satisfy 0 < |u| < 1, got {self.u!r}")


def _c_squared(q: FrictionQuery, speed: float) -> float:
    om, op = q.mirror.omega_m, q.atom.omega_p
    return q.a * q.a * ((om + op) ** 2 - speed * speed * om * om)


def _prefactor(q: FrictionQuery) -> float:
    return (q.mirror.gamma ** 2 * q.atom.g ** 2 * q.a
            / (32.0 * math.pi * q.mirror.omega_m * q.atom.omega_p))


def friction_integrand(x, c, speed):
    """Integrand without the exp(-2c/u) factor; positive for all x."""
    x = np.asarray(x, dtype=float)
    s2 = x * x + c * c
    excess = x * x / (np.sqrt(s2) + c)  # sqrt(x^2 + c^2) - c without cancellation
    return np.exp(-2.0 * excess / speed) / s2


def log_friction_rate(q: FrictionQuery, tol: float = quad.DEFAULT_TOL) -> tuple[float, QuadResult]:
    """``(ln rate, reduced integral)``; finite even where the rate underflows."""
    speed = abs(q.u)
    c = math.sqrt(_c_squared(q, speed))
    # width of the Gaussian-like peak at x = 0 is ~ sqrt(c u)
    width = max(math.sqrt(c * speed), 1e-3 * c)
    res = quad.integrate_semi_infinite(lambda x: friction_integrand(x, c, speed), 0.0, tol,
                                       abs_tol=0.0, scale=width)
    pref = _prefactor(q)
    if pref == 0:
        return -math.inf, res
    return math.log(pref) - 2.0 * c / speed + math.log(res.value), res


def friction_rate(q: FrictionQuery, tol: float = quad.DEFAULT_TOL) -> QuadResult:
    """Friction rate Im Gamma / T (dimension of mass); depends on u only through |u|."""
    log_rate, res = log_friction_rate(q, tol)
    factor = math.exp(log_rate) / res.value if math.isfinite(log_rate) else 0.0
    return QuadResult(res.value * factor, res.abs_error_estimate * factor,
                      res.evaluations, res.subdivisions)


def friction_large_a_log_slope(q: FrictionQuery, a_lo: float, a_hi: float,
                               tol: float = quad.DEFAULT_TOL) -> float:
    """Finite-difference slope of ln(rate) between distances ``a_lo`` and ``a_hi``."""
    if not 0 < a_lo < a_hi:
        raise DomainError("need 0 < a_lo < a_hi")
    logs = []
    for a in (a_lo, a_hi):
        r = friction_rate(FrictionQuery(q.atom, q.mirror, a, q.u), tol).value
        if not r > np.finfo(float).tiny:
            raise RangeError(
                f"friction rate underflows double precision at a = {a:g}; use smaller distances")
        logs.append(math.log(r))
    return (logs[1] - logs[0]) / (a_hi - a_lo)


def friction_slope_limit(q: FrictionQuery) -> float:
    """Leading large-a slope of ln(rate): -(2/u) sqrt((Omega_m + Omega_p)^2 - u^2 Omega_m^2)."""
    return -2.0 / abs(q.u) * math.sqrt(_c_squared(q, abs(q.u))) / q.a
