"""Brute-force cross-checks used by the tests and the acceptance run.

Nothing here touches :mod:`movingatom.quad`.  The Sigma oracle uses a
fixed-grid midpoint Romberg table on the literal (unsimplified) integrands,
the friction oracle a double-exponential trapezoid rule in the momentum
variable before the final rescaling, and the plate oracle evaluates the
momentum integrals of the unreduced kernel with QUADPACK (scipy).

These evaluators are slow by design and are not exported from the package
namespace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate

from .errors import DomainError, QuadratureError
from .friction import FrictionQuery
from .params import AtomParams, MirrorParams

_FLOOR = 1e-300


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    main_value: float
    oracle_value: float
    rel_diff: float
    method: str

    @classmethod
    def compare(cls, quantity, main_value, oracle_value, method):
        rel = abs(main_value - oracle_value) / max(abs(oracle_value), _FLOOR)
        return cls(quantity, float(main_value), float(oracle_value), rel, method)


# -- Sigma ---------------------------------------------------------------------


def _romberg_midpoint(f, lo, hi, n, levels=4):
    """Midpoint sums on n, 2n, 4n, ... panels with Richardson extrapolation in h^2."""
    table = []
    for k in range(levels):
        m = n * 2 ** k
        h = (hi - lo) / m
        x = lo + h * (np.arange(m) + 0.5)
        row = [h * math.fsum(f(x))]
        for j, prev in enumerate(table[-1] if table else []):
            fac = 4.0 ** (j + 1)
            row.append(row[j] + (row[j] - prev) / (fac - 1))
        table.append(row)
    return table[-1][-1]


def _sigma_terms(q, x):
    """Literal sum of the three renormalized integrands (units Omega = 1)."""
    s1 = np.where(q < x, q * (x - q) ** 3 / (q ** 2 - 1) ** 2, 0.0)
    if x <= 1:
        return s1
    s2 = 1.5 * (x - 1) ** 2 * (q ** 2 / (q ** 2 - 1) - 1)
    s3 = 0.5 * (x - 1) ** 3 * (q ** 2 * (q ** 2 - 3) / (q ** 2 - 1) ** 2 - 1)
    return s1 + s2 + s3


def oracle_sigma(nu_over_omega: float, grid_n: int = 20000) -> float:
    """Sigma^(ren) / Omega by fixed-grid Romberg, pairing nodes symmetrically about q = 1."""
    x = float(nu_over_omega)
    if grid_n < 10_000:
        raise DomainError("grid_n must be at least 1e4")
    if x < 0:
        raise DomainError("nu_over_omega must be non-negative")
    if x == 0:
        return 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        if x <= 1:
            return _romberg_midpoint(lambda q: _sigma_terms(q, x), 0.0, x, grid_n)
        d = min(1.0, x - 1)
        parts = [_romberg_midpoint(
            lambda s: _sigma_terms(1 + s, x) + _sigma_terms(1 - s, x), 0.0, d, grid_n)]
        if d < 1:
            parts.append(_romberg_midpoint(lambda q: _sigma_terms(q, x), 0.0, 1 - d, grid_n))
        if 1 + d < x:
            parts.append(_romberg_midpoint(lambda q: _sigma_terms(q, x), 1 + d, x, grid_n))
        # tail q = x / t
        parts.append(_romberg_midpoint(lambda t: _sigma_terms(x / t, x) * x / t ** 2,
                                       0.0, 1.0, grid_n))
    return math.fsum(parts)


# -- A and B coefficients ------------------------------------------------------


def _alpha_beta_literal(u, xi):
    r = np.sqrt(u * u + xi * xi)
    return np.sqrt(np.maximum(r - u, 0.0) / 2), np.sqrt((r + u) / 2)


def oracle_coeff_A(kind: str, xi: float, omega_m: float, a: float, grid_n: int = 20000) -> float:
    """A coefficient by fixed-grid Romberg in s with u = -s^2 (u < 0) and u = s^2 (u > 0).

    alpha and beta are taken from the literal square-root formulas.  The
    positive side is cut where exp(-2 s a) < 1e-17.
    """
    if kind not in ("par", "perp"):
        raise DomainError("kind must be 'par' or 'perp'")
    if grid_n < 10_000:
        raise DomainError("grid_n must be at least 1e4")

    def f(u):
        al, be = _alpha_beta_literal(u, xi)
        damp = np.exp(-2 * be * a)
        if kind == "perp":
            return damp * np.cos(2 * al * a)
        return u / (u * u + xi * xi) * damp * (u * np.cos(2 * al * a) + xi * np.sin(2 * al * a))

    s_max = 20.0 / a
    neg = _romberg_midpoint(lambda s: f(-s * s) * 2 * s, 0.0, omega_m, grid_n)
    pos = _romberg_midpoint(lambda s: f(s * s) * 2 * s, 0.0, s_max, grid_n)
    return neg + pos


def oracle_coeff_B(kind: str, x: float, grid_n: int = 10000) -> float:
    """B coefficients from their defining integrals over [0, 1] by midpoint Romberg."""
    if kind == "perp":
        return _romberg_midpoint(lambda u: u * np.sin(2 * x * u), 0.0, 1.0, grid_n)
    if kind == "par":
        return _romberg_midpoint(lambda u: (1 - u * u) / u * np.sin(2 * x * u), 0.0, 1.0, grid_n)
    raise DomainError("kind must be 'par' or 'perp'")


# -- friction ------------------------------------------------------------------


def _de_trapezoid(f, scale, rtol=1e-14, max_level=12):
    """int_R f(y) dy with y = scale * sinh(t); trapezoid in t, step halved to convergence."""
    tmax = 8.0

    def fg(t):
        return f(scale * np.sinh(t)) * scale * np.cosh(t)

    h = 0.5
    t = np.arange(-tmax, tmax + h / 2, h)
    s = h * math.fsum(fg(t))
    for _ in range(max_level):
        h /= 2
        mid = np.arange(-tmax + h, tmax, 2 * h)
        s_new = 0.5 * s + h * math.fsum(fg(mid))
        if abs(s_new - s) <= rtol * abs(s_new):
            return s_new
        s = s_new
    return s


def oracle_friction_2d(q: FrictionQuery) -> float:
    """Friction rate from the parallel-momentum integral before the last change of variables.

    The delta(|p1 u| - (Omega_m + Omega_p)) is resolved as the two roots
    p1 = +-(Omega_m + Omega_p)/|u|; the remaining p2 integral over the real
    line is done by a double-exponential trapezoid rule.
    """
    om, op = q.mirror.omega_m, q.atom.omega_p
    u = abs(q.u)
    p1_sq = ((om + op) / u) ** 2

    def integrand(p2):
        s = p1_sq + p2 * p2 - om * om
        return np.exp(-2 * q.a * np.sqrt(s)) / s

    c0 = math.sqrt(p1_sq - om * om)
    width = math.sqrt(c0 / q.a)
    with np.errstate(under="ignore"):
        val = _de_trapezoid(integrand, width)
    pref = math.pi * q.mirror.gamma ** 2 * q.atom.g ** 2 / (32 * op * om)
    # d^2p/(2 pi)^2 and two roots, each with Jacobian 1/|u|
    return pref / (4 * math.pi ** 2) * (2.0 / u) * val


# -- plate -----------------------------------------------------------------------


def _quad(f, lo, hi, **kw):
    kw.setdefault("limit", 400)
    with warnings.catch_warnings():
        # QAWF complains about cycles once the tail is far below epsabs
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        val, _err = sp_integrate.quad(f, lo, hi, **kw)
    if not math.isfinite(val):
        raise QuadratureError("oracle quadrature returned a non-finite value")
    return val


def _cos_transform(f, a, peak=None, width=None, scale=1.0):
    """int_0^inf f(p) cos(p a) dp, broken up around a narrow peak."""
    edges = [0.0]
    if peak is not None and peak > 0:
        for e in (peak - 40 * width, peak - width, peak, peak + width, peak + 40 * width):
            if e > edges[-1]:
                edges.append(e)
    cut = max(edges[-1] * 2, edges[-1] + 10.0 / a, 1.0)
    edges.append(cut)
    tot = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        tot += _quad(f, lo, hi, weight="cos", wvar=a, epsabs=1e-14 * scale, epsrel=1e-10)
    tot += _quad(f, cut, np.inf, weight="cos", wvar=a, epsabs=1e-14 * scale)
    return tot


def _lorentz_p(x, xi):
    return x / (x * x + xi * xi)


def _lorentz_d(x, xi):
    return xi / (math.pi * (x * x + xi * xi))


def _resonance_momentum_integral(omega_m, xi, a):
    """int d^2p/(2pi)^2 |p|^2 [(int dp3/2pi P e^{-ip3 a})^2 - pi^2 (int dp3/2pi delta e^{-ip3 a})^2]."""

    def inner(pp):
        s = pp * pp - omega_m * omega_m
        peak = math.sqrt(-s) if s < 0 else None
        width = xi / (2 * peak) if peak else None
        if peak is not None and width > peak:
            peak = width = None
        ip = _cos_transform(lambda p3: _lorentz_p(p3 * p3 + s, xi), a, peak, width) / math.pi
        idl = _cos_transform(lambda p3: _lorentz_d(p3 * p3 + s, xi), a, peak, width) / math.pi
        return ip * ip - math.pi ** 2 * idl * idl

    w = xi / (2 * omega_m)
    pts = sorted(p for p in (omega_m - 20 * w, omega_m - w, omega_m, omega_m + w,
                             omega_m + 20 * w, 1.0 / a) if p > 0)
    top = omega_m + 60.0 / a
    val = _quad(lambda pp: pp ** 3 * inner(pp), 0.0, top, points=pts, epsabs=1e-10, epsrel=1e-6)
    return val / (2 * math.pi)


def _threshold_momentum_integral(k, a):
    """int d^2p/(2pi)^2 |p|^2 int dp3/2pi int dq3/2pi delta(p - k)/(q^2 - k^2) e^{-i(p3+q3)a}.

    The delta fixes p3 = +-kappa, kappa^2 = k^2 - p_par^2 (so p_par < k);
    the q3 integral is a principal value at q3 = kappa.  p_par = k sin(theta)
    removes the 1/kappa endpoint singularity.
    """

    def pv_q(kappa):
        # (1/pi) PV int_0^inf cos(q a) / (q^2 - kappa^2) dq
        near = _quad(lambda q: np.cos(q * a) / (q + kappa), 0.0, 2 * kappa,
                     weight="cauchy", wvar=kappa, epsabs=1e-13, epsrel=1e-11)
        far = _quad(lambda q: 1.0 / (q * q - kappa * kappa), 2 * kappa, np.inf,
                    weight="cos", wvar=a, epsabs=1e-13)
        return (near + far) / math.pi

    def outer(theta):
        pp = k * math.sin(theta)
        kappa = k * math.cos(theta)
        if kappa <= 1e-12 * k:
            kappa = 1e-12 * k
        p3_part = math.cos(kappa * a) / math.pi  # (1/2pi) * 2 cos(kappa a), times k/kappa below
        return pp ** 3 * k * p3_part * pv_q(kappa)  # (k/kappa) dp_par = k dtheta

    val = _quad(outer, 0.0, 0.5 * math.pi, epsabs=1e-13 * k ** 4, epsrel=1e-9, limit=200)
    return val / (2 * math.pi)


def oracle_plate_terms(atom: AtomParams, mirror: MirrorParams, a: float, nu: float):
    """(resonance, threshold) parts of m_par from the unreduced momentum integrals."""
    if not mirror.xi > 0:
        raise DomainError("the plate oracle needs xi > 0")
    if not a > 0:
        raise DomainError("a must be positive")
    m = mirror.omega_m + atom.omega_p
    if abs(abs(nu) - m) < 2 * mirror.xi / (2 * m):
        raise DomainError("oracle is limited to |nu| at least two widths from resonance")
    base = 0.5 * math.pi * mirror.gamma ** 2 * atom.g ** 2 / (2 * atom.omega_p)
    res = base * m / mirror.omega_m * _lorentz_d(nu * nu - m * m, mirror.xi) \
        * _resonance_momentum_integral(mirror.omega_m, mirror.xi, a)
    k = abs(nu) - atom.omega_p
    thr = 0.0
    if k > 0:
        thr = -base / k * _lorentz_p(k * k - mirror.omega_m ** 2, mirror.xi) \
            * _threshold_momentum_integral(k, a)
    return res, thr


def oracle_plate_point(atom: AtomParams, mirror: MirrorParams, a: float, nu: float) -> float:
    """m_par at one point from the unreduced kernel."""
    res, thr = oracle_plate_terms(atom, mirror, a, nu)
    return res + thr
