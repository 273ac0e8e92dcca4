"""Emission kernels for small oscillations near the lossy plate.

Each kernel is a resonance term (a Lorentzian delta_xi in nu^2 - (Omega_m +
Omega_p)^2 weighted by an A coefficient) plus a threshold term (a Lorentzian
principal value weighted by a B coefficient) that switches on at |nu| =
Omega_p.  A_par and A_perp are one-dimensional integrals over the plate
"mass" variable u; B_par and B_perp have closed forms in terms of Si.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import quad
from .errors import DomainError, RegularizationError
from .params import AtomParams, MirrorParams
from .quad import QuadResult
from .special import sine_integral

# below this the closed form for B_perp loses digits to cancellation
_B_SERIES_CUT = 0.5


def alpha_beta(u, xi):
    """alpha = sqrt((r - u)/2), beta = sqrt((r + u)/2) with r = sqrt(u^2 + xi^2).

    The smaller of the two is taken from alpha * beta = xi / 2 to avoid the
    cancellation in r - |u|.
    """
    if xi < 0:
        raise DomainError("xi must be non-negative")
    u = np.asarray(u, dtype=float)
    r = np.hypot(u, xi)
    big = np.sqrt(0.5 * (r + np.abs(u)))
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big > 0, 0.5 * xi / big, 0.0)
    alpha = np.where(u >= 0, small, big)
    beta = np.where(u >= 0, big, small)
    if alpha.ndim == 0:
        return float(alpha), float(beta)
    return alpha, beta


def _a_integrand_perp(xi, a):
    def f(u):
        al, be = alpha_beta(u, xi)
        return np.exp(-2 * be * a) * np.cos(2 * al * a)
    return f


def _a_integrand_par(xi, a):
    def f(u):
        u = np.asarray(u, dtype=float)
        al, be = alpha_beta(u, xi)
        d = u * u + xi * xi
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(d > 0, u / np.where(d > 0, d, 1.0), 0.0)
        return w * np.exp(-2 * be * a) * (u * np.cos(2 * al * a) + xi * np.sin(2 * al * a))
    return f


def _check_a_args(xi, omega_m, a):
    if not (math.isfinite(a) and a > 0):
        raise DomainError("a must be positive")
    if not (math.isfinite(omega_m) and omega_m > 0):
        raise DomainError("omega_m must be positive")
    if not (math.isfinite(xi) and xi >= 0):
        raise DomainError("xi must be non-negative")


def _a_coefficient(integrand, xi, omega_m, a, tol):
    lo = -omega_m * omega_m
    # breaks where alpha, beta switch behaviour (|u| ~ xi) and at the
    # oscillation scale of cos(2 sqrt(|u|) a) on the negative side
    pts = sorted({p for p in (-xi, -10 * xi, -100 * xi, -1.0 / (a * a)) if lo < p < 0})
    scale = 1.0 / (a * a)
    neg = quad.integrate(integrand, lo, 0.0, tol, abs_tol=tol * scale, points=pts)
    pos = quad.integrate_semi_infinite(integrand, 0.0, tol, abs_tol=tol * scale,
                                       scale=max(scale, xi), points=[xi] if xi > 0 else [])
    return quad.total([neg, pos])


@functools.lru_cache(maxsize=256)
def _a_par_cached(xi, omega_m, a, tol):
    return _a_coefficient(_a_integrand_par(xi, a), xi, omega_m, a, tol)


@functools.lru_cache(maxsize=256)
def _a_perp_cached(xi, omega_m, a, tol):
    return _a_coefficient(_a_integrand_perp(xi, a), xi, omega_m, a, tol)


def coeff_A_parallel(xi: float, omega_m: float, a: float, tol: float = quad.DEFAULT_TOL) -> QuadResult:
    """A_par = int_{-Omega_m^2}^inf du u/(u^2+xi^2) e^{-2 beta a} [u cos 2 alpha a + xi sin 2 alpha a]."""
    _check_a_args(xi, omega_m, a)
    return _a_par_cached(float(xi), float(omega_m), float(a), float(tol))


def coeff_A_perp(xi: float, omega_m: float, a: float, tol: float = quad.DEFAULT_TOL) -> QuadResult:
    """A_perp = int_{-Omega_m^2}^inf du e^{-2 beta a} cos 2 alpha a."""
    _check_a_args(xi, omega_m, a)
    return _a_perp_cached(float(xi), float(omega_m), float(a), float(tol))


def coeff_A_zero_loss(omega_m: float, a: float) -> float:
    """Common xi -> 0 limit of both A integrals.

    For u < 0 the lossless plate has alpha = sqrt(|u|), beta = 0, so the
    negative-u part oscillates instead of decaying:
    (Omega_m / a) sin(2 a Omega_m) + cos(2 a Omega_m) / (2 a^2).
    """
    _check_a_args(0.0, omega_m, a)
    x = 2 * a * omega_m
    return omega_m / a * math.sin(x) + math.cos(x) / (2 * a * a)


def _b_perp_scalar(x):
    if x < _B_SERIES_CUT:
        # sum_k (-1)^k (2x)^(2k+1) / ((2k+1)! (2k+3)) = (2/3) x - (4/15) x^3 + ...
        z2 = 4 * x * x
        term = 2 * x  # (2x)^(2k+1) / (2k+1)!
        s = term / 3
        k = 0
        while abs(term) > 1e-17 * abs(s):
            k += 1
            term *= -z2 / ((2 * k) * (2 * k + 1))
            s += term / (2 * k + 3)
        return s
    return (-2 * x * math.cos(2 * x) + math.sin(2 * x)) / (4 * x * x)


def coeff_B_perp(x):
    """B_perp(x) = int_0^1 du u sin(2 x u) = (-2x cos 2x + sin 2x) / (4 x^2)."""
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            raise DomainError("B coefficients are defined for x >= 0")
        return _b_perp_scalar(x)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("B coefficients are defined for x >= 0")
    return np.vectorize(_b_perp_scalar, otypes=[float])(arr)


def _b_par_scalar(x):
    # evaluated on its own (not via coeff_B_perp) so the Si identity is a real check
    if x < _B_SERIES_CUT:
        # sum_k (-1)^k (2x)^(2k+1) / (2k+1)! * [1/(2k+1) - 1/(2k+3)]
        z2 = 4 * x * x
        term = 2 * x
        s = term * (1.0 - 1.0 / 3.0)
        k = 0
        while abs(term) > 1e-17 * abs(s):
            k += 1
            term *= -z2 / ((2 * k) * (2 * k + 1))
            s += term * (1.0 / (2 * k + 1) - 1.0 / (2 * k + 3))
        return s
    return sine_integral(2 * x) + (2 * x * math.cos(2 * x) - math.sin(2 * x)) / (4 * x * x)


def coeff_B_parallel(x):
    """B_par(x) = int_0^1 du (1 - u^2)/u sin(2 x u) = Si(2x) - B_perp(x)."""
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            raise DomainError("B coefficients are defined for x >= 0")
        return _b_par_scalar(x)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("B coefficients are defined for x >= 0")
    return np.vectorize(_b_par_scalar, otypes=[float])(arr)


# -- kernels -------------------------------------------------------------------


@dataclass(frozen=True)
class KernelTerms:
    resonance: float
    threshold: float

    @property
    def total(self) -> float:
        return self.resonance + self.threshold


@dataclass(frozen=True)
class PlateKernelPoint:
    nu: float
    m_parallel: float
    m_perp: float
    resonance_term_parallel: float
    threshold_term_parallel: float
    resonance_term_perp: float
    threshold_term_perp: float


def _check_geometry(a, nu):
    if not (math.isfinite(a) and a > 0):
        raise DomainError("a must be positive")
    if not math.isfinite(nu):
        raise DomainError("nu must be finite")


def _resonance_factor(atom, mirror, nu):
    """delta_xi(nu^2 - M^2); xi = 0 means an exact delta (zero off resonance)."""
    m = mirror.omega_m + atom.omega_p
    x = nu * nu - m * m
    if mirror.xi == 0:
        if x == 0:
            raise RegularizationError(
                f"lossless plate at the resonance |nu| = {m}: set xi > 0")
        return 0.0
    return quad.delta_xi(x, mirror.xi)


def _threshold_factor(atom, mirror, nu):
    """(k^2) P_xi(k^2 - Omega_m^2) with k = |nu| - Omega_p, or 0 below threshold."""
    k = abs(nu) - atom.omega_p
    if not k > 0:
        return 0.0, 0.0
    x = k * k - mirror.omega_m ** 2
    if mirror.xi == 0 and x == 0:
        raise RegularizationError(
            "lossless plate where (|nu| - Omega_p)^2 = Omega_m^2: set xi > 0")
    return k, k * k * quad.p_xi(x, mirror.xi)


def m_parallel(atom: AtomParams, mirror: MirrorParams, a: float, nu: float,
               tol: float = quad.DEFAULT_TOL) -> KernelTerms:
    """Kernel for oscillation parallel to the plate (note the extra overall 1/2)."""
    _check_geometry(a, nu)
    base = 0.5 * math.pi * mirror.gamma ** 2 * atom.g ** 2 / (2 * atom.omega_p)
    m = mirror.omega_m + atom.omega_p
    d = _resonance_factor(atom, mirror, nu)
    res = 0.0
    if d != 0:
        res = base * m / (4 * math.pi * mirror.omega_m) * d * coeff_A_parallel(
            mirror.xi, mirror.omega_m, a, tol).value
    k, kp = _threshold_factor(atom, mirror, nu)
    thr = base / (8 * math.pi ** 2) * kp * coeff_B_parallel(k * a) if k > 0 else 0.0
    return KernelTerms(res, thr)


def m_perp(atom: AtomParams, mirror: MirrorParams, a: float, nu: float,
           tol: float = quad.DEFAULT_TOL) -> KernelTerms:
    """Kernel for oscillation along the plate normal."""
    _check_geometry(a, nu)
    base = math.pi * mirror.gamma ** 2 * atom.g ** 2 / (2 * atom.omega_p)
    m = mirror.omega_m + atom.omega_p
    d = _resonance_factor(atom, mirror, nu)
    res = 0.0
    if d != 0:
        res = base * m / (16 * math.pi * mirror.omega_m) * d * coeff_A_perp(
            mirror.xi, mirror.omega_m, a, tol).value
    k, kp = _threshold_factor(atom, mirror, nu)
    thr = -base / (8 * math.pi ** 2) * kp * coeff_B_perp(k * a) if k > 0 else 0.0
    return KernelTerms(res, thr)


def plate_kernel_point(atom: AtomParams, mirror: MirrorParams, a: float, nu: float,
                       tol: float = quad.DEFAULT_TOL) -> PlateKernelPoint:
    par = m_parallel(atom, mirror, a, nu, tol)
    perp = m_perp(atom, mirror, a, nu, tol)
    return PlateKernelPoint(nu, par.total, perp.total, par.resonance, par.threshold,
                            perp.resonance, perp.threshold)


def m_parallel_far_limit(atom: AtomParams, mirror: MirrorParams, nu: float) -> float:
    """a -> infinity limit of m_par: gamma^2 g^2 k^2 P_xi(k^2 - Omega_m^2) / (64 Omega_p)."""
    k, kp = _threshold_factor(atom, mirror, nu)
    if k == 0:
        return 0.0
    return mirror.gamma ** 2 * atom.g ** 2 * kp / (64 * atom.omega_p)


def im_gamma_mp_smallosc(atom: AtomParams, mirror: MirrorParams, a: float,
                         y_par_sq, y_perp_sq, tol: float = 1e-8,
                         nu_max: float = math.inf) -> QuadResult:
    """(1/2) int dnu/(2 pi) [m_par |y~_par|^2 + m_perp |y~_3|^2].

    Spectra are callables of nu, ``None`` for no motion in that direction,
    or a :class:`movingatom.trajectory.LineSpectrum` (passed as
    ``y_par_sq``, with ``y_perp_sq`` left ``None``), for which the rate is
    per unit time.
    """
    if hasattr(y_par_sq, "line_strength"):
        if y_perp_sq is not None:
            raise DomainError("pass a LineSpectrum alone; it already holds both components")
        line = y_par_sq
        val = 0.0
        if line.amplitude_par_sq:
            val += line.line_strength("par") * m_parallel(atom, mirror, a, line.nu0, tol).total
        if line.amplitude_perp_sq:
            val += line.line_strength("perp") * m_perp(atom, mirror, a, line.nu0, tol).total
        return QuadResult(0.5 * val, 0.0)

    kernels = [(y_par_sq, m_parallel), (y_perp_sq, m_perp)]

    def integrand(nu):
        out = 0.0
        for spec, kern in kernels:
            if spec is None:
                continue
            s = float(spec(nu))
            if s != 0:
                out += s * kern(atom, mirror, a, nu, tol).total
        return out

    if all(s is None for s, _ in kernels):
        return QuadResult(0.0, 0.0)
    m = mirror.omega_m + atom.omega_p
    pts = [atom.omega_p, m, math.sqrt(m * m - mirror.xi) if m * m > mirror.xi else m,
           math.sqrt(m * m + mirror.xi), atom.omega_p + mirror.omega_m]
    folded = lambda nu: integrand(nu) + integrand(-nu)  # noqa: E731
    if math.isinf(nu_max):
        half = quad.integrate_semi_infinite(folded, 0.0, tol, scale=m, points=pts)
    else:
        half = quad.integrate(folded, 0.0, nu_max, tol, points=[p for p in pts if p < nu_max])
    return half.scaled(0.5 / (2 * math.pi))
