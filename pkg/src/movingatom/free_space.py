"""Free-space dissipative kernels of the moving oscillator.

First order in the atom-field vertex the emission has a sharp threshold at
|nu| = Omega_p and grows like (|nu| - Omega_p)^3.  At second order the
renormalized kernel Sigma^(ren) is finite for all nu; each of its three
pieces has a double pole at q = Omega that only cancels in the sum, so it is
always integrated as one combined integrand.

All Sigma values here are in units of Omega (x = nu / Omega, q in units of
Omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from . import quad
from .errors import DomainError, SingularityError
from .params import AtomParams
from .quad import QuadResult

_TWO_PI = 2.0 * math.pi


def m_p_first_order(atom: AtomParams, nu: float) -> float:
    """First-order small-oscillation kernel (g^2 / 12 pi Omega_p) (|nu| - Omega_p)^3 above threshold."""
    k = abs(nu) - atom.omega_p
    if not k > 0:  # boundary included: continuous extension of the step
        return 0.0
    return atom.g ** 2 / (12.0 * math.pi * atom.omega_p) * k ** 3


def freq_shift(g: float, omega_ren: float, cutoff_lambda: float) -> float:
    """Cutoff-dependent shift of the internal frequency, -g^2 Lambda / (4 pi^2 Omega)."""
    if not omega_ren > 0:
        raise DomainError("omega_ren must be positive")
    if not cutoff_lambda > 0:
        raise DomainError("cutoff_lambda must be positive")
    return -(g * g) * cutoff_lambda / (4.0 * math.pi ** 2 * omega_ren)


def _radial_prefactor(atom: AtomParams) -> float:
    # (g^2 / 8 Omega) * 4 pi / (2 pi)^3
    return atom.g ** 2 / (8.0 * atom.omega_p) / (2.0 * math.pi ** 2)


def im_gamma1_general(atom: AtomParams, f_sq, p_max: float = math.inf,
                      tol: float = quad.DEFAULT_TOL) -> QuadResult:
    """First-order Im Gamma per unit time from the angular-averaged |f(p, p + Omega_p)|^2.

    ``f_sq`` is either a callable of the momentum magnitude or a
    :class:`movingatom.trajectory.MomentumLine` (a delta in ``p``), as
    returned by :func:`movingatom.trajectory.f_sq_angular_integrated`.
    """
    pref = _radial_prefactor(atom)
    lines = getattr(f_sq, "lines", None)
    if lines is not None:
        val = math.fsum(p0 * w for p0, w in lines if 0 < p0 <= p_max)
        return QuadResult(pref * val, 0.0)
    if not callable(f_sq):
        raise TypeError("f_sq must be callable or a momentum line")

    def radial(p):
        return p * np.asarray(f_sq(p), dtype=float)

    if math.isinf(p_max):
        res = quad.integrate_semi_infinite(radial, 0.0, tol, scale=atom.omega_p)
    else:
        if not p_max > 0:
            raise DomainError("p_max must be positive")
        res = quad.integrate(radial, 0.0, p_max, tol)
    if res.value < 0:
        raise DomainError("f_sq produced a negative radial integral; it must be non-negative")
    return res.scaled(pref)


# -- second order ------------------------------------------------------------


@dataclass(frozen=True)
class SigmaBreakdown:
    """Renormalized second-order kernel Sigma^(ren) / Omega at x = nu / Omega.

    Above threshold the individual pieces are Hadamard finite parts at the
    q = Omega double pole (their divergent parts cancel in the sum); the
    finite parts of the two counterterm-subtracted pieces vanish, so the whole
    kernel sits in ``sigma1``.
    """

    sigma1: float
    sigma2: float
    sigma3: float
    total: float
    nu_over_omega: float
    abs_error_estimate: float = 0.0


def combined_integrand(q, nu_over_omega):
    """Sum of the three renormalized integrands at ``q`` (units of Omega).

    Written in the unfactored form so it also works on exact rationals
    (``fractions.Fraction``); at q = 1 it is 0/0 and must not be called there.
    """
    x = nu_over_omega
    d = q * q - 1
    out = (q < x) * q * (x - q) ** 3 / (d * d)
    if x > 1:
        out = out + 3 * (x - 1) ** 2 / (2 * d) - (x - 1) ** 3 * (q * q + 1) / (2 * d * d)
    return out


def _reduced_polynomial(x: float) -> Polynomial:
    """R(q) with combined integrand = R(q) / (q + 1)^2 on [0, x], for x > 1.

    The numerator of the combined integrand over (q^2 - 1)^2 must contain
    (q - 1)^2; a non-zero remainder means the pole does not cancel.
    """
    q = Polynomial([0.0, 1.0])
    c2 = 1.5 * (x - 1) ** 2
    c3 = 0.5 * (x - 1) ** 3
    num = q * (x - q) ** 3 + c2 * (q ** 2 - 1) - c3 * (q ** 2 + 1)
    red, rem = divmod(num, Polynomial([1.0, -2.0, 1.0]))
    scale = max(1.0, float(np.max(np.abs(num.coef))))
    if np.max(np.abs(rem.coef)) > 1e-9 * scale:
        raise SingularityError(
            f"double pole at q = Omega does not cancel for nu/Omega = {x} "
            f"(remainder {rem.coef})")
    return red


def sigma_ren(nu_over_omega: float, tol: float = quad.DEFAULT_TOL) -> SigmaBreakdown:
    """Sigma^(ren) / Omega as a function of x = nu / Omega."""
    x = float(nu_over_omega)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"nu_over_omega must be finite and >= 0, got {nu_over_omega!r}")
    if x == 0:
        return SigmaBreakdown(0.0, 0.0, 0.0, 0.0, 0.0)

    if x <= 1:
        def below(q):
            return q * (x - q) ** 3 / (q * q - 1) ** 2

        # the integrand varies on the scale 1 - x near the upper end
        pts = [x - (1 - x)] if 0 < x - (1 - x) < x else []
        res = quad.integrate(below, 0.0, x, tol, abs_tol=tol * x ** 5 * 1e-3, points=pts)
        return SigmaBreakdown(res.value, 0.0, 0.0, res.value, x, res.abs_error_estimate)

    red = _reduced_polynomial(x)
    c2 = 1.5 * (x - 1) ** 2
    c3 = 0.5 * (x - 1) ** 3

    def inner(q):
        return red(q) / (q + 1) ** 2

    def tail(q):
        d = q * q - 1
        return c2 / d - c3 * (q * q + 1) / (d * d)

    scale = max(1.0, abs(red(x)))
    parts = [
        quad.integrate(inner, 0.0, x, tol, abs_tol=tol * scale, points=[1.0] if x > 1 else []),
        quad.integrate_semi_infinite(tail, x, tol, abs_tol=tol * scale, scale=x),
    ]
    res = quad.total(parts)
    # finite parts: PV of 1/(q^2-1) and f.p. of -(q^2+1)/(q^2-1)^2 over [0, inf) are 0
    return SigmaBreakdown(res.value, 0.0, 0.0, res.value, x, res.abs_error_estimate)


def _sigma_dimensional(atom: AtomParams, nu: float, tol: float) -> float:
    return atom.omega_p * sigma_ren(abs(nu) / atom.omega_p, tol).total


def im_gamma2_smallosc(atom: AtomParams, y_sq, nu_max: float = math.inf,
                       tol: float = 1e-8) -> QuadResult:
    """Second-order Im Gamma for small-amplitude motion (per unit time for lines).

    ``y_sq`` is |y~(nu)|^2 as a callable, or a
    :class:`movingatom.trajectory.LineSpectrum`, for which the integral over
    nu collapses onto the two lines at +-nu0.
    """
    pref = atom.g ** 4 / (24.0 * math.pi ** 3)
    strength = getattr(y_sq, "line_strength", None)
    if strength is not None:
        w = strength()  # int dnu/2pi |y~|^2 / T over both lines
        if w == 0:
            return QuadResult(0.0, 0.0)
        return QuadResult(pref * w * _sigma_dimensional(atom, y_sq.nu0, tol), 0.0)
    if not callable(y_sq):
        raise TypeError("y_sq must be callable or a LineSpectrum")

    def integrand(nu):
        v = float(y_sq(nu))
        if v == 0:
            return 0.0
        return v * _sigma_dimensional(atom, nu, tol * 1e-2)

    pts = [atom.omega_p]
    # the spectrum is even for real motion: fold onto nu >= 0
    if math.isinf(nu_max):
        half = quad.integrate_semi_infinite(
            lambda nu: integrand(nu) + integrand(-nu), 0.0, tol,
            scale=atom.omega_p, points=pts)
    else:
        half = quad.integrate(lambda nu: integrand(nu) + integrand(-nu), 0.0, nu_max, tol,
                              points=[p for p in pts if p < nu_max])
    return half.scaled(pref / _TWO_PI)
