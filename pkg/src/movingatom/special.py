"""Sine integral Si(x) = int_0^x sin(t)/t dt."""

from __future__ import annotations

import math

import numpy as np

_SERIES_CUT = 4.0
_EPS = 1e-16
_MAXIT = 500


def _si_series(x):
    # sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    x2 = x * x
    term = x  # x^(2k+1)/(2k+1)!
    s = x
    k = 0
    while True:
        k += 1
        term *= -x2 / ((2 * k) * (2 * k + 1))
        contrib = term / (2 * k + 1)
        s += contrib
        if abs(contrib) < _EPS * abs(s):
            return s


def _si_continued_fraction(x):
    # Modified Lentz on the continued fraction for E1(ix);
    # Si(x) = pi/2 + Im[e^{-ix} h].
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = h = 1.0 / b
    for i in range(2, _MAXIT):
        a = -float((i - 1) * (i - 1))
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _EPS:
            break
    else:  # pragma: no cover - the fraction converges in < 100 steps for x >= 4
        raise ArithmeticError(f"Si continued fraction did not converge at x={x}")
    h *= complex(math.cos(x), -math.sin(x))
    return 0.5 * math.pi + h.imag


def _si_scalar(x):
    x = float(x)
    if math.isnan(x):
        return math.nan
    if math.isinf(x):
        return math.copysign(0.5 * math.pi, x)
    ax = abs(x)
    if ax == 0.0:
        return 0.0 * x
    v = _si_series(ax) if ax < _SERIES_CUT else _si_continued_fraction(ax)
    return math.copysign(v, x)


def sine_integral(x):
    """Si(x), odd in ``x``; accepts scalars or arrays.

    Power series below 4 and the continued fraction for the exponential
    integral E1(ix) above, good to ~1e-15 relative.
    """
    if np.ndim(x) == 0:
        return _si_scalar(x)
    arr = np.asarray(x, dtype=float)
    return np.vectorize(_si_scalar, otypes=[float])(arr)
