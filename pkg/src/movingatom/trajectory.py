"""Center-of-mass trajectories and their spectral functions.

The spectral function of a path r(t) is

    f(p, nu) = int dt exp(-i p.r(t)) exp(i nu t).

For static, uniform and single-frequency motion f is a sum of delta
functions; those cases return symbolic line labels (:class:`LineSeries`) and
only rate-level code consumes them.  Sampled paths are tapered with a
raised-cosine window and give ordinary complex numbers; their rates are per
unit effective time T_eff = int w(t)^2 dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import DomainError, ExpansionError, SpectrumVariantError

PLATE_NORMAL = (0.0, 0.0, 1.0)
# largest |y| * nu0 accepted by the small-amplitude expansion of sampled paths
SMALL_EXCURSION = 0.3


def _vec3(name, v):
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be a finite 3-vector, got {v!r}")
    return tuple(float(c) for c in arr)


@dataclass(frozen=True)
class UniformVelocity:
    u: tuple
    r0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "u", _vec3("u", self.u))
        object.__setattr__(self, "r0", _vec3("r0", self.r0))
        if math.hypot(*self.u) >= 1:
            raise DomainError("speed must be below 1")


@dataclass(frozen=True)
class HarmonicLine:
    """r(t) = r0 + amplitude * cos(nu0 t); zero mean displacement by construction."""

    amplitude: tuple
    nu0: float
    r0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _vec3("amplitude", self.amplitude))
        object.__setattr__(self, "r0", _vec3("r0", self.r0))
        if not (math.isfinite(self.nu0) and self.nu0 > 0):
            raise DomainError("nu0 must be positive")
        if math.hypot(*self.amplitude) * self.nu0 >= 1:
            raise DomainError("peak speed |amplitude| * nu0 must be below 1")


@dataclass(frozen=True, eq=False)
class Sampled:
    """Tabulated path with a raised-cosine taper.

    ``flat_fraction`` is the central fraction of the record where the window
    equals one; the rest is split evenly between the two cosine ramps.
    """

    times: np.ndarray
    positions: np.ndarray
    flat_fraction: float = 0.5
    weights: np.ndarray = field(init=False, repr=False)
    window: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        r = np.array(self.positions, dtype=float)
        if t.ndim != 1 or t.size < 4:
            raise DomainError("need at least 4 sample times")
        if r.shape != (t.size, 3):
            raise DomainError(f"positions must have shape ({t.size}, 3), got {r.shape}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise DomainError("samples must be finite")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise DomainError("sample times must be strictly increasing")
        speed = np.linalg.norm(np.diff(r, axis=0), axis=1) / dt
        if np.max(speed) >= 1:
            raise DomainError(f"finite-difference speed reaches {np.max(speed):.3g} >= 1")
        if not 0 <= self.flat_fraction <= 1:
            raise DomainError("flat_fraction must lie in [0, 1]")
        t.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", r)
        # trapezoid weights on the (possibly non-uniform) grid
        wq = np.zeros_like(t)
        wq[:-1] += 0.5 * dt
        wq[1:] += 0.5 * dt
        object.__setattr__(self, "weights", wq)
        object.__setattr__(self, "window", raised_cosine(t, self.flat_fraction))

    @property
    def t_eff(self) -> float:
        return float(np.dot(self.weights, self.window ** 2))


def raised_cosine(t, flat_fraction):
    """Tukey-type window on the span of ``t``: 1 in the middle, cosine ramps at the ends."""
    t = np.asarray(t, dtype=float)
    s = (t - t[0]) / (t[-1] - t[0])
    ramp = 0.5 * (1.0 - flat_fraction)
    w = np.ones_like(s)
    if ramp > 0:
        lo = s < ramp
        hi = s > 1 - ramp
        w[lo] = 0.5 * (1 - np.cos(np.pi * s[lo] / ramp))
        w[hi] = 0.5 * (1 - np.cos(np.pi * (1 - s[hi]) / ramp))
    return w


def load_sampled(path, flat_fraction: float = 0.5) -> Sampled:
    """Read ``t x y z`` rows (whitespace separated, '#' comments)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 4:
        raise DomainError(f"{path}: expected 4 columns (t x y z), found {data.shape[1]}")
    return Sampled(data[:, 0], data[:, 1:], flat_fraction)


# -- symbolic spectra ----------------------------------------------------------


@dataclass(frozen=True)
class LineSeries:
    """f(p, nu) = sum_k weights[k] * 2 pi delta(nu - frequencies[k])."""

    frequencies: tuple
    weights: tuple

    def weight_at(self, nu, atol=1e-12):
        return sum((w for f, w in zip(self.frequencies, self.weights) if abs(f - nu) <= atol), 0j)


@dataclass(frozen=True)
class LineSpectrum:
    """Small-amplitude content of single-frequency motion.

    ``amplitude_*_sq`` are squared real amplitudes of y(t) = A cos(nu0 t)
    split along and across the plate normal.  Per unit time,
    |y~(nu)|^2 / T = (pi A^2 / 2) [delta(nu - nu0) + delta(nu + nu0)].
    """

    nu0: float
    amplitude_par_sq: float
    amplitude_perp_sq: float

    def __post_init__(self):
        if not self.nu0 > 0:
            raise DomainError("nu0 must be positive")
        if self.amplitude_par_sq < 0 or self.amplitude_perp_sq < 0:
            raise DomainError("squared amplitudes must be non-negative")

    def line_strength(self, component: str = "total") -> float:
        """int dnu/(2 pi) |y~|^2 / T over both lines, i.e. A^2 / 2."""
        sq = {"par": self.amplitude_par_sq, "perp": self.amplitude_perp_sq,
              "total": self.amplitude_par_sq + self.amplitude_perp_sq}[component]
        return 0.5 * sq


@dataclass(frozen=True)
class MomentumLine:
    """Angular-averaged |f|^2 per unit time concentrated at momenta: sum w delta(p - p0)."""

    lines: tuple = ()


# -- operations ----------------------------------------------------------------


def _bessel_order_cap(z):
    # J_n(z) is below 1e-17 for n past |z| + 30 + a few |z|^(1/3)
    return int(math.ceil(abs(z) + 30 + 4 * abs(z) ** (1 / 3)))


def spectrum_f(traj, p, nu=None):
    """Spectral function of ``traj`` at momentum ``p``.

    Distributional cases return a :class:`LineSeries`; asking them for a
    value at a given ``nu`` raises :class:`SpectrumVariantError`.
    """
    p = np.asarray(_vec3("p", p))
    if isinstance(traj, (UniformVelocity, HarmonicLine)):
        if nu is not None:
            raise SpectrumVariantError(
                f"{type(traj).__name__} has a line spectrum; use the rate-level APIs "
                "(f_sq_angular_integrated, smallosc_lines) instead of pointwise values")
        phase = complex(np.exp(-1j * float(np.dot(p, traj.r0))))
        if isinstance(traj, UniformVelocity):
            return LineSeries((float(np.dot(p, traj.u)),), (phase,))
        z = float(np.dot(p, traj.amplitude))
        if z == 0:
            return LineSeries((0.0,), (phase,))
        n = np.arange(-_bessel_order_cap(z), _bessel_order_cap(z) + 1)
        w = phase * (-1j) ** (n % 4) * special.jv(n, z)
        keep = np.abs(w) > 1e-300
        # e^{i n nu0 t} puts order n at nu = -n nu0
        return LineSeries(tuple(float(-k * traj.nu0) for k in n[keep]),
                          tuple(complex(c) for c in w[keep]))
    if isinstance(traj, Sampled):
        if nu is None:
            raise DomainError("sampled spectra are evaluated at a given nu")
        phase = np.exp(-1j * (traj.positions @ p) + 1j * nu * traj.times)
        return complex(np.sum(traj.weights * traj.window * phase))
    raise TypeError(f"unknown trajectory type {type(traj).__name__}")


def second_order_lines(traj: HarmonicLine, p) -> LineSeries:
    """Second-order small-amplitude term of f: lines at 0 and +-2 nu0.

    Diagnostic only; the kernels in this package are quadratic in y and use
    the first-order term.
    """
    if not isinstance(traj, HarmonicLine):
        raise SpectrumVariantError("second-order lines are available for HarmonicLine only")
    p = np.asarray(_vec3("p", p))
    z = float(np.dot(p, traj.amplitude))
    phase = complex(np.exp(-1j * float(np.dot(p, traj.r0))))
    c = -phase * z * z
    return LineSeries((-2 * traj.nu0, 0.0, 2 * traj.nu0), (c / 8, c / 4, c / 8))


def _split(amplitude, normal):
    a = np.asarray(amplitude, dtype=float)
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    perp = float(np.dot(a, n))
    par = a - perp * n
    return float(np.dot(par, par)), perp * perp


def smallosc_lines(traj, normal=PLATE_NORMAL) -> LineSpectrum:
    """Squared oscillation amplitudes along and across the plate normal."""
    if isinstance(traj, HarmonicLine):
        par, perp = _split(traj.amplitude, normal)
        return LineSpectrum(traj.nu0, par, perp)
    if isinstance(traj, Sampled):
        return _sampled_line(traj, normal)
    raise ExpansionError(f"{type(traj).__name__} is not a bounded oscillation")


def _sampled_line(traj: Sampled, normal) -> LineSpectrum:
    w = traj.weights * traj.window
    r0 = (w @ traj.positions) / w.sum()
    y = traj.positions - r0
    t = traj.times
    span = t[-1] - t[0]

    def power(nu):
        ph = np.exp(1j * nu * t)
        yt = (w * ph) @ y
        return float(np.real(np.vdot(yt, yt)))

    nyq = math.pi / float(np.median(np.diff(t)))
    grid = np.linspace(2 * math.pi / span, nyq, 4096)
    k = int(np.argmax([power(v) for v in grid]))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    nu0 = optimize.minimize_scalar(lambda v: -power(v), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-10}).x
    if np.max(np.linalg.norm(y, axis=1)) * nu0 > SMALL_EXCURSION:
        raise ExpansionError(
            f"excursion * frequency = {np.max(np.linalg.norm(y, axis=1)) * nu0:.3g} is not small")
    # a windowed line (A/2) e^{-i nu0 t} has |y~_w(nu0)| = (A/2) int w dt
    yt = (w * np.exp(1j * nu0 * t)) @ y
    amp = 2 * np.abs(yt) / w.sum()
    par, perp = _split(amp, normal)
    return LineSpectrum(float(nu0), par, perp)


# Gauss-Legendre in cos(theta) times a uniform rule in phi
_N_MU, _N_PHI = 24, 24
_MU, _W_MU = np.polynomial.legendre.leggauss(_N_MU)
_PHI = 2 * np.pi * np.arange(_N_PHI) / _N_PHI


def _directions():
    s = np.sqrt(1 - _MU ** 2)
    dirs = np.stack([np.outer(s, np.cos(_PHI)), np.outer(s, np.sin(_PHI)),
                     np.outer(_MU, np.ones_like(_PHI))], axis=-1).reshape(-1, 3)
    weights = np.repeat(_W_MU, _N_PHI) / (2 * _N_PHI)
    return dirs, weights


def f_sq_angular_integrated(traj, p=None, omega_p: float = 1.0):
    """Direction average of |f(p, p + omega_p)|^2 per unit time.

    Line-spectrum motions return a :class:`MomentumLine` (to first order in
    the amplitude for HarmonicLine); sampled motion returns the value at
    momentum magnitude ``p``.
    """
    if not omega_p > 0:
        raise DomainError("omega_p must be positive")
    if isinstance(traj, UniformVelocity):
        # support at nu = p.u < p < p + omega_p: nothing reaches the atom line
        return MomentumLine(())
    if isinstance(traj, HarmonicLine):
        if p is not None:
            raise SpectrumVariantError("HarmonicLine gives a momentum line; call without p")
        p0 = traj.nu0 - omega_p
        a_sq = float(np.dot(traj.amplitude, traj.amplitude))
        if p0 <= 0 or a_sq == 0:
            return MomentumLine(())
        # <(p.A)^2> = p^2 |A|^2 / 3 over directions, times (pi/2) per line
        return MomentumLine(((p0, math.pi * a_sq * p0 * p0 / 6.0),))
    if isinstance(traj, Sampled):
        if p is None or not p >= 0:
            raise DomainError("sampled spectra need a momentum magnitude p >= 0")
        dirs, dw = _directions()
        nu = p + omega_p
        ph = np.exp(-1j * p * (traj.positions @ dirs.T) + 1j * nu * traj.times[:, None])
        f = (traj.weights * traj.window) @ ph
        return float(np.dot(dw, np.abs(f) ** 2)) / traj.t_eff
    raise TypeError(f"unknown trajectory type {type(traj).__name__}")
