"""Physical parameters in natural units (c = hbar = 1).

Frequencies, momenta and masses share one dimension; lengths and times are
inverse masses.  The atom coupling ``g`` has dimension mass^(1/2), the plate
coupling ``gamma`` mass^(3/2) and the plate loss ``xi`` mass^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def _finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class AtomParams:
    """Harmonic-oscillator atom.

    ``omega_p`` is the renormalized internal frequency; the relation to the
    bare, cutoff-dependent frequency lives in :func:`movingatom.free_space.freq_shift`.
    """

    g: float = 1.0
    omega_p: float = 1.0

    def __post_init__(self):
        _finite("g", self.g)
        _finite("omega_p", self.omega_p)
        if self.omega_p <= 0:
            raise DomainError(f"omega_p must be positive, got {self.omega_p}")
        if self.g < 0:
            raise DomainError(f"g must be non-negative, got {self.g}")


@dataclass(frozen=True)
class MirrorParams:
    """Plate of independent oscillators with ohmic loss ``xi`` (Omega_m^2 -> Omega_m^2 - i xi)."""

    gamma: float = 1.0
    omega_m: float = 1.0
    xi: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "omega_m", "xi"):
            _finite(name, getattr(self, name))
        if self.omega_m <= 0:
            raise DomainError(f"omega_m must be positive, got {self.omega_m}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if self.xi < 0:
            raise DomainError(f"xi must be non-negative, got {self.xi}")


@dataclass(frozen=True)
class DimensionlessSet:
    nu_tilde: float
    a_tilde: float
    omega_m_tilde: float
    xi_tilde: float


def to_dimensionless(atom: AtomParams, mirror: MirrorParams, a: float, nu: float) -> DimensionlessSet:
    """Reduce to the figure conventions: nu/Omega_p, a*Omega_p, Omega_m/Omega_p, xi/Omega_p^2."""
    _finite("a", a)
    _finite("nu", nu)
    w = atom.omega_p
    return DimensionlessSet(
        nu_tilde=nu / w,
        a_tilde=a * w,
        omega_m_tilde=mirror.omega_m / w,
        xi_tilde=mirror.xi / (w * w),
    )


def from_dimensionless(ds: DimensionlessSet, omega_p: float, g: float = 1.0, gamma: float = 1.0):
    """Inverse of :func:`to_dimensionless`; returns ``(atom, mirror, a, nu)``."""
    atom = AtomParams(g=g, omega_p=omega_p)
    mirror = MirrorParams(
        gamma=gamma,
        omega_m=ds.omega_m_tilde * omega_p,
        xi=ds.xi_tilde * omega_p * omega_p,
    )
    return atom, mirror, ds.a_tilde / omega_p, ds.nu_tilde * omega_p


def rescale(lam: float, atom: AtomParams, mirror: MirrorParams | None = None,
            a: float | None = None, nu: float | None = None):
    """Apply the dimensional scaling map with factor ``lam``.

    frequencies * lam, lengths / lam, g^2 * lam, gamma^2 * lam^3, xi * lam^2.
    A kernel of mass dimension d then changes by lam**d.
    """
    if not lam > 0:
        raise DomainError("scale factor must be positive")
    atom2 = AtomParams(g=atom.g * math.sqrt(lam), omega_p=atom.omega_p * lam)
    mirror2 = None
    if mirror is not None:
        mirror2 = MirrorParams(
            gamma=mirror.gamma * lam ** 1.5,
            omega_m=mirror.omega_m * lam,
            xi=mirror.xi * lam * lam,
        )
    a2 = None if a is None else a / lam
    nu2 = None if nu is None else nu * lam
    return atom2, mirror2, a2, nu2
