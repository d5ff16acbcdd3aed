"""Constants, geometry, material models and branch-correct wavenumbers."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import PassivityError

C0 = 299792458.0
MU0 = 4e-7 * np.pi
EPS0 = 1.0 / (MU0 * C0**2)
Z0 = MU0 * C0


def wavenumber(omega):
    """Free-space wavenumber ``k0 = omega/c``; rejects ``omega <= 0``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("angular frequency must be positive")
    k0 = omega / C0
    return float(k0) if k0.ndim == 0 else k0


def wavelength(f0):
    return C0 / float(f0)


@dataclass(frozen=True)
class SlabGeometry:
    """Source-to-front-face distance ``d`` and slab width ``L`` (metres)."""

    d: float
    L: float

    def __post_init__(self):
        if not (self.d > 0 and self.L > 0):
            raise ValueError(f"need d > 0 and L > 0, got d={self.d}, L={self.L}")

    @property
    def d_less_than_L(self):
        return self.d < self.L

    @property
    def back_face(self):
        return self.d + self.L

    @classmethod
    def in_wavelengths(cls, d_over_lambda, L_over_lambda, f0):
        lam = wavelength(f0)
        return cls(d_over_lambda * lam, L_over_lambda * lam)


@dataclass(frozen=True)
class MaterialResponse:
    """Relative permittivity and permeability at one frequency (or an array)."""

    eps_r: complex
    mu_r: complex

    def __post_init__(self):
        if np.any(np.imag(self.eps_r) < 0) or np.any(np.imag(self.mu_r) < 0):
            raise PassivityError(
                f"non-passive material: eps_r={self.eps_r}, mu_r={self.mu_r}")


class MaterialModel:
    """Base class: maps angular frequency to a :class:`MaterialResponse`."""

    def response(self, omega):
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(MaterialModel):
    def response(self, omega):
        shape = np.shape(omega)
        val = np.ones(shape, dtype=complex) if shape else 1.0 + 0j
        return MaterialResponse(val, val)


@dataclass(frozen=True)
class ConstantLossyDNG(MaterialModel):
    """``eps_r = mu_r = -1 + i delta_pp`` at every frequency."""

    delta_pp: float

    def __post_init__(self):
        if not self.delta_pp >= 0:
            raise ValueError("delta_pp must be >= 0")

    def response(self, omega):
        val = -1.0 + 1j * self.delta_pp
        shape = np.shape(omega)
        if shape:
            val = np.full(shape, val)
        return MaterialResponse(val, val)


@dataclass(frozen=True)
class DispersiveDNG(MaterialModel):
    """Near-resonance double-negative material.

    ``eps_r = mu_r = -1 + slope*D + i*(loss_coeff*D)**2`` with
    ``D = (omega - omega0)/omega0``.  Causality/energy arguments require
    ``slope >= 4``.
    """

    omega0: float
    slope: float = 4.0
    loss_coeff: float = 1000.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if not self.slope >= 4.0:
            raise ValueError(f"slope must be >= 4 (got {self.slope})")
        if not self.loss_coeff >= 0:
            raise ValueError("loss_coeff must be >= 0")

    def kappa_offset(self, rel):
        """Relative response as a function of ``(omega - omega0)/omega0``."""
        rel = np.asarray(rel)
        return -1.0 + self.slope * rel + 1j * (self.loss_coeff * rel) ** 2

    def response(self, omega):
        omega = np.asarray(omega, dtype=float)
        val = self.kappa_offset((omega - self.omega0) / self.omega0)
        if val.ndim == 0:
            val = complex(val)
        return MaterialResponse(val, val)


@dataclass(frozen=True)
class Custom(MaterialModel):
    """User material from a tabulated response or a callable.

    Tables are interpolated linearly in omega (real and imaginary parts
    separately); evaluation outside the table raises ``ValueError``.
    """

    omega: Optional[np.ndarray] = None
    eps_r: Optional[np.ndarray] = None
    mu_r: Optional[np.ndarray] = None
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.func is None:
            if self.omega is None or self.eps_r is None or self.mu_r is None:
                raise ValueError("Custom needs either func or (omega, eps_r, mu_r) tables")
            w = np.asarray(self.omega, dtype=float)
            if w.ndim != 1 or w.size < 2 or np.any(np.diff(w) <= 0):
                raise ValueError("omega table must be strictly increasing with >= 2 entries")
            for name in ("eps_r", "mu_r"):
                v = np.asarray(getattr(self, name), dtype=complex)
                if v.shape != w.shape:
                    raise ValueError(f"{name} table shape {v.shape} != omega shape {w.shape}")
                if np.any(v.imag < 0):
                    raise PassivityError(f"{name} table is not passive")
                object.__setattr__(self, name, v)
            object.__setattr__(self, "omega", w)

    def response(self, omega):
        if self.func is not None:
            r = self.func(omega)
            if not isinstance(r, MaterialResponse):
                r = MaterialResponse(*r)
            return r
        w = np.asarray(omega, dtype=float)
        if np.any(w < self.omega[0]) or np.any(w > self.omega[-1]):
            raise ValueError(
                f"omega outside table range [{self.omega[0]:g}, {self.omega[-1]:g}]")

        def interp(v):
            out = np.interp(w, self.omega, v.real) + 1j * np.interp(w, self.omega, v.imag)
            return complex(out) if out.ndim == 0 else out

        return MaterialResponse(interp(self.eps_r), interp(self.mu_r))


def evaluate_material(model, omega):
    wavenumber(omega)
    return model.response(omega)


def gamma0(omega, h):
    """Free-space longitudinal wavenumber ``sqrt(k0**2 - h**2)``.

    Positive real for ``|h| < k0``, positive imaginary for ``|h| > k0`` and
    exactly zero at the branch points ``h = +-k0``.
    """
    k0 = wavenumber(omega)
    h = np.asarray(h, dtype=float)
    r = (k0 - h) * (k0 + h)
    sq = np.sqrt(np.abs(r))
    out = np.where(r >= 0, sq + 0j, 1j * sq)
    return complex(out) if out.ndim == 0 else out


def gamma_slab(omega, h, material):
    """Slab wavenumber ``sqrt(k0**2 eps mu - h**2)`` with ``Im >= 0``.

    A real root takes the sign ``-1`` when both ``Re eps`` and ``Re mu``
    are negative, which is the vanishing-loss limit of the ``Im >= 0`` root.
    """
    if not isinstance(material, MaterialResponse):
        material = MaterialResponse(*material)
    k0 = wavenumber(omega)
    h = np.asarray(h, dtype=float)
    eps = np.asarray(material.eps_r, dtype=complex)
    mu = np.asarray(material.mu_r, dtype=complex)
    g = kernels.wavenumbers_np(k0, h, eps, mu)[1]
    return complex(g) if g.ndim == 0 else g


def is_branch_point(omega, h):
    k0 = wavenumber(omega)
    return np.abs(np.asarray(h, dtype=float)) == k0
