"""Spectral coefficients of the slab, closed-form special cases and the
loss-limited truncation wavenumber."""

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (MaterialResponse, SlabGeometry, gamma0, wavelength, wavenumber)
from .errors import RegionError


class Region(enum.Enum):
    """Observation region behind the slab that selects the truncation rule."""

    BETWEEN_FACE_AND_2L = "between_face_and_2L"
    BEYOND_2L = "beyond_2L"


def region_behind_slab(z, geom):
    """Region of ``z >= d + L``; ``z = 2L`` exactly counts as beyond."""
    if z < geom.d + geom.L:
        raise RegionError(f"z = {z:g} m lies in front of the back face d + L = {geom.d + geom.L:g} m")
    return Region.BEYOND_2L if z >= 2.0 * geom.L else Region.BETWEEN_FACE_AND_2L


@dataclass(frozen=True)
class TruncationWavenumber:
    """Effective spectral cutoff set by loss (``origin="loss"``) or on-time."""

    value: float
    region: Region
    origin: str
    parameter: float

    def __post_init__(self):
        if self.origin not in ("loss", "time"):
            raise ValueError(f"unknown origin {self.origin!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class SpectralCoefficients:
    """Plane-wave amplitudes ``T0, R0, Ts, Rs, T`` at one (omega, h)."""

    t0: complex
    r0: complex
    ts: complex
    rs: complex
    t: complex


def line_source_spectrum(E0, omega):
    """Constant spectrum ``T0 = E0/k0`` of the magnetic-current line source."""
    E0 = complex(E0) if np.iscomplexobj(E0) else float(E0)
    if not np.isfinite(E0):
        raise ValueError("E0 must be finite")
    return E0 / wavenumber(omega)


def _as_response(m):
    return m if isinstance(m, MaterialResponse) else MaterialResponse(*m)


def t_te(omega, h, m, L):
    """TE transmission coefficient of a slab of width ``L``.

    Evaluated in the factored form documented in :mod:`slablens.kernels`,
    which stays finite in the deep-evanescent lossy regime (it tends to 0).
    """
    m = _as_response(m)
    k0 = wavenumber(omega)
    out = kernels.slab_spectrum(k0, h, m.eps_r, m.mu_r, -L, L, 0.0)
    return complex(out) if out.ndim == 0 else out


def t_te_lossy_approx(omega, h, delta_pp, L):
    """Evanescent approximation ``e^{X}/(delta**2 e^{X}/4 + e^{-X})``, ``X = |gamma0| L``."""
    X = np.abs(gamma0(omega, h)) * L
    return np.exp(X) / (delta_pp**2 * np.exp(X) / 4.0 + np.exp(-X))


def _cexpm1(w):
    return kernels._cexpm1_np(np.asarray(w, dtype=complex))


def layer_spectra(omega, h, t0_in, geom, m):
    """Amplitudes of the five plane waves of the layered solution.

    Uses ``Ts = 2 T0 s g e^{i(g0-g)d}/den``,
    ``Rs = -2 T0 m g e^{i(g0 d + g(2L+d))}/den`` and the subtraction-free
    ``R0 = -T0 e^{2i g0 d} s m (e^{2igL} - 1)/den``, all algebraically equal to
    the interface solution.  Arrays in ``h`` are accepted.
    """
    if not np.all(np.isfinite(t0_in)):
        raise ValueError("t0_in must be finite")
    m = _as_response(m)
    k0 = wavenumber(omega)
    d, L = geom.d, geom.L
    h = np.asarray(h, dtype=float)
    eps = np.asarray(m.eps_r, dtype=complex)
    mu = np.asarray(m.mu_r, dtype=complex)
    g0, g = kernels.wavenumbers_np(k0, h, eps, mu)
    a = eps * g0
    s = g + a
    mm = g - a
    P = k0 * k0 * eps * (mu - eps) + h * h * (eps - 1.0) * (eps + 1.0)
    big = np.abs(s) >= np.abs(mm)
    zero = g == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        s, mm = np.where(big, s, P / mm), np.where(big, P / s, mm)
        den = s * s - mm * mm * np.exp(2j * g * L)
        t = np.where(zero, 4.0 * np.exp(-1j * g0 * L) / (4.0 - 2j * L * a),
                     4.0 * g * a * np.exp(1j * (g - g0) * L) / den)
        half = np.exp(1j * g0 * d) / (2.0 - 1j * L * a)
        ts = np.where(zero, half, 2.0 * s * g * np.exp(1j * (g0 - g) * d) / den)
        rs = np.where(zero, half, -2.0 * mm * g * np.exp(1j * (g0 * d + g * (2.0 * L + d))) / den)
        r0 = np.exp(2j * g0 * d) * np.where(
            zero, 1j * L * a / (2.0 - 1j * L * a), -P * _cexpm1(2j * g * L) / den)
    t0 = np.asarray(t0_in, dtype=complex)
    out = [t0 * v for v in (np.ones_like(t), r0, ts, rs, t)]
    if out[0].ndim == 0:
        out = [complex(v) for v in out]
    return SpectralCoefficients(*out)


def interface_residuals(omega, h, coeffs, geom, m):
    """Relative mismatch of E_x and H_y at the two slab faces.

    For the E_x-polarized line-source field the companion H_y of a plane
    wave pair ``F e^{i g z} + B e^{-i g z}`` is proportional to
    ``(eps/g)(F e^{igz} - B e^{-igz})``.
    Returns ``(res_front, res_back)``, each the larger of the E and H
    mismatches divided by the largest participating term.
    """
    m = _as_response(m)
    k0 = wavenumber(omega)
    d, L = geom.d, geom.L
    g0 = gamma0(omega, h)
    g = kernels.wavenumbers_np(k0, h, m.eps_r, m.mu_r)[1]
    c = coeffs
    # front face, z = d
    a1, b1 = c.t0 * np.exp(1j * g0 * d), c.r0 * np.exp(-1j * g0 * d)
    a2, b2 = c.ts * np.exp(1j * g * d), c.rs * np.exp(-1j * g * d)
    yr = m.eps_r * g0 / g
    front = _mismatch(a1, b1, a2, b2, yr)
    # back face, z = d + L
    a3, b3 = c.ts * np.exp(1j * g * (d + L)), c.rs * np.exp(-1j * g * (d + L))
    a4 = c.t * np.exp(1j * g0 * (d + L))
    back = _mismatch(a4, 0.0, a3, b3, yr)
    return front, back


def _mismatch(fa, ba, fb, bb, yr):
    scale_e = max(abs(fa), abs(ba), abs(fb), abs(bb))
    e = abs((fa + ba) - (fb + bb)) / scale_e
    hb_f, hb_b = yr * fb, yr * bb
    scale_h = max(abs(fa), abs(ba), abs(hb_f), abs(hb_b))
    hh = abs((fa - ba) - (hb_f - hb_b)) / scale_h
    return max(e, hh)


def perfect_lens_spectra(omega, h, t0_in, geom):
    """Closed-form amplitudes for the lossless ``eps = mu = -1`` slab.

    The slab root is ``-gamma0`` for propagating ``h`` and ``+gamma0`` for
    evanescent ``h``, so the single slab wave is the ``Ts`` term in the first
    case and the ``Rs`` term in the second.
    """
    g0 = gamma0(omega, h)
    t0 = complex(t0_in)
    inner = t0 * np.exp(2j * g0 * geom.d)
    ts, rs = (inner, 0j) if abs(h) < wavenumber(omega) else (0j, inner)
    return SpectralCoefficients(t0, 0j, ts, rs, t0 * np.exp(-2j * g0 * geom.L))


def gamma_delta(delta_pp, geom, region):
    """Evanescent decay scale beyond which the lossy slab stops amplifying."""
    if not 0.0 < delta_pp < 1.0:
        raise ValueError("delta_pp must lie in (0, 1)")
    if region is Region.BEYOND_2L:
        return -np.log(delta_pp) / geom.L
    return -2.0 * np.log(delta_pp) / (geom.d + geom.L)


def h_delta(delta_pp, geom, omega0, region=Region.BEYOND_2L):
    """Loss-limited truncation wavenumber ``sqrt(Gamma_delta**2 + k00**2)``."""
    if not delta_pp > 0:
        raise ValueError("delta_pp must be positive")
    if delta_pp >= 1.0:
        raise ValueError("delta_pp >= 1 gives no evanescent enhancement")
    k00 = wavenumber(omega0)
    val = float(np.hypot(gamma_delta(delta_pp, geom, region), k00))
    return TruncationWavenumber(val, region, "loss", float(delta_pp))


def lossy_evanescent_spectra(omega, h, delta_pp, geom, t0_in=1.0,
                             region=Region.BETWEEN_FACE_AND_2L):
    """Leading-order amplitudes for ``k00 < |h| < H_delta`` and small loss.

    ``T ~ T0 e^{2|g0|L}``, ``Ts ~ -i T0 e^{(2|g0| - G)L}``,
    ``Rs ~ T0 e^{-2|g0|d}``, ``R0 ~ -i T0 e^{2|g0|(L-d) - G L}`` with
    ``G = gamma_delta``.  ``Ts`` and ``R0`` are order-of-magnitude forms: the
    exact amplitudes carry ``delta/2`` where these carry ``e^{-G L}``.
    """
    X = np.abs(gamma0(omega, h))
    G = gamma_delta(delta_pp, geom, region)
    d, L = geom.d, geom.L
    t0 = complex(t0_in)
    return SpectralCoefficients(
        t0,
        -1j * t0 * np.exp(2 * X * (L - d) - G * L),
        -1j * t0 * np.exp((2 * X - G) * L),
        t0 * np.exp(-2 * X * d),
        t0 * np.exp(2 * X * L),
    )


def asymptotic_divergent_field(x, z, delta_pp, E0, omega0, L, d=None):
    """Large-field asymptote between the back face and ``z = 2L``.

    Valid for ``z <= 2L - lambda0/20`` and ``z > d + L`` (or ``z > L`` when
    ``d`` is not given).  Magnitude scales as ``delta_pp**(z/L - 2)``.
    """
    lam0 = 2 * np.pi / wavenumber(omega0)
    lower = L if d is None else d + L
    if not (lower < z <= 2 * L - lam0 / 20):
        raise RegionError(
            f"z = {z:g} m outside the asymptotic band ({lower:g}, {2 * L - lam0 / 20:g}] m")
    if not 0.0 < delta_pp < 1.0:
        raise ValueError("delta_pp must lie in (0, 1)")
    k00 = wavenumber(omega0)
    x = np.asarray(x, dtype=float)
    zeta = 2 * L - z
    rho = np.hypot(x, zeta)
    ln_d = np.log(delta_pp)
    out = (E0 / (np.pi * k00 * rho) * np.exp(-(2 - z / L) * ln_d)
           * np.cos(x / L * ln_d + np.arctan2(x, zeta)))
    return out + 0j if out.ndim else complex(out)
