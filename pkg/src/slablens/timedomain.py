"""Analytic-signal time-domain synthesis for a line source switched on at t = 0.

The windowed spectrum of the source ``sin(omega0 t)`` on ``[0, Te]`` is
integrated against the slab spectrum on a nonuniform omega grid clustered
around ``omega0``, giving the time-domain plane-wave spectrum ``W(h, z, t)``.
An even-``h`` cosine transform then gives the field along ``x``.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import kernels
from .core import C0, DispersiveDNG, MaterialModel, wavenumber
from .errors import CalibrationError, NonFiniteError, RegionError
from .field import spectral_nodes
from .spectrum import Region, TruncationWavenumber, asymptotic_divergent_field

# ----------------------------------------------------------------------------
# source windows
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CosineWindow:
    """``cos(omega0 t)`` switched on over ``[-t0, t0]``."""

    t0: float
    omega0: float

    def __post_init__(self):
        if not (self.t0 > 0 and self.omega0 > 0):
            raise ValueError("t0 and omega0 must be positive")


@dataclass(frozen=True)
class SineWindow:
    """``sin(omega0 t)`` switched on over ``[0, Te]``.

    ``Te omega0 = 2 pi N`` with integer ``N`` keeps ``V/omega`` bounded at
    ``omega = 0``; other values are accepted with a warning.
    """

    Te: float
    omega0: float
    n_periods: float = field(init=False)
    integer_periods: bool = field(init=False)

    def __post_init__(self):
        if not (self.Te > 0 and self.omega0 > 0):
            raise ValueError("Te and omega0 must be positive")
        n = self.Te * self.omega0 / (2 * np.pi)
        ok = abs(n - round(n)) <= 1e-9 * max(1.0, n)
        object.__setattr__(self, "n_periods", n)
        object.__setattr__(self, "integer_periods", ok)
        if not ok:
            warnings.warn(f"Te*omega0/2pi = {n:.6g} is not an integer; V/omega is unbounded at omega = 0",
                          RuntimeWarning, stacklevel=2)

    @classmethod
    def from_periods(cls, n_periods, omega0):
        return cls(2 * np.pi * int(n_periods) / omega0, omega0)


def _sinc_rad(a):
    return np.sinc(np.asarray(a) / np.pi)


def cosine_window_spectrum(omega, w):
    """``(1/2pi)[sin((omega+omega0)t0)/(omega+omega0) + sin((omega-omega0)t0)/(omega-omega0)]``."""
    omega = np.asarray(omega, dtype=float)
    t0, w0 = w.t0, w.omega0
    return t0 / (2 * np.pi) * (_sinc_rad((omega + w0) * t0) + _sinc_rad((omega - w0) * t0))


def _expm1_over(b, T):
    # (exp(i b T) - 1)/b, regular at b = 0
    b = np.asarray(b, dtype=float)
    return 1j * T * np.exp(0.5j * b * T) * _sinc_rad(0.5 * b * T)


def sine_window_spectrum(omega, w):
    """``(1/4pi)[(e^{iTe(w-w0)} - 1)/(w-w0) - (e^{iTe(w+w0)} - 1)/(w+w0)]``."""
    omega = np.asarray(omega, dtype=float)
    Te, w0 = w.Te, w.omega0
    out = (_expm1_over(omega - w0, Te) - _expm1_over(omega + w0, Te)) / (4 * np.pi)
    return complex(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# omega grid
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaGrid:
    """Sorted relative offsets ``(omega - omega0)/omega0`` including 0."""

    offsets: np.ndarray
    omega0: float
    descriptor: dict

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        if off.ndim != 1 or off.size < 3 or np.any(np.diff(off) <= 0):
            raise ValueError("offsets must be strictly increasing")
        if not np.any(off == 0.0):
            raise ValueError("grid must contain omega0")
        object.__setattr__(self, "offsets", off)

    @property
    def omega(self):
        return self.omega0 * (1.0 + self.offsets)

    @property
    def u(self):
        return self.omega0 * self.offsets

    @property
    def weights(self):
        """Trapezoid weights in omega (rad/s)."""
        du = np.diff(self.u)
        w = np.zeros(self.offsets.size)
        w[:-1] += 0.5 * du
        w[1:] += 0.5 * du
        return w

    def __len__(self):
        return self.offsets.size

    def with_offsets(self, extra):
        """Grid with additional nodes inside the current outer window."""
        extra = np.asarray(extra, dtype=float)
        lo, hi = self.offsets[0], self.offsets[-1]
        extra = extra[(extra > lo) & (extra < hi)]
        desc = dict(self.descriptor, n_extra=self.descriptor.get("n_extra", 0) + extra.size)
        return OmegaGrid(np.unique(np.concatenate([self.offsets, extra])), self.omega0, desc)


@dataclass(frozen=True)
class GridOptions:
    """Band rule and clustering of the omega grid.

    Below ``band_split`` (in units of k00) the clustering core spans
    ``core_halfwidths[0]``, above it ``core_halfwidths[1]``; nodes are
    ``core * sign(s)|s|**exponent`` for uniform ``s`` in [-1, 1].  When the
    core is narrower than ``outer_halfwidth``, half the nodes grade
    geometrically from the core edge out to ``outer_halfwidth``.
    """

    band_split: float = 2.5
    core_halfwidths: Sequence[float] = (1e-3, 1e-9)
    outer_halfwidth: float = 1e-3
    exponent: float = 4.0
    max_h_over_k00: float = 3.5
    cluster_poles: bool = True


def build_omega_grid(h_over_k00, omega0, n_points=100_000, options=GridOptions()):
    """Nonuniform omega grid for one transverse wavenumber."""
    if not 0.0 <= h_over_k00 < options.max_h_over_k00:
        raise CalibrationError(
            f"h/k00 = {h_over_k00:g} outside the calibrated range [0, {options.max_h_over_k00:g})")
    if n_points < 16:
        raise ValueError("n_points must be >= 16")
    core = options.core_halfwidths[0] if h_over_k00 < options.band_split else options.core_halfwidths[1]
    outer = max(options.outer_halfwidth, core)
    n_shell = n_points // 2 if core < outer else 0
    n_core = n_points - n_shell
    s = np.linspace(-1.0, 1.0, 2 * (n_core // 2) + 1)
    off = core * np.sign(s) * np.abs(s) ** options.exponent
    if n_shell:
        r = np.geomspace(core, outer, n_shell // 2 + 1)[1:]
        off = np.concatenate([off, r, -r])
    desc = {
        "window_halfwidth_rel": core,
        "outer_halfwidth_rel": outer,
        "exponent": options.exponent,
        "n_points": int(n_points),
    }
    return OmegaGrid(np.unique(off), float(omega0), desc)


def _material_offsets(model, omega0, offsets):
    if isinstance(model, DispersiveDNG):
        kap = model.kappa_offset(offsets)
        return kap, kap
    r = model.response(omega0 * (1.0 + offsets))
    return np.asarray(r.eps_r, dtype=complex), np.asarray(r.mu_r, dtype=complex)


def _den_complex(rel, h, geom, model, omega0):
    # factored T_TE denominator at complex relative offset
    k0 = omega0 * (1.0 + rel) / C0
    if isinstance(model, DispersiveDNG):
        eps = mu = model.kappa_offset(rel)
    else:
        r = model.response(omega0 * (1.0 + rel.real))
        eps, mu = complex(r.eps_r), complex(r.mu_r)
    g0 = np.sqrt(k0 * k0 - h * h)
    g0 = -g0 if g0.imag < 0 else g0
    g = np.sqrt(k0 * k0 * eps * mu - h * h)
    g = -g if g.imag < 0 else g
    a = eps * g0
    s, m = g + a, g - a
    P = k0 * k0 * eps * (mu - eps) + h * h * (eps - 1) * (eps + 1)
    if abs(s) >= abs(m):
        m = P / s
    else:
        s = P / m
    return s * s - m * m * np.exp(2j * g * geom.L)


def slab_mode_poles(h, geom, model, omega0, max_iter=80):
    """Complex relative-frequency poles of ``T_TE`` near ``omega0`` for ``|h| > k00``.

    These are the weakly damped slab modes that make the omega integrand
    sharply peaked; returns a list of complex offsets (possibly empty).
    """
    k00 = wavenumber(omega0)
    if not abs(h) > k00 * (1 + 1e-6):
        return []
    X = np.sqrt(h * h - k00 * k00)
    slope = getattr(model, "slope", 4.0)
    base = (4.0 / slope) * np.exp(-X * geom.L) / (2.0 * (1.0 + k00**2 / X**2))
    poles = []
    for sign in (1.0, -1.0):
        D = complex(sign * base)
        ok = False
        for _ in range(max_iter):
            step_h = 1e-7 * abs(D)
            f = _den_complex(D, h, geom, model, omega0)
            fp = (_den_complex(D + step_h, h, geom, model, omega0)
                  - _den_complex(D - step_h, h, geom, model, omega0)) / (2 * step_h)
            if fp == 0 or not np.isfinite(fp):
                break
            step = f / fp
            D = D - step
            # D enters as 1 + D, so its resolution is ~1e-16 absolute
            if abs(step) < max(1e-10 * abs(D), 1e-15):
                ok = True
                break
        if ok and np.isfinite(D) and abs(D.real) < 0.5:
            poles.append(complex(D))
    return poles


def pole_cluster_offsets(pole, n_inner=21, ratio=1.05):
    """Nodes resolving a Lorentzian of centre ``Re(pole)`` and width ``|Im(pole)|``."""
    c, w = pole.real, max(abs(pole.imag), 1e-18)
    inner = c + np.linspace(-1.0, 1.0, n_inner) * w
    r = w * ratio ** np.arange(1, 4000)
    r = r[r < abs(c) / 2]
    return np.concatenate([inner, c + r, c - r])


# ----------------------------------------------------------------------------
# time-domain spectrum
# ----------------------------------------------------------------------------


def _check_behind(z, geom):
    if not z > geom.d + geom.L:
        raise RegionError(f"z = {z:g} m must lie beyond the back face d + L = {geom.d + geom.L:g} m")


def _nudge_branch(h, k00, exclusion=None):
    exclusion = 1e-9 * k00 / (2 * np.pi) if exclusion is None else exclusion
    if abs(abs(h) - k00) < exclusion:
        return np.sign(h or 1.0) * (k00 + exclusion)
    return h


def grid_for(h, geom, model, omega0, n_points=100_000, options=GridOptions()):
    """Omega grid for ``W(h)``: band rule plus slab-mode pole clusters."""
    k00 = wavenumber(omega0)
    grid = build_omega_grid(abs(h) / k00, omega0, n_points, options)
    if options.cluster_poles:
        extra = [pole_cluster_offsets(p) for p in slab_mode_poles(abs(h), geom, model, omega0)]
        if extra:
            grid = grid.with_offsets(np.concatenate(extra))
    return grid


def analytic_spectrum_W(h, z, t, geom, model, window, grid=None, *, E0=1.0,
                        n_points=100_000, options=GridOptions()):
    """Analytic-signal time-domain plane-wave spectrum ``W(h, z, t)``.

    ``W = 2 E0 c integral_0^inf (V/omega) T_TE e^{i gamma0 z} e^{-i omega t} d omega``
    with ``V`` the sine-window spectrum.  ``t`` may be an array; the omega
    samples are shared across times.  Normalization: ``W -> E0/k00`` for the
    steady-state propagating field at ``h = 0``.
    """
    if not isinstance(window, SineWindow):
        raise TypeError("analytic_spectrum_W needs a SineWindow")
    if not isinstance(model, MaterialModel):
        raise TypeError("model must be a MaterialModel")
    _check_behind(z, geom)
    omega0 = window.omega0
    k00 = wavenumber(omega0)
    h = _nudge_branch(float(h), k00)
    if grid is None:
        grid = grid_for(h, geom, model, omega0, n_points, options)
    off = grid.offsets
    u = grid.u
    omega = omega0 + u
    eps, mu = _material_offsets(model, omega0, off)
    G = kernels.slab_spectrum(omega / C0, h, eps, mu, geom.d, geom.L, z)
    if not np.all(np.isfinite(G)):
        bad = omega[~np.isfinite(G)][0]
        raise NonFiniteError(f"non-finite T_TE at omega = {bad:.17g} rad/s (h = {h:.17g} rad/m)")
    g = G / omega
    Te = window.Te
    phase2 = np.exp(2j * Te * omega0)
    u_s = 0.05 / Te
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    out = np.empty(ts.size, dtype=complex)
    pref = 2.0 * E0 * C0 / (4 * np.pi)
    for i, ti in enumerate(ts):
        br = kernels.w_bracket(u, g, ti, Te - ti, phase2, 2 * omega0, u_s)
        out[i] = pref * np.exp(-1j * omega0 * ti) * br
    return complex(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def spectrum_W_many(hs, z, t, geom, model, window, *, E0=1.0, n_points=100_000,
                    options=GridOptions(), threads=1):
    """``W`` at many ``h`` (rows) and times (columns); parallel over ``h``.

    Each row is computed independently and stored by index, so the result
    does not depend on the thread count.
    """
    hs = np.asarray(hs, dtype=float)
    ts = np.atleast_1d(np.asarray(t, dtype=float))

    def one(hi):
        return analytic_spectrum_W(hi, z, ts, geom, model, window, E0=E0,
                                   n_points=n_points, options=options)

    out = np.empty((hs.size, ts.size), dtype=complex)
    if threads <= 1:
        for i, hi in enumerate(hs):
            out[i] = one(hi)
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            for i, row in enumerate(ex.map(one, hs)):
                out[i] = row
    return out


@dataclass(frozen=True)
class AnalyticSignalSample:
    """Complex analytic-signal values; the physical field is ``value.real``."""

    value: np.ndarray
    location: np.ndarray
    z: float
    t: np.ndarray

    @property
    def physical(self):
        return np.real(self.value)


@dataclass(frozen=True)
class OuterSpec:
    """Outer ``h`` quadrature: Gauss-Legendre panels (16 nodes each)."""

    h_max_over_k00: float = 3.5
    n_prop_panels: int = 2
    n_ev_panels: int = 8


def time_domain_field(x, z, t, geom, model, window, spec=OuterSpec(), *, sources=(0.0,),
                      E0=1.0, n_points=100_000, options=GridOptions(), threads=1,
                      return_spectrum=False):
    """Analytic-signal field ``(1/2pi) integral W(h) sum_s e^{ih(x - x_s)} dh``.

    ``sources`` are the ``x`` positions of identical line sources at ``z = 0``.
    Returns an :class:`AnalyticSignalSample` whose ``value`` has shape
    ``(len(t), len(x))`` (or ``(len(x),)`` for scalar ``t``).
    """
    _check_behind(z, geom)
    k00 = wavenumber(window.omega0)
    H = spec.h_max_over_k00 * k00
    hn, wn = spectral_nodes(k00, H, spec.n_prop_panels, spec.n_ev_panels)
    Wh = spectrum_W_many(hn, z, t, geom, model, window, E0=E0, n_points=n_points,
                         options=options, threads=threads)
    x = np.asarray(x, dtype=float)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.zeros((ts.size,) + x.shape, dtype=complex)
    for j in range(ts.size):
        for xs in sources:
            vals[j] += kernels.cos_transform(hn, wn * Wh[:, j], x - xs) / np.pi
    if np.ndim(t) == 0:
        vals = vals[0]
    sample = AnalyticSignalSample(vals, x, float(z), ts)
    if return_spectrum:
        return sample, (hn, wn, Wh)
    return sample


# ----------------------------------------------------------------------------
# asymptotics
# ----------------------------------------------------------------------------


def h_t(t, omega0, geom, region=Region.BEYOND_2L):
    """On-time-limited truncation wavenumber.

    ``sqrt((ln(f0 t)/L)**2 + k00**2)`` beyond ``z = 2L`` and
    ``sqrt((2 ln(f0 t)/(d + L))**2 + k00**2)`` between the back face and 2L.
    """
    f0t = omega0 * t / (2 * np.pi)
    if not f0t > np.e:
        raise ValueError(f"f0*t = {f0t:.3g} must exceed e for the asymptotic truncation")
    k00 = wavenumber(omega0)
    ln = np.log(f0t)
    zt = ln / geom.L if region is Region.BEYOND_2L else 2 * ln / (geom.d + geom.L)
    return TruncationWavenumber(float(np.hypot(zt, k00)), region, "time", float(t))


def asymptotic_field_time(x, z, t, E0, omega0, L, d=None):
    """Large-time field between the back face and 2L: the loss asymptote with
    ``1/delta`` replaced by ``tau = f0 t``, times ``e^{-i omega0 t}``."""
    tau = omega0 * t / (2 * np.pi)
    if not tau > 1.0:
        raise ValueError("need f0*t > 1")
    return asymptotic_divergent_field(x, z, 1.0 / tau, E0, omega0, L, d) * np.exp(-1j * omega0 * t)


def i_integral_oracle(uzeta, z, t0, omega0, L, ux=0.0, t=0.0, n_per_period=8, span=40.0):
    """Direct principal-value quadrature of the evanescent time integral and its
    closed-form logarithmic approximation; returns ``(direct, closed)``.

    In ``D = (omega - omega0)/omega0`` the integrand is
    ``sin(omega0 t0 D)/D * e^{i omega0 (1+D)(ux - t) - (1+D) X z}
    / (e^{-2(1+D) X L} - 4 D**2)`` with ``X = omega0 uzeta``.  The two real
    poles are removed analytically (principal value).
    """
    X = omega0 * uzeta
    a0 = omega0 * t0

    def num(D):
        return (a0 * _sinc_rad(a0 * D)) * np.exp(1j * omega0 * (1 + D) * (ux - t) - (1 + D) * X * z)

    def den(D):
        return np.exp(-2 * (1 + D) * X * L) - 4 * D * D

    def dden(D):
        return -2 * X * L * np.exp(-2 * (1 + D) * X * L) - 8 * D

    poles = [optimize.brentq(lambda D: den(D), 1e-300, 0.5 + 1e-9, xtol=1e-300),
             optimize.brentq(lambda D: den(D), -1.0, -1e-300, xtol=1e-300)]
    res = [num(p) / dden(p) for p in poles]
    a, b = -1.0, span
    # panels fine enough for the sin(a0 D) oscillation
    n_pan = int(np.ceil((b - a) * a0 / (2 * np.pi) * n_per_period / 16)) + 1
    edges = np.unique(np.concatenate([np.linspace(a, b, n_pan + 1), poles]))
    gx, gw = np.polynomial.legendre.leggauss(16)
    lo, hi = edges[:-1, None], edges[1:, None]
    Dn = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gx[None, :]
    f = num(Dn) / den(Dn) - sum(r / (Dn - p) for r, p in zip(res, poles))
    total = np.sum(0.5 * (hi - lo) * f * gw[None, :])
    for r, p in zip(res, poles):
        total += r * np.log(abs((b - p) / (a - p)))
    q = a0 / (2 * np.pi) * np.exp(-X * L)
    closed = (-a0 / 4 * np.exp(1j * omega0 * (ux - t) - X * (z - L))
              * np.log(abs((1 - q) / (1 + q))))
    return complex(total), complex(closed)
