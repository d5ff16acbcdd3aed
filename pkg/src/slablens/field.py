"""Plane-wave-spectrum quadrature, closed-form image fields and region maps.

All spectral integrals are even in ``h`` and are evaluated as
``(1/pi) * integral_0^H F(h) cos(h x) dh``.  The integration variable is
``h = k sin(theta)`` below the branch point and ``h = k cosh(xi)`` above it,
so ``dh/gamma0`` becomes ``d theta`` and ``-i d xi`` and no node sits on
``h = k``.
"""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

from . import kernels
from .core import Z0, MaterialResponse, wavenumber
from .errors import ConvergenceError, RegionError
from .spectrum import line_source_spectrum

_GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


class Strategy(enum.Enum):
    UNIFORM_TRAPEZOID = "uniform_trapezoid"
    ADAPTIVE_PANELS = "adaptive_panels"


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the ``h`` integrals.

    ``h_max=None`` selects ``12 k00`` extended until the integrand has decayed
    below ``rel_tol`` of its peak.  ``n_base`` is the node count per segment
    (propagating and evanescent) of the first pass.
    """

    h_max: Optional[float] = None
    n_base: int = 64
    strategy: Strategy = Strategy.ADAPTIVE_PANELS
    rel_tol: float = 1e-8
    branch_point_exclusion: Optional[float] = None
    max_refinements: int = 10

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError("rel_tol must lie in (0, 1e-2]")
        if self.n_base < 2:
            raise ValueError("n_base must be >= 2")
        if isinstance(self.strategy, str):
            object.__setattr__(self, "strategy", Strategy(self.strategy))

    def checked_h_max(self, k00):
        if self.h_max is not None and not self.h_max > k00:
            raise ValueError(f"h_max = {self.h_max:g} must exceed k00 = {k00:g}")
        return self.h_max

    def exclusion(self, k00):
        if self.branch_point_exclusion is not None:
            return float(self.branch_point_exclusion)
        return 1e-9 * k00 / (2 * np.pi)


# ----------------------------------------------------------------------------
# node construction
# ----------------------------------------------------------------------------


def _gl_panels(a, b, n_panels):
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return t, w


def _trap_panels(a, b, n):
    t = np.linspace(a, b, n + 1)
    w = np.full(n + 1, (b - a) / n)
    w[0] *= 0.5
    w[-1] *= 0.5
    return t, w


def spectral_nodes(k, H, n_prop, n_ev, *, inv_gamma0=False, rule="gauss", exclusion=0.0):
    """Nodes ``h`` and complex weights for ``integral_0^H f(h) dh`` (or ``dh/gamma0``).

    ``rule="gauss"`` uses ``n_prop``/``n_ev`` Gauss-Legendre panels of order 16
    on the two segments; ``rule="trapezoid"`` uses that many uniform intervals.
    Nodes closer than ``exclusion`` to the branch point are moved off it.
    """
    make = _gl_panels if rule == "gauss" else _trap_panels
    th_max = np.pi / 2 if H >= k else np.arcsin(H / k)
    th, wt = make(0.0, th_max, n_prop)
    h1 = k * np.sin(th)
    w1 = wt + 0j if inv_gamma0 else k * np.cos(th) * wt + 0j
    hs, ws = [h1], [w1]
    if H > k and n_ev > 0:
        xi, wx = make(0.0, np.arccosh(H / k), n_ev)
        h2 = k * np.cosh(xi)
        w2 = -1j * wx if inv_gamma0 else k * np.sinh(xi) * wx + 0j
        hs.append(h2)
        ws.append(w2)
    h = np.concatenate(hs)
    w = np.concatenate(ws)
    if exclusion > 0:
        near = np.abs(h - k) < exclusion
        h = np.where(near, np.where(h <= k, k - exclusion, k + exclusion), h)
    return h, w


def _initial_panels(k, H, xmax, z, n_base):
    per = max(1, n_base // _GL_ORDER)
    osc = (H * xmax + k * z) / np.pi
    n_prop = max(per, int(np.ceil(0.5 * (k * (xmax + z)) / np.pi)) + 1)
    n_ev = max(per, int(np.ceil(0.5 * osc)) + 1) if H > k else 0
    return n_prop, n_ev


def spectral_integral(F, k, H, x, spec, *, z_scale=0.0, inv_gamma0=False):
    """``integral_0^H F(h) cos(h x) dh`` (or ``dh/gamma0``) over an array of ``x``.

    ``F`` maps an array of ``h`` to complex values.  Returns ``(value, err)``.
    Adaptive: panel counts double until successive results agree to
    ``rel_tol`` of the peak magnitude, else :class:`ConvergenceError`.
    Uniform: trapezoid with ``n_base`` intervals per segment and the
    difference to the half-resolution rule as the error bound.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xmax = float(np.max(np.abs(x))) if x.size else 0.0
    excl = spec.exclusion(k)

    def run(n_prop, n_ev, rule):
        h, w = spectral_nodes(k, H, n_prop, n_ev, inv_gamma0=inv_gamma0, rule=rule, exclusion=excl)
        vals = np.asarray(F(h), dtype=complex)
        if not np.all(np.isfinite(vals)):
            bad = h[~np.isfinite(vals)][0]
            raise ConvergenceError(f"non-finite integrand at h = {bad:.17g} rad/m")
        return kernels.cos_transform(h, w * vals, x)

    if spec.strategy is Strategy.UNIFORM_TRAPEZOID:
        n = spec.n_base + (spec.n_base % 2)
        fine = run(n, n, "trapezoid")
        coarse = run(n // 2, n // 2, "trapezoid")
        return fine, np.abs(fine - coarse)

    n_prop, n_ev = _initial_panels(k, H, xmax, z_scale, spec.n_base)
    prev = run(n_prop, n_ev, "gauss")
    err = None
    for _ in range(spec.max_refinements):
        n_prop, n_ev = 2 * n_prop, 2 * n_ev
        cur = run(n_prop, n_ev, "gauss")
        err = np.abs(cur - prev)
        scale = np.max(np.abs(cur))
        if np.max(err) <= spec.rel_tol * scale or scale == 0.0:
            return cur, err
        prev = cur
    raise ConvergenceError(
        f"h quadrature did not reach rel_tol={spec.rel_tol:g} "
        f"(last error {np.max(err):.3g} on scale {np.max(np.abs(prev)):.3g})",
        estimate=prev, error=err)


def _scalarize(x_in, val):
    return complex(val[0]) if np.ndim(x_in) == 0 else val.reshape(np.shape(x_in))


def _auto_h_max(F, k, rel_tol, cap=300.0):
    H = 12.0 * k
    while True:
        hs = np.linspace(0.0, H, 513)[1:]
        mags = np.abs(F(hs))
        peak = np.max(mags)
        if mags[-1] <= rel_tol * peak:
            return H
        if H >= cap * k:
            raise ConvergenceError(
                f"spectrum has not decayed by h = {H / k:.0f} k00; give an explicit h_max",
                estimate=None)
        H *= 1.5


# ----------------------------------------------------------------------------
# fields
# ----------------------------------------------------------------------------


def _material_arrays(model, omega):
    r = model.response(omega)
    return complex(r.eps_r), complex(r.mu_r)


def evaluate_field(omega, x, z, geom, model, spec=QuadratureSpec(), E0=1.0, return_error=False):
    """Time-harmonic field ``E_x(x, z)`` of a line source at the origin.

    The slab occupies ``d < z < d + L``; ``model`` is a material model or a
    :class:`MaterialResponse`.  ``x`` may be an array.
    """
    if not z > 0:
        raise ValueError("z must be positive")
    k = wavenumber(omega)
    if isinstance(model, MaterialResponse):
        eps, mu = complex(model.eps_r), complex(model.mu_r)
    else:
        eps, mu = _material_arrays(model, omega)
    d, L = geom.d, geom.L

    def F(h):
        return kernels.slab_spectrum(k, h, eps, mu, d, L, z)

    H = spec.checked_h_max(k)
    if H is None:
        H = _auto_h_max(F, k, spec.rel_tol)
    val, err = spectral_integral(F, k, H, x, spec, z_scale=z)
    T0 = line_source_spectrum(E0, omega)
    val, err = val * T0 / np.pi, err * abs(T0) / np.pi
    out = _scalarize(x, val)
    if return_error:
        return out, (float(err[0]) if np.ndim(x) == 0 else err.reshape(np.shape(x)))
    return out


def incident_field(omega, x, z, E0=1.0, spec=QuadratureSpec()):
    """Free-space field of the line source, ``(T0/2pi) integral e^{i(hx + g0 z)} dh``."""
    if not z > 0:
        raise ValueError("z must be positive")
    k = wavenumber(omega)

    def F(h):
        r = (k - h) * (k + h)
        g0 = np.where(r >= 0, np.sqrt(np.abs(r)) + 0j, 1j * np.sqrt(np.abs(r)))
        return np.exp(1j * g0 * z)

    H = spec.checked_h_max(k)
    if H is None:
        H = _auto_h_max(F, k, spec.rel_tol)
    val, _ = spectral_integral(F, k, H, x, spec, z_scale=z)
    return _scalarize(x, val * line_source_spectrum(E0, omega) / np.pi)


def incident_field_exact(omega, x, z, E0=1.0):
    """Closed form ``(i E0/2)(z/rho) H1(k rho)`` of the untruncated incident field."""
    k = wavenumber(omega)
    rho = np.hypot(x, z)
    return 0.5j * E0 * (z / rho) * special.hankel1(1, k * rho)


def truncated_image_field(omega0, x, z_rel, H, E0=1.0, spec=QuadratureSpec()):
    """``(1/2pi) integral_{-H}^{H} T0 e^{i(hx + gamma0 z_rel)} dh``.

    The free-space spectrum truncated at ``H`` and shifted by ``z_rel``
    (``z - 2L`` behind a -1 slab); ``z_rel`` may be negative.
    """
    k = wavenumber(omega0)
    H = float(H)
    if not H > k:
        raise ValueError("H must exceed k00")

    def F(h):
        r = (k - h) * (k + h)
        g0 = np.where(r >= 0, np.sqrt(np.abs(r)) + 0j, 1j * np.sqrt(np.abs(r)))
        return np.exp(1j * g0 * z_rel)

    val, _ = spectral_integral(F, k, H, x, spec, z_scale=abs(z_rel))
    return _scalarize(x, val * line_source_spectrum(E0, omega0) / np.pi)


def _sinc_part(x, H):
    x = np.asarray(x, dtype=float)
    Hx = H * x
    small = np.abs(Hx) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, H * (1.0 - Hx**2 / 6.0), np.sin(Hx) / xs)


def sinc_image(x, H, E0, omega0):
    """``(E0/(pi k00)) sin(H x)/x`` field just behind ``z = 2L``."""
    H = float(H)
    k00 = wavenumber(omega0)
    if H < k00 * (1 - 1e-12):
        raise ValueError("H must be >= k00")
    out = E0 / (np.pi * k00) * _sinc_part(x, H)
    return float(out) if out.ndim == 0 else out


def two_source_image(x, D, H, E0, omega0):
    """Sum of two sinc images of sources at ``x = -D/2`` and ``x = +D/2``."""
    if not D >= 0:
        raise ValueError("separation D must be >= 0")
    x = np.asarray(x, dtype=float)
    return sinc_image(x - D / 2, H, E0, omega0) + sinc_image(x + D / 2, H, E0, omega0)


def hy_image(x, H, E0, omega0, spec=QuadratureSpec()):
    """``H_y = E0/(2 pi Z0) integral_{-H}^{H} e^{ihx}/gamma0 dh`` behind ``z = 2L``.

    Real for ``H <= k00``; the evanescent part contributes an imaginary part.
    Equals ``E0 J0(k00 x)/(2 Z0)`` at ``H = k00``.
    """
    H = float(H)
    k = wavenumber(omega0)
    if H < k * (1 - 1e-12):
        raise ValueError("H must be >= k00")
    H = max(H, k)
    val, _ = spectral_integral(lambda h: np.ones_like(h, dtype=complex), k, H, x, spec,
                               inv_gamma0=True)
    return _scalarize(x, val * E0 / (np.pi * Z0))


# ----------------------------------------------------------------------------
# region maps
# ----------------------------------------------------------------------------


class FieldRegion(enum.Enum):
    INCIDENT = "incident"
    IMAGE = "image"
    BOUNDED = "bounded"
    DIVERGENT_INNER = "divergent_inner"
    DIVERGENT_OUTER = "divergent_outer"
    PERFECT_IMAGE = "perfect_image"


@dataclass(frozen=True)
class RegionTag:
    """Region of the -1 slab solution; ``equivalent_z`` locates the free-space
    field that is replicated there (``None`` when no replica applies)."""

    kind: FieldRegion
    equivalent_z: Optional[float] = None


def region_map(geom, z, limit="lossless"):
    """Tag ``z`` with its row of the -1 slab field map.

    ``limit="lossless"`` is the zero-loss map (needs ``d < L``);
    ``limit="lossy"`` is the vanishing-loss map (needs ``L/2 < d < L``).
    """
    d, L = geom.d, geom.L
    if not z > 0:
        raise ValueError("z must be positive")
    if limit == "lossless":
        if not d < L:
            raise RegionError("the lossless region map assumes d < L")
        if z <= d:
            return RegionTag(FieldRegion.INCIDENT, z)
        if z < 2 * d:
            return RegionTag(FieldRegion.IMAGE, 2 * d - z)
        if z < 2 * L:
            return RegionTag(FieldRegion.DIVERGENT_OUTER)
        return RegionTag(FieldRegion.PERFECT_IMAGE, z - 2 * L)
    if limit == "lossy":
        if not L / 2 < d < L:
            raise RegionError("the vanishing-loss region map assumes L/2 < d < L")
        if z < 2 * d - L:
            return RegionTag(FieldRegion.BOUNDED)
        if z < L:
            return RegionTag(FieldRegion.DIVERGENT_INNER)
        if z < 2 * d:
            return RegionTag(FieldRegion.BOUNDED)
        if z < 2 * L:
            return RegionTag(FieldRegion.DIVERGENT_OUTER)
        return RegionTag(FieldRegion.PERFECT_IMAGE, z - 2 * L)
    raise ValueError(f"unknown limit {limit!r}")


# ----------------------------------------------------------------------------
# field grids
# ----------------------------------------------------------------------------


@dataclass
class FieldGrid:
    """Field samples ``values[iz, ix]`` with one region tag per ``z`` row."""

    x: np.ndarray
    z: np.ndarray
    values: np.ndarray
    regions: list = field(default_factory=list)


def field_grid(omega, x, z, geom, model, spec=QuadratureSpec(), E0=1.0, limit="lossless"):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    values = np.empty((z.size, x.size), dtype=complex)
    regions = []
    for i, zi in enumerate(z):
        values[i] = evaluate_field(omega, x, zi, geom, model, spec, E0)
        try:
            regions.append(region_map(geom, zi, limit))
        except RegionError:
            regions.append(None)
    return FieldGrid(x, z, values, regions)


_D2_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def helmholtz_residual(grid, omega):
    """``max |(lap + k0**2) E| / (k0**2 max |E|)`` on the grid interior.

    Uses the five-point fourth-order second-difference stencil along each
    axis.  Spacing must be uniform and at most ``lambda0/40``.
    """
    x = np.asarray(grid.x, dtype=float)
    z = np.asarray(grid.z, dtype=float)
    E = np.asarray(grid.values)
    k = wavenumber(omega)
    lam = 2 * np.pi / k
    if x.size < 5 or z.size < 5:
        raise ValueError("need at least 5 samples along each axis")
    dx, dz = np.diff(x), np.diff(z)
    for name, dv in (("x", dx), ("z", dz)):
        if np.ptp(dv) > 1e-9 * abs(dv[0]):
            raise ValueError(f"{name} spacing is not uniform")
        if abs(dv[0]) > lam / 40 * (1 + 1e-12):
            raise ValueError(f"{name} spacing {abs(dv[0]):.3g} m exceeds lambda0/40")
    hx, hz = dx[0], dz[0]
    c = _D2_STENCIL
    inner = E[2:-2, 2:-2]
    lap = sum(c[j] * E[2:-2, j:E.shape[1] - 4 + j] for j in range(5)) / hx**2
    lap = lap + sum(c[j] * E[j:E.shape[0] - 4 + j, 2:-2] for j in range(5)) / hz**2
    return float(np.max(np.abs(lap + k * k * inner)) / (k * k * np.max(np.abs(E))))
