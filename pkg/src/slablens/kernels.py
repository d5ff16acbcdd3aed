"""Hot numerical kernels, each with a numba and a numpy implementation.

The public functions here dispatch on :func:`slablens._accel.get_backend`.
Both implementations evaluate the same formulas; the test-suite checks them
against each other.

Slab spectrum
-------------
With ``g0 = gamma0``, ``g = gamma``, ``a = eps*g0``, ``s = g + a``,
``m = g - a`` and ``E = exp(2i g L)``, the transmission coefficient is

    T_TE = 4 g a exp(i(g - g0)L) / (s**2 - m**2 E).

``s*m`` has the cancellation-free form ``k0**2 eps (mu - eps) +
h**2 (eps - 1)(eps + 1)``, so the smaller of ``s`` and ``m`` is recovered
from it.  This form never overflows and keeps full relative accuracy when
``s`` or ``m`` is tiny (the nearly matched -1 slab).
"""

import cmath
import math

import numpy as np

from ._accel import get_backend, njit

_N_SERIES = 25


# ----------------------------------------------------------------------------
# slab spectrum
# ----------------------------------------------------------------------------


@njit(cache=True)
def _cexpm1(w):
    x = w.real
    y = w.imag
    sy = math.sin(0.5 * y)
    return complex(math.expm1(x) * math.cos(y) - 2.0 * sy * sy, math.exp(x) * math.sin(y))


@njit(cache=True)
def _slab_radicand(k0, h, n2, r0):
    # k0^2 n2 - h^2, in the form with the smaller rounding bound
    k2 = k0 * k0
    if abs(n2 - 1.0) * k2 + abs(r0) <= abs(n2) * k2 + h * h:
        return k2 * (n2 - 1.0) + r0
    return k2 * n2 - h * h


@njit(cache=True)
def _spectrum_scalar(k0, h, eps, mu, d, L, z):
    r0 = (k0 - h) * (k0 + h)
    if r0 >= 0.0:
        g0 = complex(math.sqrt(r0), 0.0)
    else:
        g0 = complex(0.0, math.sqrt(-r0))
    g = cmath.sqrt(_slab_radicand(k0, h, eps * mu, r0))
    if g.imag < 0.0:
        g = -g
    elif g.imag == 0.0 and eps.real < 0.0 and mu.real < 0.0:
        g = -g
    a = eps * g0
    if g == 0.0:
        if z >= d + L:
            return 4.0 * cmath.exp(1j * g0 * (z - L)) / (4.0 - 2j * L * a)
        if z >= d:
            return 2.0 * cmath.exp(1j * g0 * d) / (2.0 - 1j * L * a)
        return cmath.exp(1j * g0 * z) + cmath.exp(1j * g0 * (2.0 * d - z)) * (
            1j * L * a / (2.0 - 1j * L * a))
    s = g + a
    m = g - a
    P = k0 * k0 * eps * (mu - eps) + h * h * (eps - 1.0) * (eps + 1.0)
    if abs(s) >= abs(m):
        m = P / s
    else:
        s = P / m
    E = cmath.exp(2j * g * L)
    den = s * s - m * m * E
    if z >= d + L:
        return 4.0 * g * a * cmath.exp(1j * ((g - g0) * L + g0 * z)) / den
    if z >= d:
        return 2.0 * g * (s * cmath.exp(1j * (g0 * d + g * (z - d)))
                          - m * cmath.exp(1j * (g0 * d + g * (2.0 * L + d - z)))) / den
    return cmath.exp(1j * g0 * z) - cmath.exp(1j * g0 * (2.0 * d - z)) * P * _cexpm1(2j * g * L) / den


@njit(cache=True)
def _spectrum_loop(k0, h, eps, mu, d, L, z, out):
    for i in range(out.shape[0]):
        out[i] = _spectrum_scalar(k0[i], h[i], eps[i], mu[i], d, L, z)


def _cexpm1_np(w):
    x, y = w.real, w.imag
    return np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2 + 1j * np.exp(x) * np.sin(y)


def wavenumbers_np(k0, h, eps, mu):
    """Branch-correct ``(gamma0, gamma)`` for broadcastable arrays."""
    k0 = np.asarray(k0, dtype=float)
    h = np.asarray(h, dtype=float)
    eps = np.asarray(eps, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    r0 = (k0 - h) * (k0 + h)
    sq = np.sqrt(np.abs(r0))
    g0 = np.where(r0 >= 0.0, sq + 0j, 1j * sq)
    n2 = eps * mu
    k2 = k0 * k0
    # pick the form with the smaller rounding bound
    split = np.abs(n2 - 1.0) * k2 + np.abs(r0) <= np.abs(n2) * k2 + h * h
    g = np.sqrt(np.where(split, k2 * (n2 - 1.0) + r0, k2 * n2 - h * h) + 0j)
    flip = (g.imag < 0.0) | ((g.imag == 0.0) & (eps.real < 0.0) & (mu.real < 0.0))
    g = np.where(flip, -g, g)
    return g0, g


def _spectrum_np(k0, h, eps, mu, d, L, z):
    g0, g = wavenumbers_np(k0, h, eps, mu)
    eps = np.asarray(eps, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    a = eps * g0
    s = g + a
    m = g - a
    P = k0 * k0 * eps * (mu - eps) + h * h * (eps - 1.0) * (eps + 1.0)
    big = np.abs(s) >= np.abs(m)
    zero = g == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        s, m = np.where(big, s, P / m), np.where(big, P / s, m)
        E = np.exp(2j * g * L)
        den = s * s - m * m * E
        if z >= d + L:
            val = 4.0 * g * a * np.exp(1j * ((g - g0) * L + g0 * z)) / den
            lim = 4.0 * np.exp(1j * g0 * (z - L)) / (4.0 - 2j * L * a)
        elif z >= d:
            val = 2.0 * g * (s * np.exp(1j * (g0 * d + g * (z - d)))
                             - m * np.exp(1j * (g0 * d + g * (2.0 * L + d - z)))) / den
            lim = 2.0 * np.exp(1j * g0 * d) / (2.0 - 1j * L * a)
        else:
            refl = np.exp(1j * g0 * (2.0 * d - z))
            val = np.exp(1j * g0 * z) - refl * P * _cexpm1_np(2j * g * L) / den
            lim = np.exp(1j * g0 * z) + refl * (1j * L * a / (2.0 - 1j * L * a))
    return np.where(zero, lim, val)


def slab_spectrum(k0, h, eps, mu, d, L, z):
    """Spectral field factor ``F(h, z)`` per unit incident amplitude.

    The plane-wave field of a source at the origin is
    ``E(x, z) = (T0/2pi) * integral F(h, z) exp(ihx) dh``, with
    ``F = exp(i g0 z) + (R0/T0) exp(-i g0 z)`` for ``z < d``, the slab
    standing wave for ``d <= z < d+L``, and ``T_TE exp(i g0 z)`` beyond.
    ``k0``, ``h``, ``eps``, ``mu`` broadcast; ``d``, ``L``, ``z`` are scalars.
    """
    k0, h, eps, mu = np.broadcast_arrays(
        np.asarray(k0, dtype=float), np.asarray(h, dtype=float),
        np.asarray(eps, dtype=complex), np.asarray(mu, dtype=complex))
    d, L, z = float(d), float(L), float(z)
    if get_backend() == "numpy":
        return np.asarray(_spectrum_np(k0, h, eps, mu, d, L, z), dtype=complex)
    shape = k0.shape
    out = np.empty(k0.size, dtype=complex)
    _spectrum_loop(np.ascontiguousarray(k0).ravel(), np.ascontiguousarray(h).ravel(),
                   np.ascontiguousarray(eps).ravel(), np.ascontiguousarray(mu).ravel(),
                   d, L, z, out)
    return out.reshape(shape)


# ----------------------------------------------------------------------------
# Filon-trapezoid panels for the time-domain omega integral
# ----------------------------------------------------------------------------


@njit(cache=True)
def _phi_scalar(th):
    # (int_0^1 (1-s) e^{i th s} ds, int_0^1 s e^{i th s} ds)
    if abs(th) < 1.0:
        it = 1j * th
        term = 1.0 + 0j
        p0 = 0j
        p1 = 0j
        for n in range(_N_SERIES):
            p0 += term / (n + 1)
            p1 += term / (n + 2)
            term = term * it / (n + 1)
        return p0 - p1, p1
    e = cmath.exp(1j * th)
    e0 = (e - 1.0) / (1j * th)
    e1 = e / (1j * th) + (e - 1.0) / (th * th)
    return e0 - e1, e1


def _phi_np(th):
    th = np.asarray(th, dtype=float)
    small = np.abs(th) < 1.0
    ts = np.where(small, th, 0.0)
    tl = np.where(small, 1.0, th)
    it = 1j * ts
    term = np.ones_like(it)
    p0 = np.zeros_like(it)
    p1 = np.zeros_like(it)
    for n in range(_N_SERIES):
        p0 += term / (n + 1)
        p1 += term / (n + 2)
        term = term * it / (n + 1)
    e = np.exp(1j * tl)
    e0 = (e - 1.0) / (1j * tl)
    e1 = e / (1j * tl) + (e - 1.0) / tl**2
    return np.where(small, p0 - p1, e0 - e1), np.where(small, p1, e1)


@njit(cache=True)
def _kappa_scalar(u, alpha, beta):
    # (exp(i beta u) - exp(-i alpha u))/u without cancellation
    if u == 0.0:
        return 1j * (alpha + beta)
    half = 0.5 * (alpha + beta) * u
    return cmath.exp(0.5j * (beta - alpha) * u) * 2j * math.sin(half) / u


@njit(cache=True)
def _w_bracket_nb(u, g, alpha, beta, phase2, two_w0, u_s):
    n = u.shape[0]
    acc = 0j
    for j in range(n - 1):
        du = u[j + 1] - u[j]
        ua = u[j]
        ub = u[j + 1]
        if abs(ua) <= u_s and abs(ub) <= u_s:
            acc += 0.5 * du * (g[j] * _kappa_scalar(ua, alpha, beta)
                               + g[j + 1] * _kappa_scalar(ub, alpha, beta))
        else:
            a0 = g[j] / ua
            a1 = g[j + 1] / ub
            f0, f1 = _phi_scalar(beta * du)
            acc += du * cmath.exp(1j * beta * ua) * (a0 * f0 + a1 * f1)
            f0, f1 = _phi_scalar(-alpha * du)
            acc -= du * cmath.exp(-1j * alpha * ua) * (a0 * f0 + a1 * f1)
        b0 = g[j] / (two_w0 + ua)
        b1 = g[j + 1] / (two_w0 + ub)
        f0, f1 = _phi_scalar(beta * du)
        acc -= phase2 * du * cmath.exp(1j * beta * ua) * (b0 * f0 + b1 * f1)
        f0, f1 = _phi_scalar(-alpha * du)
        acc += du * cmath.exp(-1j * alpha * ua) * (b0 * f0 + b1 * f1)
    return acc


def _filon_np(u, A, a):
    du = np.diff(u)
    f0, f1 = _phi_np(a * du)
    return np.sum(du * np.exp(1j * a * u[:-1]) * (A[:-1] * f0 + A[1:] * f1))


def _w_bracket_np(u, g, alpha, beta, phase2, two_w0, u_s):
    inner_node = np.abs(u) <= u_s
    inner_panel = inner_node[:-1] & inner_node[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        half = 0.5 * (alpha + beta) * u
        safe = np.where(u == 0.0, 1.0, u)
        kap = np.where(u == 0.0, 1j * (alpha + beta),
                       np.exp(0.5j * (beta - alpha) * u) * 2j * np.sin(half) / safe)
    du = np.diff(u)
    f = g * kap
    trap = np.sum(np.where(inner_panel, 0.5 * du * (f[:-1] + f[1:]), 0.0))
    outer = ~inner_panel
    A1 = g / safe
    fb0, fb1 = _phi_np(beta * du)
    fa0, fa1 = _phi_np(-alpha * du)
    eb = np.exp(1j * beta * u[:-1])
    ea = np.exp(-1j * alpha * u[:-1])
    fil1 = du * (eb * (A1[:-1] * fb0 + A1[1:] * fb1) - ea * (A1[:-1] * fa0 + A1[1:] * fa1))
    A2 = g / (two_w0 + u)
    fil2 = du * (-phase2 * eb * (A2[:-1] * fb0 + A2[1:] * fb1) + ea * (A2[:-1] * fa0 + A2[1:] * fa1))
    return trap + np.sum(np.where(outer, fil1, 0.0)) + np.sum(fil2)


def w_bracket(u, g, alpha, beta, phase2, two_w0, u_s):
    """Panel sum of the bracketed omega integrand of the windowed spectrum.

    Computes the integral over ``u = omega - omega0`` of

        g(u) [(e^{i beta u} - e^{-i alpha u})/u
              - (phase2 e^{i beta u} - e^{-i alpha u})/(2 omega0 + u)]

    with ``g`` sampled on the sorted nodes ``u`` (which include ``u = 0``).
    Panels with both ends inside ``|u| <= u_s`` use the trapezoid rule on the
    smooth product; all others treat the amplitude as piecewise linear and
    integrate the exponentials exactly (Filon).
    """
    u = np.ascontiguousarray(u, dtype=float)
    g = np.ascontiguousarray(g, dtype=complex)
    args = (float(alpha), float(beta), complex(phase2), float(two_w0), float(u_s))
    if get_backend() == "numpy":
        return complex(_w_bracket_np(u, g, *args))
    return complex(_w_bracket_nb(u, g, *args))


# ----------------------------------------------------------------------------
# even-spectrum inverse transform
# ----------------------------------------------------------------------------


@njit(cache=True)
def _cos_transform_nb(h, c, x, out):
    for i in range(x.shape[0]):
        acc = 0j
        xi = x[i]
        for j in range(h.shape[0]):
            acc += c[j] * math.cos(h[j] * xi)
        out[i] = acc


def cos_transform(h, c, x):
    """``sum_j c_j cos(h_j x_i)`` for every ``x_i`` (fixed summation order)."""
    h = np.ascontiguousarray(h, dtype=float).ravel()
    c = np.ascontiguousarray(c, dtype=complex).ravel()
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xf = np.ascontiguousarray(x).ravel()
    if get_backend() == "numpy":
        out = np.cos(np.outer(xf, h)) @ c
    else:
        out = np.empty(xf.size, dtype=complex)
        _cos_transform_nb(h, c, xf, out)
    return out.reshape(shape)
