"""Two-source 3 dB resolution and the loss/on-time enhancement formulas."""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize, special

# Separation constants c in D = c*pi/H from the 3 dB criterion, for the sinc
# E_x image and the J0 H_y image.  tests/test_resolution.py regenerates both
# with three_db_resolution.
SINC_3DB_CONSTANT = 1.53
BESSEL_3DB_CONSTANT = 1.28

THREE_DB_RATIO = 10.0 ** 0.3


class Mechanism(enum.Enum):
    LOSS = "loss"
    ON_TIME = "on_time"
    PROPAGATING_ONLY = "propagating_only"


@dataclass(frozen=True)
class ResolutionReport:
    delta_x: float
    enhancement: float
    mechanism: Mechanism
    constant_used: float
    parameter: Optional[float] = None


def _peak_ratio(profile, D, n_scan=201):
    half = 0.5 * D

    def intensity(x):
        return np.abs(profile(np.asarray(x) - half) + profile(np.asarray(x) + half)) ** 2

    xs = np.linspace(0.0, D, n_scan)
    vals = intensity(xs)
    i = int(np.argmax(vals))
    peak = vals[i]
    if 0 < i < n_scan - 1:
        res = optimize.minimize_scalar(lambda x: -intensity(x), bounds=(xs[i - 1], xs[i + 1]),
                                       method="bounded", options={"xatol": 1e-10 * max(D, 1e-300)})
        peak = max(peak, -res.fun)
    centre = intensity(0.0)
    if centre == 0.0:
        return np.inf
    return float(peak / centre)


def three_db_resolution(image_profile, bracket, rtol=1e-6):
    """Separation at which two images are resolved at the 3 dB level.

    ``image_profile(x)`` is the single-source image (real or complex).  The
    pair profile is ``f(x - D/2) + f(x + D/2)``; the separation ``D`` is
    where the peak intensity (located by local maximization) exceeds the
    intensity at the midpoint by ``10**0.3``.
    """
    lo, hi = map(float, bracket)
    if not 0.0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def g(D):
        return _peak_ratio(image_profile, D) - THREE_DB_RATIO

    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 < ghi):
        raise ValueError(f"no 3 dB crossing in bracket [{lo:g}, {hi:g}] "
                         f"(ratio excess {glo:.3g}, {ghi:.3g})")
    return float(optimize.brentq(g, lo, hi, rtol=rtol, xtol=1e-15 * hi))


def sinc_profile(H):
    H = float(H)
    return lambda x: np.sinc(H * np.asarray(x) / np.pi) * H


def bessel_profile(k):
    return lambda x: special.j0(k * np.asarray(x))


def calibrate_constants():
    """Regenerate ``(sinc, bessel)`` 3 dB constants ``D*H/pi``."""
    sinc_c = three_db_resolution(sinc_profile(1.0), (2.0, 8.0)) / np.pi
    bes_c = three_db_resolution(bessel_profile(1.0), (2.0, 8.0)) / np.pi
    return sinc_c, bes_c


def _check_delta(delta_pp):
    if not 0.0 < delta_pp < 1.0:
        raise ValueError("delta_pp must lie in (0, 1)")


def enhancement_lossy(delta_pp, L, lambda0):
    """``sqrt((lambda0 ln delta/(2 pi L))**2 + 1)``."""
    _check_delta(delta_pp)
    return float(np.hypot(lambda0 * np.log(delta_pp) / (2 * np.pi * L), 1.0))


def enhancement_lossy_smith(delta_pp, L, lambda0):
    """Large-enhancement form ``-lambda0 ln delta/(2 pi L)``."""
    _check_delta(delta_pp)
    return float(-lambda0 * np.log(delta_pp) / (2 * np.pi * L))


def required_loss(R_e, L, lambda0):
    """Loss giving enhancement ``R_e``: ``exp(-2 pi (L/lambda0) sqrt(R_e**2 - 1))``."""
    if not R_e >= 1.0:
        raise ValueError("R_e must be >= 1")
    return float(np.exp(-2 * np.pi * (L / lambda0) * np.sqrt(R_e * R_e - 1.0)))


def resolution_lossy(delta_pp, L, lambda0, constant=SINC_3DB_CONSTANT):
    R = enhancement_lossy(delta_pp, L, lambda0)
    dx = constant * np.pi / (2 * np.pi / lambda0 * R)
    return ResolutionReport(float(dx), R, Mechanism.LOSS, constant, float(delta_pp))


def enhancement_time(t, f0, L, lambda0, constant=SINC_3DB_CONSTANT):
    """On-time-limited enhancement ``sqrt((lambda0 ln(f0 t)/(2 pi L))**2 + 1)``
    and the 3 dB separation ``constant*pi/(k00 R_e)``."""
    f0t = f0 * t
    if not f0t > np.e:
        raise ValueError(f"f0*t = {f0t:.3g} must exceed e")
    R = float(np.hypot(lambda0 * np.log(f0t) / (2 * np.pi * L), 1.0))
    dx = constant * np.pi / (2 * np.pi / lambda0 * R)
    return ResolutionReport(float(dx), R, Mechanism.ON_TIME, constant, float(t))


def required_time(R_e, f0, L, lambda0):
    """On-time giving enhancement ``R_e``: ``exp(2 pi (L/lambda0) sqrt(R_e**2 - 1))/f0``."""
    if not R_e >= 1.0:
        raise ValueError("R_e must be >= 1")
    return float(np.exp(2 * np.pi * (L / lambda0) * np.sqrt(R_e * R_e - 1.0)) / f0)


def propagating_only(lambda0, constant=SINC_3DB_CONSTANT):
    return ResolutionReport(constant * lambda0 / 2, 1.0, Mechanism.PROPAGATING_ONLY, constant)


def half_amplitude_point(h, y, ref=None):
    """Outermost ``h`` where ``|y|`` falls through ``ref/2`` (linear interpolation).

    ``ref`` defaults to ``|y[0]|``, the value at the smallest ``h``.  Returns
    ``nan`` when the curve never drops below the half level.
    """
    h = np.asarray(h, dtype=float)
    y = np.abs(np.asarray(y))
    ref = y[0] if ref is None else float(ref)
    above = y >= 0.5 * ref
    idx = np.nonzero(above[:-1] & ~above[1:])[0]
    if idx.size == 0:
        return float("nan")
    i = idx[-1]
    y0, y1 = y[i] - 0.5 * ref, y[i + 1] - 0.5 * ref
    return float(h[i] + (h[i + 1] - h[i]) * y0 / (y0 - y1))


@dataclass(frozen=True)
class ProfilePeaks:
    """Local maxima of a sampled profile and the dip at its centre."""

    positions: np.ndarray
    values: np.ndarray
    central_dip_db: float


def profile_peaks(x, y, min_level=0.5):
    """Strict interior local maxima of ``|y|`` and ``20 log10(max/|y(centre)|)``.

    Only maxima of at least ``min_level * max|y|`` count, which discards
    side lobes.  The centre is the sample nearest ``x = 0``; the dip is zero
    when the centre is itself the maximum.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(np.asarray(y))
    inner = (a[1:-1] > a[:-2]) & (a[1:-1] > a[2:]) & (a[1:-1] >= min_level * a.max())
    idx = np.nonzero(inner)[0] + 1
    c = a[int(np.argmin(np.abs(x)))]
    dip = float(20 * np.log10(a.max() / c)) if c > 0 else float("inf")
    return ProfilePeaks(x[idx], a[idx], dip)
