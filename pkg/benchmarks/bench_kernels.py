"""Compare the numba and numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from slablens import _accel, kernels
from slablens.core import DispersiveDNG, SlabGeometry, wavenumber
from slablens.timedomain import SineWindow, analytic_spectrum_W

F0 = 1e10
W0 = 2 * np.pi * F0


def _time(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    k00 = wavenumber(W0)
    geom = SlabGeometry.in_wavelengths(0.5, 1.0, F0)
    model = DispersiveDNG(W0)
    rng = np.random.default_rng(0)
    h = rng.uniform(0, 5 * k00, 200_000)
    eps = -1 + 1e-6j
    u = np.sort(rng.normal(0, 1e5, 100_000))
    g = np.exp(1j * u * 1e-6)
    hn = np.linspace(0, 3.5 * k00, 160)
    c = rng.normal(size=160) + 0j
    x = np.linspace(-0.03, 0.03, 2001)
    win = SineWindow(1e-3, W0)
    z = 2 * geom.L + geom.L / 1000
    return {
        "slab_spectrum (2e5 h)": lambda: kernels.slab_spectrum(k00, h, eps, eps, geom.d, geom.L, z),
        "w_bracket (1e5 omega)": lambda: kernels.w_bracket(u, g, 1e-4, 9e-4, 1.0 + 0j, 2 * W0, 50.0),
        "cos_transform (160 x 2001)": lambda: kernels.cos_transform(hn, c, x),
        "analytic_spectrum_W (1e5 grid)": lambda: analytic_spectrum_W(
            2.0 * k00, z, [1e-6, 1e-5, 1e-4], geom, model, win),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.have_numba() else [])
    print(f"{'case':34s}" + "".join(f"{b:>12s}" for b in backends) + "   agreement")
    for name, fn in cases().items():
        times, vals = [], []
        for b in backends:
            with _accel.backend(b):
                times.append(_time(fn, args.repeat))
                vals.append(np.asarray(fn()))
        diff = (np.max(np.abs(vals[0] - vals[-1])) / np.max(np.abs(vals[0]))) if len(vals) > 1 else 0.0
        print(f"{name:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + f"   {diff:.1e}")


if __name__ == "__main__":
    main()
