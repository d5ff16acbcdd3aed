import numpy as np
import pytest

from slablens import _accel, kernels

from conftest import K00, LAM0

pytestmark = pytest.mark.skipif(not _accel.have_numba(), reason="numba not installed")


def _both(fn):
    with _accel.backend("numba"):
        a = np.asarray(fn())
    with _accel.backend("numpy"):
        b = np.asarray(fn())
    return a, b


def test_backend_switch():
    with _accel.backend("numpy"):
        assert _accel.get_backend() == "numpy"
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


@pytest.mark.parametrize("z_over", [0.2, 0.9, 1.7, 2.4])
def test_slab_spectrum_parity(rng, z_over):
    h = rng.uniform(0, 6, 2000) * K00
    for eps in (-1 + 0j, -1 + 1e-6j, 2.5 + 0.3j, -3 + 0.2j):
        a, b = _both(lambda: kernels.slab_spectrum(K00, h, eps, eps * 0.7, 0.5 * LAM0, LAM0,
                                                   z_over * LAM0))
        scale = np.maximum(np.abs(b), 1e-300)
        assert np.all(np.isfinite(a)) and np.max(np.abs(a - b) / scale) < 1e-12


def test_w_bracket_parity(rng):
    u = np.sort(np.concatenate([rng.normal(0, 1e4, 3000), [0.0]]))
    g = np.exp(1j * u * 3e-5) / (1 + 1e-4 * u)
    a, b = _both(lambda: kernels.w_bracket(u, g, 1e-5, 9.9e-4, np.exp(0.3j), 1e10, 50.0))
    assert abs(a - b) < 1e-12 * abs(b)


def test_w_bracket_integrates_constant():
    # g = 1 against the closed-form sine/cosine-integral value; the rule is
    # second order in the node spacing
    from scipy import special
    alpha, beta, A = 1e-4, 3e-4, 2e4
    si = lambda v: special.sici(v)[0]
    ref = 2j * (si(beta * A) + si(alpha * A))
    errs = []
    for n in (4001, 40001):
        u = np.linspace(-A, A, n)
        got = kernels.w_bracket(u, np.ones_like(u, dtype=complex), alpha, beta, 0j, 1e30, 50.0)
        errs.append(abs(got - ref) / abs(ref))
    assert errs[1] < 1e-6
    assert errs[0] / errs[1] > 50


def test_cos_transform_parity(rng):
    h = rng.uniform(0, 10, 300)
    c = rng.normal(size=300) + 1j * rng.normal(size=300)
    x = rng.uniform(-3, 3, 500)
    a, b = _both(lambda: kernels.cos_transform(h, c, x))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(b, np.cos(np.outer(x, h)) @ c, rtol=1e-12, atol=1e-12)
