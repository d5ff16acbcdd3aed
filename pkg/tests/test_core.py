import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slablens.core import (C0, EPS0, MU0, Z0, ConstantLossyDNG, Custom, DispersiveDNG,
                           MaterialResponse, SlabGeometry, Vacuum, evaluate_material, gamma0,
                           gamma_slab, is_branch_point, wavelength, wavenumber)
from slablens.errors import PassivityError

from conftest import K00, LAM0, OMEGA0


def test_constants_consistent():
    assert np.isclose(1 / np.sqrt(MU0 * EPS0), C0, rtol=1e-15)
    assert np.isclose(Z0, 376.730313, rtol=1e-8)


def test_wavenumber_and_wavelength():
    assert np.isclose(wavenumber(OMEGA0) * wavelength(1e10), 2 * np.pi, rtol=1e-15)
    assert np.isclose(LAM0, 0.0299792458)
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            wavenumber(bad)


def test_geometry():
    g = SlabGeometry.in_wavelengths(0.5, 1.0, 1e10)
    assert g.d_less_than_L and np.isclose(g.back_face, 1.5 * LAM0)
    with pytest.raises(ValueError):
        SlabGeometry(0.0, 1.0)


def test_gamma0_branches():
    assert gamma0(OMEGA0, 0.0) == pytest.approx(K00)
    g = gamma0(OMEGA0, 2 * K00)
    assert g.real == 0.0 and np.isclose(g.imag, np.sqrt(3) * K00)
    assert gamma0(OMEGA0, K00) == 0.0
    assert is_branch_point(OMEGA0, -K00)
    # symmetric in h
    hs = np.linspace(-3, 3, 13) * K00
    assert np.allclose(gamma0(OMEGA0, hs), gamma0(OMEGA0, -hs))


def test_gamma_slab_lossless_dng_sign():
    # vanishing-loss limit of the Im >= 0 root: negative real root
    g = gamma_slab(OMEGA0, 0.3 * K00, MaterialResponse(-1.0 + 0j, -1.0 + 0j))
    assert g.real < 0 and g.imag == 0
    g_lossy = gamma_slab(OMEGA0, 0.3 * K00, MaterialResponse(-1 + 1e-9j, -1 + 1e-9j))
    assert np.isclose(g, g_lossy, rtol=1e-6)


@settings(max_examples=200, deadline=None)
@given(er=st.floats(-5, 5), ei=st.floats(0, 3), mr=st.floats(-5, 5), mi=st.floats(0, 3),
       h=st.floats(0, 6))
def test_gamma_slab_upper_half_plane(er, ei, mr, mi, h):
    m = MaterialResponse(complex(er, ei), complex(mr, mi))
    g = gamma_slab(OMEGA0, h * K00, m)
    assert g.imag >= 0
    assert np.isclose(g * g, K00**2 * m.eps_r * m.mu_r - (h * K00) ** 2,
                      rtol=1e-10, atol=1e-10 * K00**2 * (1 + h * h + abs(m.eps_r * m.mu_r)))


def test_passivity_rejected():
    with pytest.raises(PassivityError):
        MaterialResponse(-1 - 1e-3j, -1 + 0j)
    with pytest.raises(ValueError):
        ConstantLossyDNG(-1e-3)


def test_material_models():
    assert evaluate_material(Vacuum(), OMEGA0).eps_r == 1
    r = ConstantLossyDNG(1e-6).response(np.array([OMEGA0, 2 * OMEGA0]))
    assert np.all(r.eps_r == -1 + 1e-6j)
    dm = DispersiveDNG(OMEGA0)
    assert dm.response(OMEGA0).eps_r == -1
    r = dm.response(OMEGA0 * 1.001)
    assert np.isclose(r.eps_r, -1 + 4e-3 + 1j * (1000 * 1e-3) ** 2)
    with pytest.raises(ValueError):
        DispersiveDNG(OMEGA0, slope=3.0)


def test_custom_table_and_callable():
    w = np.array([0.9, 1.1]) * OMEGA0
    c = Custom(w, np.array([-1.2 + 0.1j, -0.8 + 0.3j]), np.array([-1.0, -1.0 + 0j]))
    r = c.response(OMEGA0)
    assert np.isclose(r.eps_r, -1.0 + 0.2j) and np.isclose(r.mu_r, -1.0)
    with pytest.raises(ValueError):
        c.response(1.2 * OMEGA0)
    f = Custom(func=lambda om: (-1 + 0j, -1 + 0j))
    assert f.response(OMEGA0).mu_r == -1
    with pytest.raises(PassivityError):
        Custom(w, np.array([1 - 1j, 1 + 0j]), np.array([1, 1 + 0j]))
