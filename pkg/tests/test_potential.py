import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qnll import potential as pot
from qnll.potential import EamParams

# Cauchy-Born density at F = 1 and its derivatives, 40 digits
W1 = -1.024281059463867206138783518529616068057
DW1 = 0.19714369230873953059
D2W1 = 37.99752215140106655

stencils = st.tuples(*[st.floats(0.6, 2.5)] * 4).map(
    lambda t: np.array([-t[0] - t[1], -t[1], t[2], t[2] + t[3]]))


def w_mp(s):
    bonds = [2 * s, s, s, 2 * s]
    pair = sum(mpmath.exp(-8.8 * (r - 1)) - 2 * mpmath.exp(-4.4 * (r - 1)) for r in bonds)
    t = sum(mpmath.exp(-3 * r) for r in bonds) - 2 * mpmath.exp(-3)
    return pair / 2 + 5 * (t**2 + t**4)


def test_default_parameters():
    p = EamParams()
    assert (p.a, p.b, p.c) == (4.4, 3.0, 5.0)
    assert p.rho0 == pytest.approx(2 * np.exp(-3.0), rel=1e-15)


def test_high_precision_reference_values():
    with mpmath.workdps(40):
        assert float(w_mp(mpmath.mpf(1))) == pytest.approx(W1, rel=1e-15)
        assert float(mpmath.diff(w_mp, 1, 1)) == pytest.approx(DW1, rel=1e-15)
        assert float(mpmath.diff(w_mp, 1, 2)) == pytest.approx(D2W1, rel=1e-15)


def test_cauchy_born_at_unit_stretch():
    cb = pot.cauchy_born(1.0)
    assert cb.W_F == pytest.approx(W1, rel=1e-14)
    assert cb.Wp_F == pytest.approx(DW1, rel=1e-12)
    assert cb.Wpp_F == pytest.approx(D2W1, rel=1e-12)
    assert cb.Wpp_F > 0


@pytest.mark.parametrize("F", [0.9, 1.0, 1.1, 1.3])
def test_vectorised_density_matches_site_energy(F):
    cb = pot.cauchy_born(F)
    assert pot.w_density(F) == pytest.approx(cb.W_F, rel=1e-14)
    assert pot.dw_density(F) == pytest.approx(cb.Wp_F, rel=1e-12, abs=1e-14)
    assert pot.d2w_density(F) == pytest.approx(cb.Wpp_F, rel=1e-12)


@given(stencils)
def test_site_gradient_matches_complex_step(g):
    h = 1e-30
    num = np.array([pot.v_site(g + 1j * h * e).imag / h for e in np.eye(4)])
    np.testing.assert_allclose(pot.v_grad(g), num, rtol=1e-12, atol=1e-13)


@given(stencils)
def test_site_hessian_is_symmetric_and_matches_gradient(g):
    H = pot.v_hess(g)
    np.testing.assert_array_equal(H, H.T)
    h = 1e-30
    num = np.array([pot.v_grad(g + 1j * h * e).imag / h for e in np.eye(4)])
    np.testing.assert_allclose(H, num, rtol=1e-11, atol=1e-11)


@given(stencils, st.tuples(*[st.floats(-1e-3, 1e-3)] * 4))
def test_site_increment_matches_difference(g, dg):
    dg = np.array(dg)
    direct = pot.v_site(g + dg) - pot.v_site(g)
    assert pot.v_site_increment(g, dg) == pytest.approx(direct, rel=1e-8, abs=1e-13)


def test_increments_resolve_tiny_perturbations():
    # a naive difference loses all digits here; the increment keeps the linear term
    e = 1e-13
    assert pot.w_increment(1.0, e) == pytest.approx(DW1 * e, rel=1e-9)
    g0 = pot.homogeneous_stencil(1.0)
    dg = np.array([0.0, 0.0, e, e])
    expected = pot.v_grad(g0) @ dg
    assert pot.v_site_increment(g0, dg) == pytest.approx(expected, rel=1e-9)


@given(st.floats(0.7, 1.5), st.floats(-0.05, 0.05))
def test_density_derivatives_by_complex_step(s, e):
    x = s + e
    h = 1e-30
    assert pot.dw_density(x) == pytest.approx(pot.w_density(x + 1j * h).imag / h, rel=1e-11, abs=1e-13)
    assert pot.d2w_density(x) == pytest.approx(pot.dw_density(x + 1j * h).imag / h, rel=1e-11)


def test_linearised_density_is_second_order_taylor():
    cb = pot.cauchy_born(1.0)
    for e in (1e-2, 5e-3, 2.5e-3):
        err = abs(pot.w_density(1.0 + e) - pot.w_lin(e, cb))
        assert err < 0.2 * abs(pot.d2w_density(1.0)) * e**2
    # error shrinks like e^3
    r = [abs(pot.w_density(1.0 + e) - pot.w_lin(e, cb)) for e in (1e-2, 5e-3)]
    assert r[0] / r[1] == pytest.approx(8.0, rel=0.1)
    assert pot.dw_lin(0.0, cb) == cb.Wp_F


def test_extended_precision_is_kept():
    g = np.array([-2, -1, 1, 2], dtype=np.longdouble)
    assert pot.v_grad(g).dtype == np.longdouble
    assert pot.v_grad(np.array([-2, -1, 1, 2])).dtype == np.float64
