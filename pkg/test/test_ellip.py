import math

import numpy as np
import pytest
from scipy import integrate, special

from legendrian.ellip import complete_K, complete_Pi, jacobi_cn_dn_sn
from legendrian.errors import EllipticDomainError


@pytest.mark.parametrize("m", [0.0, 1e-8, 0.05, 0.5, 0.9, 0.999999])
def test_complete_K_matches_scipy(m):
    assert complete_K(m) == pytest.approx(special.ellipk(m), rel=1e-13)


def test_complete_K_at_zero_is_half_pi():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


@pytest.mark.parametrize("n, m", [(0.0, 0.3), (-2.0, 0.5), (0.5, 0.1), (-0.3, 0.9), (0.9, 0.6), (-30.0, 0.05)])
def test_complete_Pi_matches_quadrature(n, m):
    expected, _ = integrate.quad(
        lambda t: 1.0 / ((1.0 - n * math.sin(t) ** 2) * math.sqrt(1.0 - m * math.sin(t) ** 2)),
        0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-13,
    )
    assert complete_Pi(n, m) == pytest.approx(expected, rel=1e-10)


def test_complete_Pi_with_zero_characteristic_is_K():
    assert complete_Pi(0.0, 0.4) == pytest.approx(complete_K(0.4), rel=1e-13)


@pytest.mark.parametrize("m", [0.0, 0.056843, 0.5, 0.95])
def test_jacobi_matches_scipy(m):
    u = np.linspace(-20.0, 20.0, 401)
    cn, dn, sn = jacobi_cn_dn_sn(u, m)
    sn_ref, cn_ref, dn_ref, _ = special.ellipj(u, m)
    assert np.max(np.abs(cn - cn_ref)) < 1e-12
    assert np.max(np.abs(dn - dn_ref)) < 1e-12
    assert np.max(np.abs(sn - sn_ref)) < 1e-12


def test_jacobi_quarter_period_values():
    m = 0.3
    K = complete_K(m)
    cn, dn, sn = jacobi_cn_dn_sn(K, m)
    assert cn == pytest.approx(0.0, abs=1e-13)
    assert sn == pytest.approx(1.0, abs=1e-13)
    assert dn == pytest.approx(math.sqrt(1.0 - m), abs=1e-13)
    cn_half, _, _ = jacobi_cn_dn_sn(2.0 * K, m)
    assert cn_half == pytest.approx(-1.0, abs=1e-13)


def test_jacobi_scalar_input_returns_floats():
    result = jacobi_cn_dn_sn(0.7, 0.2)
    assert all(isinstance(value, float) for value in result)


def test_jacobi_identities(rng):
    for m in rng.uniform(0.0, 0.999, size=12):
        u = rng.uniform(-100.0, 100.0, size=50)
        cn, dn, sn = jacobi_cn_dn_sn(u, m)
        assert np.max(np.abs(sn * sn + cn * cn - 1.0)) <= 1e-11
        assert np.max(np.abs(dn * dn + m * sn * sn - 1.0)) <= 1e-11


@pytest.mark.parametrize("m", [0.0, 0.1, 0.37, 0.68, 0.9, 0.999])
def test_jacobi_period_is_four_K(m):
    u = np.linspace(0.0, 3.0, 7)
    shifted = jacobi_cn_dn_sn(u + 4.0 * complete_K(m), m)
    original = jacobi_cn_dn_sn(u, m)
    for a, b in zip(shifted, original):
        assert np.max(np.abs(a - b)) < 1e-10


@pytest.mark.parametrize("m", [1.0, -0.1, math.inf, math.nan])
def test_parameter_outside_domain_is_rejected(m):
    with pytest.raises(EllipticDomainError):
        complete_K(m)


def test_characteristic_at_one_is_rejected():
    with pytest.raises(EllipticDomainError) as info:
        complete_Pi(1.0, 0.5)
    assert info.value.exit_code == 2


def test_non_finite_argument_is_rejected():
    with pytest.raises(EllipticDomainError):
        jacobi_cn_dn_sn(np.array([0.0, math.inf]), 0.5)
