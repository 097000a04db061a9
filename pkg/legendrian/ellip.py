"""
Elliptic integrals and Jacobi elliptic functions.

- complete_K: first kind by the arithmetic-geometric mean
- complete_Pi: third kind by Carlson's symmetric integrals R_F and R_J
- jacobi_cn_dn_sn: descending Landen (AGM) scheme after reduction modulo 4K

All parameters use the convention m = k², with 0 <= m < 1.
"""

import math
from typing import Tuple, Union

import numpy as np

from legendrian.errors import EllipticDomainError

ArrayLike = Union[float, np.ndarray]

_AGM_TOLERANCE = 1e-16
_CARLSON_TOLERANCE = 1e-3
_MAX_ITERATIONS = 64


def _check_parameter(m: float) -> None:
    if not math.isfinite(m) or m < 0.0 or m >= 1.0:
        raise EllipticDomainError(f"elliptic parameter m={m!r} outside [0, 1)")


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(_MAX_ITERATIONS):
        if abs(a - b) <= _AGM_TOLERANCE * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind K(m) = π / (2 agm(1, √(1-m)))."""
    _check_parameter(m)
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's R_F(x, y, z); at most one argument may be zero."""
    xn, yn, zn = x, y, z
    for _ in range(_MAX_ITERATIONS):
        mu = (xn + yn + zn) / 3.0
        dx, dy, dz = 1.0 - xn / mu, 1.0 - yn / mu, 1.0 - zn / mu
        if max(abs(dx), abs(dy), abs(dz)) < _CARLSON_TOLERANCE:
            break
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        xn, yn, zn = 0.25 * (xn + lam), 0.25 * (yn + lam), 0.25 * (zn + lam)
    e2 = dx * dy + dy * dz + dz * dx
    e3 = dx * dy * dz
    series = (
        1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
        - 5.0 * e2 ** 3 / 208.0 + 3.0 * e3 * e3 / 104.0 + e2 * e2 * e3 / 16.0
    )
    return series / math.sqrt(mu)


def carlson_rc(x: float, y: float) -> float:
    """Carlson's degenerate integral R_C(x, y) for y > 0."""
    xn, yn = x, y
    for _ in range(_MAX_ITERATIONS):
        mu = (xn + yn + yn) / 3.0
        sn = (yn + mu) / mu - 2.0
        if abs(sn) < _CARLSON_TOLERANCE:
            break
        lam = 2.0 * math.sqrt(xn) * math.sqrt(yn) + yn
        xn, yn = 0.25 * (xn + lam), 0.25 * (yn + lam)
    s = sn * sn * (0.3 + sn * (1.0 / 7.0 + sn * (0.375 + sn * 9.0 / 22.0)))
    return (1.0 + s) / math.sqrt(mu)


def carlson_rj(x: float, y: float, z: float, p: float) -> float:
    """Carlson's R_J(x, y, z, p) for p > 0 and at most one of x, y, z zero."""
    xn, yn, zn, pn = x, y, z, p
    sigma = 0.0
    power4 = 1.0
    for _ in range(_MAX_ITERATIONS):
        mu = (xn + yn + zn + pn + pn) * 0.2
        dx = (mu - xn) / mu
        dy = (mu - yn) / mu
        dz = (mu - zn) / mu
        dp = (mu - pn) / mu
        if max(abs(dx), abs(dy), abs(dz), abs(dp)) < _CARLSON_TOLERANCE:
            break
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * (sy + sz) + sy * sz
        alpha = (pn * (sx + sy + sz) + sx * sy * sz) ** 2
        beta = pn * (pn + lam) ** 2
        sigma += power4 * carlson_rc(alpha, beta)
        power4 *= 0.25
        xn, yn, zn, pn = 0.25 * (xn + lam), 0.25 * (yn + lam), 0.25 * (zn + lam), 0.25 * (pn + lam)
    c1, c2, c3, c4 = 3.0 / 14.0, 1.0 / 3.0, 3.0 / 22.0, 3.0 / 26.0
    ea = dx * (dy + dz) + dy * dz
    eb = dx * dy * dz
    ec = dp * dp
    e2 = ea - 3.0 * ec
    e3 = eb + 2.0 * dp * (ea - ec)
    s1 = 1.0 + e2 * (-c1 + 0.75 * c3 * e2 - 1.5 * c4 * e3)
    s2 = eb * (0.5 * c2 + dp * (-c3 - c3 + dp * c4))
    s3 = dp * ea * (c2 - dp * c3) - c2 * dp * ec
    return 3.0 * sigma + power4 * (s1 + s2 + s3) / (mu * math.sqrt(mu))


def complete_Pi(n: float, m: float) -> float:
    """
    Complete elliptic integral of the third kind

        Π(n, m) = ∫₀^{π/2} dθ / ((1 - n sin²θ) √(1 - m sin²θ))

    evaluated as R_F(0, 1-m, 1) + (n/3) R_J(0, 1-m, 1, 1-n). Requires n < 1.
    """
    _check_parameter(m)
    if not math.isfinite(n) or n >= 1.0:
        raise EllipticDomainError(f"characteristic n={n!r} must be < 1")
    mc = 1.0 - m
    value = carlson_rf(0.0, mc, 1.0)
    if n != 0.0:
        value += n / 3.0 * carlson_rj(0.0, mc, 1.0, 1.0 - n)
    return value


def jacobi_cn_dn_sn(u: ArrayLike, m: float) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Jacobi elliptic functions (cn, dn, sn) at u for parameter m.

    The argument is first reduced modulo the real period 4K(m); the
    descending Landen sequence then runs until the complementary term
    falls below machine precision. Accepts scalars or numpy arrays.
    """
    _check_parameter(m)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise EllipticDomainError("non-finite argument to jacobi_cn_dn_sn")

    period = 4.0 * complete_K(m)
    u = np.remainder(u + 0.5 * period, period) - 0.5 * period

    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > 1e-17 * a[-1] and len(a) < _MAX_ITERATIONS:
        a_prev = a[-1]
        a.append(0.5 * (a_prev + b))
        c.append(0.5 * (a_prev - b))
        b = math.sqrt(a_prev * b)

    depth = len(a) - 1
    phi = (2.0 ** depth) * a[depth] * u
    for level in range(depth, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[level] / a[level] * np.sin(phi)))

    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    if scalar:
        return float(cn), float(dn), float(sn)
    return cn, dn, sn
