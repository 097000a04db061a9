"""Shared fixtures: import path, seeded generators and random closed Legendrian curves."""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from legendrian.geom import SampledCurve, legendrian_from_lagrangian, reparametrize_by_arclength  # noqa: E402
from legendrian.stationary import Modulus  # noqa: E402

FIVE_SIXTHS = Fraction(5, 6)
LOWER_BRANCH = (0.600642, 2.44722)
EXCEPTIONAL = (2.39412, 3.2044)
EMBEDDED = (3.99723, 5.1619)
TIME_PERIODIC = (3.245612, 10.568031)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_legendrian(rng: np.random.Generator, count: int = 512, modes: int = 3,
                      amplitude: float = 0.08) -> SampledCurve:
    """
    Unit-speed closed Legendrian curve over a perturbed figure eight:
    x carries odd harmonics and y even ones, so the enclosed area vanishes.
    """
    s = 2.0 * math.pi * np.arange(count) / count
    x = np.sin(s)
    y = 0.5 * np.sin(2.0 * s)
    for j in range(1, modes + 1):
        a, b, c, d = amplitude * rng.standard_normal(4) / j ** 2
        x = x + a * np.sin((2 * j + 1) * s) + b * np.cos((2 * j + 1) * s)
        y = y + c * np.sin(2 * (j + 1) * s) + d * np.cos(2 * (j + 1) * s)
    curve = legendrian_from_lagrangian(0.6 * x, 0.6 * y)
    return reparametrize_by_arclength(curve)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def smooth_profile(rng: np.random.Generator, count: int = 64, period: float = 2.0 * math.pi,
                   modes: int = 3, amplitude: float = 0.5) -> np.ndarray:
    s = period * np.arange(count) / count
    values = np.zeros(count)
    for j in range(1, modes + 1):
        a, b = amplitude * rng.standard_normal(2) / j ** 2
        values += a * np.sin(2.0 * math.pi * j * s / period) + b * np.cos(2.0 * math.pi * j * s / period)
    return values


def symmetric(point) -> Modulus:
    return Modulus.symmetric(*point)
