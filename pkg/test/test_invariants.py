import math
from fractions import Fraction

import numpy as np
import pytest

from legendrian.errors import DegenerateCurveError, NonIntegralError
from legendrian.geom import (
    CurvatureProfile,
    SampledCurve,
    curvature_of,
    lagrangian_projection,
    torus_knot_curve,
)
from legendrian.invariants import (
    RationalDetect,
    bennequin_number,
    clifford_index_and_spin,
    compute_invariants,
    detect_rational,
    lagrangian_crossings,
    maslov_index,
    turning_number,
    winding_number,
)
from conftest import random_legendrian, random_unitary

TORUS_TABLE = [
    # (m, n, samples, maslov, cl, tb)
    (1, 1, 1024, 0, 2, -1),
    (2, 3, 1024, -1, 5, -6),
    (3, 5, 2048, -2, 8, -15),
]


def circle(count: int = 200, radius: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    s = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    return np.stack([center[0] + radius * np.cos(s), center[1] + radius * np.sin(s)], axis=-1)


# ========== RATIONAL DETECTION ==========

@pytest.mark.parametrize("x, expected", [
    (5.0 / 6.0, (5, 6)),
    (-2.0, (-2, 1)),
    (0.5000000004, (1, 2)),
    (math.pi, None),
    (math.nan, None),
])
def test_detect_rational(x, expected):
    assert detect_rational(x) == expected


def test_detect_rational_respects_bounds():
    assert detect_rational(1.0 / 97.0) is None
    assert detect_rational(1.0 / 97.0, RationalDetect(max_denominator=100)) == (1, 97)
    assert detect_rational(0.8334, RationalDetect(tolerance=1e-3)) == (5, 6)


# ========== PLANAR INDICES ==========

def test_turning_number_of_circles():
    assert turning_number(circle()) == 1
    assert turning_number(circle()[::-1]) == -1


def test_turning_number_of_figure_eight_is_zero():
    s = np.linspace(0.0, 2.0 * math.pi, 400, endpoint=False)
    assert turning_number(np.stack([np.sin(s), 0.5 * np.sin(2.0 * s)], axis=-1)) == 0


def test_turning_number_rejects_repeated_points():
    points = circle(16)
    points[3] = points[4]
    with pytest.raises(DegenerateCurveError):
        turning_number(points)


def test_winding_number():
    assert winding_number(circle()) == 1
    assert winding_number(circle(), point=(3.0, 0.0)) == 0
    assert winding_number(np.concatenate([circle(), circle()]), point=(0.1, 0.2)) == 2
    with pytest.raises(DegenerateCurveError):
        winding_number(circle(), point=(1.0, 0.0))


# ========== MASLOV INDEX ==========

def test_maslov_index_of_constant_curvature():
    k = CurvatureProfile(np.full(64, 2.0), 2.0 * math.pi)
    assert maslov_index(k) == 2


def test_maslov_index_refuses_non_integers():
    with pytest.raises(NonIntegralError):
        maslov_index(CurvatureProfile(np.full(64, 0.1), 2.0 * math.pi))


def test_maslov_index_is_unitary_invariant(rng):
    curve = random_legendrian(rng)
    A = random_unitary(rng)
    moved = SampledCurve(curve.samples @ A.T, curve.period)
    k, k_moved = curvature_of(curve), curvature_of(moved)
    assert np.max(np.abs(k.values - k_moved.values)) < 1e-9
    assert maslov_index(k) == maslov_index(k_moved) == 0


# ========== TORUS KNOTS ==========

@pytest.mark.parametrize("m, n, samples, maslov, cl, tb", TORUS_TABLE)
def test_torus_knot_invariants(m, n, samples, maslov, cl, tb):
    report = compute_invariants(torus_knot_curve(m, n, samples))
    assert report.maslov == maslov
    assert report.clifford_index == cl
    assert report.spin == Fraction(1, 2)
    assert report.turning_number == maslov
    assert report.embedded
    assert report.bennequin == tb
    assert report.legendrian_residual < 1e-10


@pytest.mark.parametrize("m, n", [(1, 2), (2, 5), (3, 4), (1, 6)])
def test_torus_knots_have_half_spin(m, n):
    cl, spin = clifford_index_and_spin(torus_knot_curve(m, n, 512))
    assert cl == m + n
    assert spin == Fraction(1, 2)


def test_bennequin_number_ignores_starting_point():
    curve = torus_knot_curve(2, 3, 1024)
    rolled = SampledCurve(np.roll(curve.samples, 137, axis=0), curve.period)
    assert bennequin_number(rolled) == bennequin_number(curve) == -6


def test_crossings_of_torus_knot_sum_to_bennequin():
    crossings = lagrangian_crossings(torus_knot_curve(2, 3, 1024))
    assert all(crossing.sign in (-1, 1) for crossing in crossings)
    assert all(crossing.first_segment < crossing.second_segment for crossing in crossings)
    assert sum(crossing.sign for crossing in crossings) == -6


def test_report_serializes_spin_as_text():
    data = compute_invariants(torus_knot_curve(1, 1, 512)).to_dict()
    assert data["spin"] == "1/2"
    assert data["clifford_index"] == 2


def test_random_figure_eight_curve():
    rng = np.random.default_rng(7)
    curve = random_legendrian(rng)
    report = compute_invariants(curve)
    assert report.maslov == 0
    assert report.turning_number == 0
    assert report.embedded
    assert report.crossings == 1
    assert abs(report.bennequin) == 1
    assert report.turning_number == turning_number(lagrangian_projection(curve))
