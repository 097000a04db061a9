"""
Integer and rational invariants of closed Legendrian curves.

- maslov_index: total curvature / 2π
- turning_number / winding_number: planar polylines
- bennequin_number: writhe of the Lagrangian projection, the height of
  the Heisenberg model deciding over and under strands
- clifford_index_and_spin: least period of the Clifford projection and
  (anti)periodicity of the SU(2) lift of its Frenet frame
- detect_rational: best continued-fraction approximation with a bound
"""

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np

from legendrian import spectral
from legendrian.config import (
    MASLOV_TOLERANCE,
    PERIOD_TOLERANCE,
    RATIONAL_MAX_DENOMINATOR,
    RATIONAL_TOLERANCE,
    TANGENCY_ANGLE,
)
from legendrian.errors import (
    DegenerateCurveError,
    NonIntegralError,
    PeriodDetectionError,
    TangencyError,
)
from legendrian.geom import (
    LIFT_BASE,
    LIFT_SLOPE,
    CurvatureProfile,
    SampledCurve,
    clifford_projection,
    curvature_of,
    heisenberg_projection,
    integrate_frames,
    is_embedded,
    monodromy,
)
from legendrian.logging_utils import get_logger

logger = get_logger("INVARIANTS")

_VERTEX_MARGIN = 1e-9
_SAMPLING_PHASES = (0.0, 0.5, 0.25, 0.75)


@dataclass(frozen=True)
class RationalDetect:
    max_denominator: int = RATIONAL_MAX_DENOMINATOR
    tolerance: float = RATIONAL_TOLERANCE


def detect_rational(x: float, cfg: RationalDetect = RationalDetect()) -> Optional[Tuple[int, int]]:
    """(p, q) with q <= max_denominator and |x - p/q| <= tolerance, else None."""
    if not math.isfinite(x):
        return None
    candidate = Fraction(x).limit_denominator(cfg.max_denominator)
    if abs(x - candidate.numerator / candidate.denominator) <= cfg.tolerance:
        return candidate.numerator, candidate.denominator
    return None


def maslov_index(k: CurvatureProfile, tolerance: float = MASLOV_TOLERANCE) -> int:
    """μ = (1/2π) ∫ k ds, which must be an integer for a closed curve."""
    value = k.total() / (2.0 * math.pi)
    nearest = round(value)
    if abs(value - nearest) > tolerance:
        raise NonIntegralError(f"total curvature / 2π = {value:.8f} is not an integer")
    return int(nearest)


def _wrapped_angle_sum(vectors: np.ndarray) -> float:
    angles = np.arctan2(vectors[:, 1], vectors[:, 0])
    steps = np.diff(np.append(angles, angles[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.sum(steps)) / (2.0 * math.pi)


def turning_number(planar: np.ndarray) -> int:
    """
    Signed rotation index of the closed polyline through the given points,
    in the orientation of the point order. For the Lagrangian projection of
    γ_{m,n} this is m - n, so γ_{3,5} gives -2; its magnitude is the value
    usually quoted.
    """
    planar = np.asarray(planar, dtype=float)
    segments = np.roll(planar, -1, axis=0) - planar
    lengths = np.linalg.norm(segments, axis=1)
    if np.min(lengths) <= 1e-14 * max(float(np.max(lengths)), 1e-300):
        raise DegenerateCurveError("polyline has a zero-length segment")
    value = _wrapped_angle_sum(segments)
    nearest = round(value)
    if abs(value - nearest) > 1e-6:
        raise NonIntegralError(f"turning number {value:.8f} is not an integer")
    return int(nearest)


def winding_number(planar: np.ndarray, point=(0.0, 0.0)) -> int:
    """Winding number of the closed polyline around a point off the curve."""
    offsets = np.asarray(planar, dtype=float) - np.asarray(point, dtype=float)
    if np.min(np.linalg.norm(offsets, axis=1)) == 0.0:
        raise DegenerateCurveError("winding number requested around a point of the curve")
    return int(round(_wrapped_angle_sum(offsets)))


@dataclass(frozen=True)
class Crossing:
    first_segment: int
    second_segment: int
    point: Tuple[float, float]
    sign: int


class _AmbiguousSampling(Exception):
    pass


def _cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _crossings_of(heights: np.ndarray, tangency_angle: float, chunk: int = 256) -> List[Crossing]:
    planar = heights[:, :2]
    z = heights[:, 2]
    count = planar.shape[0]
    segments = np.roll(planar, -1, axis=0) - planar
    rises = np.roll(z, -1) - z
    lengths = np.linalg.norm(segments, axis=1)
    index = np.arange(count)
    found: List[Crossing] = []
    for start in range(0, count, chunk):
        rows = index[start:start + chunk]
        r_i = segments[rows][:, None, :]
        r_j = segments[None, :, :]
        offset = planar[None, :, :] - planar[rows][:, None, :]
        denom = _cross2(r_i, r_j)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = _cross2(offset, r_j) / denom
            u = _cross2(offset, r_i) / denom
        candidates = (
            (index[None, :] > rows[:, None] + 1)
            & ~((rows[:, None] == 0) & (index[None, :] == count - 1))
            & (denom != 0.0)
            & (t >= -_VERTEX_MARGIN) & (t < 1.0 + _VERTEX_MARGIN)
            & (u >= -_VERTEX_MARGIN) & (u < 1.0 + _VERTEX_MARGIN)
        )
        for a, j in zip(*np.nonzero(candidates)):
            i = int(rows[a])
            ti, uj = float(t[a, j]), float(u[a, j])
            if min(abs(ti), abs(ti - 1.0), abs(uj), abs(uj - 1.0)) < _VERTEX_MARGIN:
                raise _AmbiguousSampling()
            sine = abs(float(denom[a, j])) / (lengths[i] * lengths[j])
            if math.asin(min(sine, 1.0)) < tangency_angle:
                raise TangencyError(f"segments {i} and {j} cross at angle {math.asin(min(sine, 1.0)):.2e}")
            gap = (z[i] + ti * rises[i]) - (z[j] + uj * rises[j])
            if abs(gap) < 1e-12:
                raise DegenerateCurveError(f"curve meets itself near segments {i} and {j}")
            sign = int(np.sign(denom[a, j]) * np.sign(gap))
            point = tuple(planar[i] + ti * segments[i])
            found.append(Crossing(i, int(j), (float(point[0]), float(point[1])), sign))
    return found


def lagrangian_crossings(curve: SampledCurve, tangency_angle: float = TANGENCY_ANGLE) -> List[Crossing]:
    """
    Signed double points of the Lagrangian projection. A crossing counts +1
    when (over tangent) × (under tangent) points up. Samplings that put a
    crossing on a vertex are retried at shifted phases.
    """
    for phase in _SAMPLING_PHASES:
        samples = curve.samples if phase == 0.0 else spectral.shift(curve.samples, curve.period, phase * curve.spacing)
        try:
            return _crossings_of(heisenberg_projection(samples), tangency_angle)
        except _AmbiguousSampling:
            logger.debug("crossing on a vertex at sampling phase %.2f, retrying", phase)
    raise TangencyError("every sampling phase placed a crossing on a vertex")


def bennequin_number(curve: SampledCurve) -> int:
    """Thurston-Bennequin invariant: writhe of the Lagrangian projection."""
    return sum(crossing.sign for crossing in lagrangian_crossings(curve))


def clifford_index_and_spin(curve: SampledCurve, tolerance: float = PERIOD_TOLERANCE) -> Tuple[int, Fraction]:
    """
    cl = 2L / L_η from the least period of the Clifford projection, and the
    spin: 1 if the SU(2) lift of its Frenet frame closes after one period of
    the projection, 1/2 if it comes back as its negative.
    """
    eta = clifford_projection(curve)
    modes = spectral.significant_modes(eta, tolerance)
    if not modes:
        raise PeriodDetectionError("Clifford projection is constant")
    index = reduce(math.gcd, (abs(mode) for mode in modes))
    residual = np.max(np.abs(spectral.shift(eta, curve.period, curve.period / index) - eta))
    if residual > math.sqrt(tolerance):
        raise PeriodDetectionError(f"projection is not periodic under 1/{index} of the period (residual {residual:.2e})")

    k = curvature_of(curve)
    sub_period = CurvatureProfile(spectral.restrict_period(k.values, index), k.period / index)
    holonomy = monodromy(integrate_frames(sub_period, np.eye(2, dtype=complex), LIFT_BASE, LIFT_SLOPE))
    if np.max(np.abs(holonomy - np.eye(2))) <= 1e-5:
        return index, Fraction(1)
    if np.max(np.abs(holonomy + np.eye(2))) <= 1e-5:
        return index, Fraction(1, 2)
    raise PeriodDetectionError("frame lift is neither periodic nor antiperiodic over the projection period")


@dataclass
class InvariantReport:
    maslov: int
    clifford_index: int
    spin: Fraction
    turning_number: int
    bennequin: Optional[int] = None
    crossings: Optional[int] = None
    embedded: bool = True
    legendrian_residual: float = 0.0
    maslov_residual: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["spin"] = str(self.spin)
        return data


def compute_invariants(curve: SampledCurve, maslov_tolerance: float = MASLOV_TOLERANCE) -> InvariantReport:
    """All invariants of a closed Legendrian curve; bennequin only when embedded."""
    k = curvature_of(curve)
    maslov = maslov_index(k, maslov_tolerance)
    cl, spin = clifford_index_and_spin(curve)
    planar = heisenberg_projection(curve)[:, :2]
    embedded = is_embedded(curve)
    report = InvariantReport(
        maslov=maslov,
        clifford_index=cl,
        spin=spin,
        turning_number=turning_number(planar),
        embedded=embedded,
        legendrian_residual=curve.legendrian_residual(),
        maslov_residual=abs(k.total() / (2.0 * math.pi) - maslov),
    )
    if embedded:
        crossings = lagrangian_crossings(curve)
        report.crossings = len(crossings)
        report.bennequin = sum(crossing.sign for crossing in crossings)
    logger.info("maslov=%d cl=%d spin=%s tb=%s", report.maslov, cl, spin, report.bennequin)
    return report
