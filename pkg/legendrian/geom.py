"""
Legendrian curves in S³ ⊂ C², their frames and their projections.

Curves are sampled at N uniform nodes of a periodic parameter; the
unitary frame Γ = (γ, γ_s) of a unit-speed Legendrian curve obeys
Γ_s = Γ U(k) with U(k) = [[0, -1], [1, i k]], k the curvature.

Projections:
- Clifford:   π_C(w) = (|w1|² - |w2|², 2 Re(w1 w̄2), -2 Im(w1 w̄2)) on S²
- Heisenberg: p_H(z1, z2) = (ζ, Re(i(1 - z1)/(1 + z1))), ζ = i√2 z2 / (1 + z1)
- Lagrangian: the planar part ζ of p_H
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from legendrian import spectral
from legendrian.config import (
    FRENET_SUBSTEPS,
    POLE_DISTANCE,
    WAVE_NUMBER_BOUND,
)
from legendrian.errors import (
    DegenerateCurveError,
    NonClosureError,
    PoleError,
    ValidationError,
)
from legendrian.logging_utils import get_logger

logger = get_logger("GEOM")

MIN_SAMPLES = 8

FRENET_BASE = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
FRENET_SLOPE = np.array([[0.0, 0.0], [0.0, 1.0j]], dtype=complex)
LIFT_BASE = FRENET_BASE
LIFT_SLOPE = np.array([[-0.5j, 0.0], [0.0, 0.5j]], dtype=complex)


def hermitian(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """⟨a, b⟩ = Σ a_j conj(b_j) over the last axis."""
    return np.sum(a * np.conj(b), axis=-1)


@dataclass(frozen=True)
class ComplexPair:
    z1: complex
    z2: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2], dtype=complex)

    def norm(self) -> float:
        return math.sqrt(abs(self.z1) ** 2 + abs(self.z2) ** 2)


@dataclass
class CurvatureProfile:
    """Curvature samples k(s_j) at s_j = j·period/N."""

    values: np.ndarray
    period: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < MIN_SAMPLES:
            raise DegenerateCurveError(f"curvature profile needs at least {MIN_SAMPLES} samples")
        if not np.all(np.isfinite(self.values)) or not self.period > 0:
            raise DegenerateCurveError("curvature profile must be finite with positive period")

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return self.period / self.count

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.count) * self.spacing

    def total(self) -> float:
        """∫ k ds over one period."""
        return float(spectral.integrate(self.values, self.period))

    def tiled(self, copies: int) -> "CurvatureProfile":
        return CurvatureProfile(np.tile(self.values, copies), self.period * copies)


@dataclass
class SampledCurve:
    """Closed curve in S³ ⊂ C²: samples[j] = γ(s_j), s_j = j·period/N."""

    samples: np.ndarray
    period: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 2 or self.samples.shape[1] != 2:
            raise DegenerateCurveError("curve samples must have shape (N, 2)")
        if self.samples.shape[0] < MIN_SAMPLES:
            raise DegenerateCurveError(f"curve needs at least {MIN_SAMPLES} samples")
        if not np.all(np.isfinite(self.samples)) or not self.period > 0:
            raise DegenerateCurveError("curve samples must be finite with positive period")

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def spacing(self) -> float:
        return self.period / self.count

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.count) * self.spacing

    def point(self, index: int) -> ComplexPair:
        z1, z2 = self.samples[index]
        return ComplexPair(complex(z1), complex(z2))

    def derivative(self, order: int = 1) -> np.ndarray:
        return spectral.derivative(self.samples, self.period, order)

    def speed(self) -> np.ndarray:
        return np.sqrt(np.real(hermitian(self.derivative(), self.derivative())))

    def sphere_residual(self) -> float:
        return float(np.max(np.abs(np.sum(np.abs(self.samples) ** 2, axis=1) - 1.0)))

    def legendrian_residual(self) -> float:
        """max |⟨γ_s, γ⟩| / |γ_s|."""
        tangent = self.derivative()
        return float(np.max(np.abs(hermitian(tangent, self.samples)) / self.speed()))


@dataclass
class Frame:
    """A 2×2 unitary matrix whose columns are (γ, γ_s)."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex).reshape(2, 2)

    @classmethod
    def identity(cls) -> "Frame":
        return cls(np.eye(2, dtype=complex))

    @classmethod
    def from_columns(cls, gamma, gamma_s) -> "Frame":
        return cls(np.column_stack([np.asarray(gamma, complex), np.asarray(gamma_s, complex)]))

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))


def polar_unitary(matrices: np.ndarray) -> np.ndarray:
    """
    Unitary factor of the polar decomposition of (stacks of) 2×2 matrices,
    using the closed form √A = (A + √det A · I) / √(tr A + 2√det A).
    """
    matrices = np.asarray(matrices, dtype=complex)
    gram = np.conj(np.swapaxes(matrices, -1, -2)) @ matrices
    root_det = np.abs(np.linalg.det(matrices))
    scale = np.sqrt(np.real(np.trace(gram, axis1=-2, axis2=-1)) + 2.0 * root_det)
    root = (gram + root_det[..., None, None] * np.eye(2)) / scale[..., None, None]
    return matrices @ np.linalg.inv(root)


def _as_frame_matrix(frame0: Union[Frame, np.ndarray]) -> np.ndarray:
    matrix = frame0.matrix if isinstance(frame0, Frame) else np.asarray(frame0, dtype=complex)
    defect = np.max(np.abs(matrix.conj().T @ matrix - np.eye(2)))
    if defect > 1e-8:
        raise ValidationError(f"initial frame is not unitary (defect {defect:.3e})")
    return polar_unitary(matrix)


def interval_propagators(k: CurvatureProfile, base: np.ndarray, slope: np.ndarray,
                         substeps: int = FRENET_SUBSTEPS) -> np.ndarray:
    """
    Solutions Φ_j of Φ' = Φ (base + k·slope), Φ(s_j) = I, over [s_j, s_{j+1}],
    all intervals at once: RK4 with `substeps` steps per interval, k between
    nodes by trigonometric interpolation, polar re-unitarization per step.
    """
    step = k.spacing / substeps
    offsets = 0.5 * step * np.arange(2 * substeps + 1)
    shifted = [spectral.shift(k.values, k.period, delta) for delta in offsets]
    generators = [base + values[:, None, None] * slope for values in shifted]
    phi = np.broadcast_to(np.eye(2, dtype=complex), (k.count, 2, 2)).copy()
    for j in range(substeps):
        a0, am, a1 = generators[2 * j], generators[2 * j + 1], generators[2 * j + 2]
        k1 = phi @ a0
        k2 = (phi + 0.5 * step * k1) @ am
        k3 = (phi + 0.5 * step * k2) @ am
        k4 = (phi + step * k3) @ a1
        phi = polar_unitary(phi + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    return phi


def integrate_frames(k: CurvatureProfile, frame0: np.ndarray, base: np.ndarray,
                     slope: np.ndarray, substeps: int = FRENET_SUBSTEPS) -> np.ndarray:
    """Frames at s_0, ..., s_N (the last one after a full period), shape (N + 1, 2, 2)."""
    propagators = interval_propagators(k, base, slope, substeps)
    frames = np.empty((k.count + 1, 2, 2), dtype=complex)
    frames[0] = frame0
    for j in range(k.count):
        frames[j + 1] = polar_unitary(frames[j] @ propagators[j])
    return frames


def frenet_frames(k: CurvatureProfile, frame0: Union[Frame, np.ndarray],
                  substeps: int = FRENET_SUBSTEPS) -> np.ndarray:
    """Frame field Γ(s_j), j = 0..N, solving Γ_s = Γ U(k)."""
    return integrate_frames(k, _as_frame_matrix(frame0), FRENET_BASE, FRENET_SLOPE, substeps)


def curvature_of(curve: SampledCurve) -> CurvatureProfile:
    """k = Im⟨γ_xx, γ_x⟩ / ⟨γ_x, γ_x⟩^{3/2}, valid for any regular parametrization."""
    first = curve.derivative(1)
    second = curve.derivative(2)
    speed_sq = np.real(hermitian(first, first))
    if np.min(speed_sq) <= 1e-20 * max(np.max(speed_sq), 1e-300):
        raise DegenerateCurveError("curve has a vanishing tangent")
    values = np.imag(hermitian(second, first)) / speed_sq ** 1.5
    return CurvatureProfile(values, curve.period)


def frenet_reconstruct(k: CurvatureProfile, frame0: Union[Frame, np.ndarray],
                       substeps: int = FRENET_SUBSTEPS) -> SampledCurve:
    """Unit-speed Legendrian curve with curvature k and Γ(0) = frame0."""
    frames = frenet_frames(k, frame0, substeps)
    return SampledCurve(frames[:-1, :, 0], k.period)


def monodromy(frames: np.ndarray) -> np.ndarray:
    """Γ(end) Γ(0)⁻¹ for a frame field returned by frenet_frames."""
    return frames[-1] @ np.conj(frames[0]).T


def clifford_projection(curve: Union[SampledCurve, np.ndarray]) -> np.ndarray:
    """π_C applied to every sample; shape (N, 3)."""
    points = curve.samples if isinstance(curve, SampledCurve) else np.asarray(curve, complex)
    w1, w2 = points[..., 0], points[..., 1]
    cross = w1 * np.conj(w2)
    return np.stack([np.abs(w1) ** 2 - np.abs(w2) ** 2, 2.0 * cross.real, -2.0 * cross.imag], axis=-1)


def spherical_curvature(eta: np.ndarray, period: float) -> np.ndarray:
    """Geodesic curvature det(η, η', η'') / |η'|³ of a periodic curve on S²."""
    first = spectral.derivative(eta, period, 1)
    second = spectral.derivative(eta, period, 2)
    speed = np.linalg.norm(first, axis=1)
    return np.einsum("ij,ij->i", eta, np.cross(first, second)) / speed ** 3


def clifford_preimage(point: np.ndarray) -> np.ndarray:
    """Some w ∈ S³ with π_C(w) = point."""
    p1, p2, p3 = (float(v) for v in point)
    if p1 >= 0.0:
        w1 = math.sqrt(0.5 * (1.0 + p1))
        return np.array([w1, complex(p2, p3) / (2.0 * w1)], dtype=complex)
    w2 = math.sqrt(0.5 * (1.0 - p1))
    return np.array([complex(p2, -p3) / (2.0 * w2), w2], dtype=complex)


def _su2(w: np.ndarray) -> np.ndarray:
    return np.array([[w[0], -np.conj(w[1])], [w[1], np.conj(w[0])]], dtype=complex)


@dataclass
class LiftResult:
    curve: SampledCurve
    period_multiple: int


def legendrian_lift(eta: np.ndarray, k_half: CurvatureProfile,
                    substeps: int = FRENET_SUBSTEPS,
                    max_multiple: int = 2 * WAVE_NUMBER_BOUND) -> LiftResult:
    """
    Legendrian lift of a closed curve η on S² parametrized at speed 2 with
    geodesic curvature k_half, over the nodes of k_half.

    The SU(2) lift of the Frenet frame (η, η'/2, η × η'/2) is integrated
    directly and corrected by the phase e^{iα/2}, α' = 2·k_half. The lift
    closes after the smallest number of periods of η at which the one-period
    holonomy becomes the identity; that number is reported with the curve.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (k_half.count, 3):
        raise DegenerateCurveError("eta must be sampled on the nodes of k_half")
    period = k_half.period
    tangent = 0.5 * spectral.derivative(eta, period, 1)
    speed_error = np.max(np.abs(np.linalg.norm(tangent, axis=1) - 1.0))
    if speed_error > 1e-6:
        raise DegenerateCurveError(f"eta is not parametrized at speed 2 (error {speed_error:.2e})")

    w = clifford_preimage(eta[0])
    half_columns = np.array([-w[0] * w[1], 0.5 * (w[0] ** 2 - w[1] ** 2), 0.5j * (w[0] ** 2 + w[1] ** 2)])
    column2, column3 = 2.0 * half_columns.real, 2.0 * half_columns.imag
    # e^{iφ}w turns the second and third columns of σ(w) by 2φ
    phase = 0.5 * math.atan2(-float(np.dot(tangent[0], column3)), float(np.dot(tangent[0], column2)))
    w = np.exp(1j * phase) * w

    k = CurvatureProfile(2.0 * k_half.values, period)
    frames = integrate_frames(k, _su2(w), LIFT_BASE, LIFT_SLOPE, substeps)
    alpha = spectral.antiderivative(k.values, period)
    alpha_end = k.total()
    base_curve = np.exp(0.5j * alpha)[:, None] * frames[:-1, :, 0]
    holonomy = np.exp(0.5j * alpha_end) * monodromy(frames)

    power = np.eye(2, dtype=complex)
    for multiple in range(1, max_multiple + 1):
        power = holonomy @ power
        if np.max(np.abs(power - np.eye(2))) <= 1e-6:
            pieces = []
            block = np.eye(2, dtype=complex)
            for _ in range(multiple):
                pieces.append(base_curve @ block.T)
                block = holonomy @ block
            curve = SampledCurve(np.concatenate(pieces, axis=0), period * multiple)
            return LiftResult(curve=curve, period_multiple=multiple)
    raise NonClosureError(f"lift does not close within {max_multiple} periods of eta")


def heisenberg_projection(curve: Union[SampledCurve, np.ndarray],
                          pole_distance: float = POLE_DISTANCE) -> np.ndarray:
    """p_H of every sample; shape (N, 3). Raises PoleError near (-1, 0)."""
    points = curve.samples if isinstance(curve, SampledCurve) else np.atleast_2d(np.asarray(curve, complex))
    z1, z2 = points[:, 0], points[:, 1]
    distance = np.sqrt(np.abs(z1 + 1.0) ** 2 + np.abs(z2) ** 2)
    if np.min(distance) < pole_distance:
        raise PoleError(f"sample within {np.min(distance):.2e} of the Heisenberg pole (-1, 0)")
    zeta = 1j * math.sqrt(2.0) * z2 / (1.0 + z1)
    height = np.real(1j * (1.0 - z1) / (1.0 + z1))
    return np.stack([zeta.real, zeta.imag, height], axis=-1)


def lagrangian_projection(curve: Union[SampledCurve, np.ndarray]) -> np.ndarray:
    return heisenberg_projection(curve)[:, :2]


def heisenberg_inverse(points: np.ndarray) -> np.ndarray:
    """Inverse of p_H: rows (x, y, z) of R³ to rows (z1, z2) of S³ minus the pole."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    zeta = points[:, 0] + 1j * points[:, 1]
    w = points[:, 2] + 0.5j * np.abs(zeta) ** 2
    q = -1j * w
    z1 = (1.0 - q) / (1.0 + q)
    z2 = -1j * math.sqrt(2.0) * zeta / (1.0 + q)
    return np.stack([z1, z2], axis=-1)


def reparametrize_by_arclength(curve: SampledCurve, iterations: int = 4) -> SampledCurve:
    """Resample a regular closed curve at uniform arclength (unit speed)."""
    speed = curve.speed()
    if np.min(speed) <= 1e-12 * np.max(speed):
        raise DegenerateCurveError("cannot reparametrize a curve with a vanishing tangent")
    length = float(spectral.integrate(speed, curve.period))
    mean_speed = length / curve.period
    arclength = spectral.antiderivative(speed, curve.period)
    periodic_part = arclength - mean_speed * curve.nodes

    targets = length * np.arange(curve.count) / curve.count
    params = np.interp(targets, np.append(arclength, length), np.append(curve.nodes, curve.period))
    profile = np.stack([periodic_part, speed], axis=-1)
    for _ in range(iterations):
        periodic_at, speed_at = spectral.evaluate(profile, curve.period, params).T
        params = params - (mean_speed * params + periodic_at - targets) / speed_at
    samples = spectral.evaluate(curve.samples, curve.period, params)
    samples /= np.linalg.norm(samples, axis=1)[:, None]
    return SampledCurve(samples, length)


def legendrian_from_lagrangian(x: np.ndarray, y: np.ndarray, period: float = 2.0 * math.pi,
                               z0: float = 0.0) -> SampledCurve:
    """
    Closed Legendrian curve over a closed planar curve of zero signed area:
    z' = y x' - x y' keeps dz - y dx + x dy = 0, then p_H is inverted.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = spectral.derivative(x, period)
    dy = spectral.derivative(y, period)
    integrand = y * dx - x * dy
    area = float(spectral.integrate(integrand, period))
    if abs(area) > 1e-9 * max(1.0, float(spectral.integrate(np.abs(integrand), period))):
        raise DegenerateCurveError(f"planar curve encloses signed area {area:.3e}; its lift would not close")
    z = z0 + spectral.antiderivative(integrand, period)
    return SampledCurve(heisenberg_inverse(np.stack([x, y, z], axis=-1)), period)


def torus_knot_curve(m: int, n: int, count: int) -> SampledCurve:
    """
    γ_{m,n}(s) = (√m e^{-ins/√(mn)}, √n e^{ims/√(mn)}) / √(m+n) over
    its period 2π√(mn); constant curvature (m - n)/√(mn).
    """
    if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
        raise ValidationError(f"winding numbers must be positive integers, got ({m}, {n})")
    if math.gcd(m, n) != 1:
        raise ValidationError(f"winding numbers ({m}, {n}) are not coprime")
    if count < MIN_SAMPLES:
        raise ValidationError(f"need at least {MIN_SAMPLES} samples, got {count}")
    root = math.sqrt(m * n)
    period = 2.0 * math.pi * root
    s = np.arange(count) * period / count
    scale = 1.0 / math.sqrt(m + n)
    samples = np.stack([
        scale * math.sqrt(m) * np.exp(-1j * n * s / root),
        scale * math.sqrt(n) * np.exp(1j * m * s / root),
    ], axis=-1)
    return SampledCurve(samples, period)


def is_embedded(curve: SampledCurve, factor: float = 2.0, chunk: int = 256) -> bool:
    """
    False when two samples at least three nodes apart come within
    `factor` times the largest chord between consecutive samples.
    """
    points = curve.samples
    count = curve.count
    chords = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    threshold = factor * float(np.max(chords))
    index = np.arange(count)
    for start in range(0, count, chunk):
        rows = index[start:start + chunk]
        gaps = np.abs(rows[:, None] - index[None, :])
        gaps = np.minimum(gaps, count - gaps)
        distance = np.linalg.norm(points[rows][:, None, :] - points[None, :, :], axis=2)
        if np.any((gaps >= 3) & (distance < threshold)):
            return False
    return True
