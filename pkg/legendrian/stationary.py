"""
Stationary curves of the Z_1 flow.

A stationary curvature solves k'' + ½k³ + ak + ½b = 0, equivalently
(k')² + P(k) = 0 with P(x) = ¼x⁴ + ax² + bx + c. The roots of P (the
modulus) fix the profile up to translation; the conserved momentum H gives
the Frenet frame by quadratures, and the two quanta Φ1 = ∫k/2π and
Φ2 = ∫Λ/2π over a wavelength decide closure.

Moduli come in three cases:
- dnoidal:            four real roots e1 > e2 > e3 > e4 = -(e1 + e2 + e3)
- cnoidal:            real roots e1 > e2, complex pair -(e1 + e2)/2 ± i e3
- symmetric_cnoidal:  the cnoidal case with e2 = -e1, coordinates (e1, e3)
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from legendrian import ellip, spectral
from legendrian.config import (
    DEFAULT_SAMPLES,
    ENERGY_DRIFT_TOLERANCE,
    EXCEPTIONAL_TOLERANCE,
    MOMENTUM_TOLERANCE,
    MONODROMY_TOLERANCE,
    SCAN_E1_MIN,
    SCAN_INITIAL_STEP,
    SCAN_MAX_FAILURES,
    SCAN_MAX_STEP,
    SCAN_NEWTON_TOLERANCE,
    SCAN_RADIUS_MAX,
    WAVE_NUMBER_BOUND,
)
from legendrian.errors import (
    ConsistencyError,
    ContinuationStallError,
    DegenerateCurveError,
    ExceptionalModulusError,
    InvalidModulusError,
    LegendrianError,
    NonClosureError,
    ValidationError,
)
from legendrian.geom import (
    CurvatureProfile,
    SampledCurve,
    clifford_projection,
    frenet_frames,
    heisenberg_projection,
    monodromy,
)
from legendrian.invariants import (
    RationalDetect,
    clifford_index_and_spin,
    detect_rational,
    lagrangian_crossings,
    winding_number,
)
from legendrian.logging_utils import get_logger

logger = get_logger("STATIONARY")

DNOIDAL = "dnoidal"
CNOIDAL = "cnoidal"
SYMMETRIC = "symmetric_cnoidal"
CASES = (DNOIDAL, CNOIDAL, SYMMETRIC)

_MOMENTUM = np.array([[-1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class Modulus:
    """Roots of the quartic of a stationary curvature; e2 = -e1 in the symmetric case."""

    case: str
    e1: float
    e2: Optional[float]
    e3: float

    def __post_init__(self):
        if self.case not in CASES:
            raise InvalidModulusError(f"unknown modulus case {self.case!r}; expected one of {CASES}")
        if self.case == SYMMETRIC:
            if self.e2 is not None and abs(self.e2 + self.e1) > 1e-12 * max(1.0, abs(self.e1)):
                raise InvalidModulusError(f"symmetric modulus needs e2 = -e1, got e2={self.e2}")
            object.__setattr__(self, "e2", -self.e1)
        elif self.e2 is None:
            raise InvalidModulusError(f"{self.case} modulus needs e2")
        values = (self.e1, self.e2, self.e3)
        if not all(math.isfinite(v) for v in values):
            raise InvalidModulusError(f"modulus components must be finite, got {values}")
        e1, e2, e3 = values
        if self.case == DNOIDAL and not e1 > e2 > e3 > -(e1 + e2 + e3):
            raise InvalidModulusError(f"dnoidal modulus needs e1 > e2 > e3 > -(e1+e2+e3), got {values}")
        if self.case == CNOIDAL and not (e1 > e2 and e3 > 0.0):
            raise InvalidModulusError(f"cnoidal modulus needs e1 > e2 and e3 > 0, got {values}")
        if self.case == SYMMETRIC and not (e1 > 0.0 and e3 > 0.0):
            raise InvalidModulusError(f"symmetric modulus needs e1 > 0 and e3 > 0, got {(e1, e3)}")

    @classmethod
    def symmetric(cls, e1: float, e3: float) -> "Modulus":
        return cls(SYMMETRIC, float(e1), None, float(e3))

    @classmethod
    def cnoidal(cls, e1: float, e2: float, e3: float) -> "Modulus":
        return cls(CNOIDAL, float(e1), float(e2), float(e3))

    @classmethod
    def dnoidal(cls, e1: float, e2: float, e3: float) -> "Modulus":
        return cls(DNOIDAL, float(e1), float(e2), float(e3))

    @property
    def radius(self) -> float:
        """|e| = √(e1² + e3²), the quantity that separates the symmetric quadrant."""
        return math.hypot(self.e1, self.e3)

    def roots(self) -> np.ndarray:
        if self.case == DNOIDAL:
            return np.array([self.e1, self.e2, self.e3, -(self.e1 + self.e2 + self.e3)], dtype=complex)
        centre = -0.5 * (self.e1 + self.e2)
        return np.array([self.e1, self.e2, centre + 1j * self.e3, centre - 1j * self.e3])

    def to_dict(self) -> Dict[str, object]:
        return {"case": self.case, "e1": self.e1, "e2": self.e2, "e3": self.e3}


@dataclass(frozen=True)
class QuarticData:
    a: float
    b: float
    c: float
    lam: float
    m: float
    scale: float
    omega: float

    def P(self, x):
        return 0.25 * x ** 4 + self.a * x ** 2 + self.b * x + self.c

    def to_dict(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c, "lambda": self.lam,
                "m": self.m, "scale": self.scale, "omega": self.omega}


def momentum_eigenvalue(a: float, b: float, c: float) -> float:
    return 0.25 * math.sqrt(256.0 - 128.0 * a + 16.0 * a * a + b * b - 16.0 * c)


def elliptic_data(mod: Modulus) -> Tuple[float, float, float]:
    """(m, argument scale, wavelength ω) of the curvature profile."""
    e1, e2, e3 = mod.e1, mod.e2, mod.e3
    if mod.case == SYMMETRIC:
        m = e1 * e1 / (e1 * e1 + e3 * e3)
        scale = 0.5 * mod.radius
        return m, scale, 4.0 * ellip.complete_K(m) / scale
    if mod.case == CNOIDAL:
        centre = -0.5 * (e1 + e2)
        A = math.hypot(e1 - centre, e3)
        B = math.hypot(e2 - centre, e3)
        m = ((e1 - e2) ** 2 - (A - B) ** 2) / (4.0 * A * B)
        scale = 0.5 * math.sqrt(A * B)
        period_factor = 4.0
    else:
        e4 = -(e1 + e2 + e3)
        m = (e1 - e2) * (e3 - e4) / ((e1 - e3) * (e2 - e4))
        scale = 0.25 * math.sqrt((e1 - e3) * (e2 - e4))
        period_factor = 2.0
    if not 0.0 < m < 1.0:
        raise DegenerateCurveError(f"modulus {mod.to_dict()} has a repeated root (m={m})")
    return m, scale, period_factor * ellip.complete_K(m) / scale


def wavelength(mod: Modulus) -> float:
    return elliptic_data(mod)[2]


def quartic_from_modulus(mod: Modulus) -> QuarticData:
    """Vieta: P(x) = ¼ Π (x - r_i) over the four roots of the modulus."""
    coefficients = np.real(np.poly(mod.roots()))
    a, b, c = (float(v) / 4.0 for v in coefficients[2:])
    if mod.case == SYMMETRIC:
        a = (mod.e3 ** 2 - mod.e1 ** 2) / 4.0
        b = 0.0
        c = -(mod.e1 * mod.e3) ** 2 / 4.0
    m, scale, omega = elliptic_data(mod)
    return QuarticData(a=a, b=b, c=c, lam=momentum_eigenvalue(a, b, c), m=m, scale=scale, omega=omega)


def is_exceptional(mod: Modulus, tolerance: float = EXCEPTIONAL_TOLERANCE) -> bool:
    """Cnoidal moduli with 8e2 + b + 4λ = 0; in the symmetric quadrant, the circle |e| = 4."""
    if mod.case == SYMMETRIC:
        return abs(mod.radius - 4.0) <= tolerance
    if mod.case == CNOIDAL:
        quartic = quartic_from_modulus(mod)
        return abs(8.0 * mod.e2 + quartic.b + 4.0 * quartic.lam) <= tolerance * max(1.0, quartic.lam)
    return False


# Curvature profiles

def _symmetric_profile(mod: Modulus, quartic: QuarticData, nodes: np.ndarray) -> np.ndarray:
    cn, _, _ = ellip.jacobi_cn_dn_sn(quartic.scale * nodes, quartic.m)
    return -mod.e1 * cn


def _integrated_profile(mod: Modulus, quartic: QuarticData, count: int,
                        drift_tolerance: float) -> np.ndarray:
    def rhs(_s, y):
        return [y[1], -(0.5 * y[0] ** 3 + quartic.a * y[0] + 0.5 * quartic.b)]

    size = float(np.max(np.abs(mod.roots())))
    nodes = np.arange(count + 1) * quartic.omega / count
    solution = solve_ivp(rhs, (0.0, quartic.omega), [mod.e2, 0.0], method="DOP853",
                         t_eval=nodes, rtol=1e-13, atol=1e-13 * max(1.0, size))
    if not solution.success:
        raise ConsistencyError(f"profile integration failed: {solution.message}")
    k, dk = solution.y
    drift = float(np.max(np.abs(dk ** 2 + quartic.P(k))))
    logger.debug("first-integral drift %.3e over one wavelength", drift)
    if drift > drift_tolerance * max(1.0, size ** 4):
        raise ConsistencyError(f"first integral drifted by {drift:.3e}")
    gap = max(abs(k[-1] - mod.e2), abs(dk[-1]))
    if gap > 1e-8 * max(1.0, size):
        raise ConsistencyError(f"profile does not close over the computed wavelength (gap {gap:.3e})")
    return k[:-1]


def curvature_profile(mod: Modulus, count: int = DEFAULT_SAMPLES,
                      drift_tolerance: float = ENERGY_DRIFT_TOLERANCE) -> CurvatureProfile:
    """One wavelength of k with k(0) = e2, k'(0) = 0, at `count` uniform nodes."""
    quartic = quartic_from_modulus(mod)
    if mod.case == SYMMETRIC:
        nodes = np.arange(count) * quartic.omega / count
        values = _symmetric_profile(mod, quartic, nodes)
    else:
        values = _integrated_profile(mod, quartic, count, drift_tolerance)
    return CurvatureProfile(values, quartic.omega)


def cnoidal_closed_form(mod: Modulus, nodes: np.ndarray) -> np.ndarray:
    """Closed-form cnoidal profile, a fractional-linear function of cn."""
    if mod.case == DNOIDAL:
        raise InvalidModulusError("closed form is for cnoidal moduli")
    m, scale, _ = elliptic_data(mod)
    centre = -0.5 * (mod.e1 + mod.e2)
    A = math.hypot(mod.e1 - centre, mod.e3)
    B = math.hypot(mod.e2 - centre, mod.e3)
    cn, _, _ = ellip.jacobi_cn_dn_sn(scale * np.asarray(nodes, dtype=float), m)
    return (mod.e1 * B + mod.e2 * A + (mod.e2 * A - mod.e1 * B) * cn) / (A + B + (A - B) * cn)


# Momentum

@dataclass
class MomentumFrame:
    H: np.ndarray
    lam: float
    eigenvalue_drift: float
    conservation_residual: float

    @property
    def momentum(self) -> np.ndarray:
        return self.lam * _MOMENTUM


def momentum_matrix(k: np.ndarray, k_s: np.ndarray, a: float, b: float) -> np.ndarray:
    """H = [[2k + b/4, k' + i(½k² + a - 4)], [k' - i(½k² + a - 4), -2k - b/4]], shape (N, 2, 2)."""
    k = np.asarray(k, dtype=float)
    k_s = np.asarray(k_s, dtype=float)
    off = k_s + 1j * (0.5 * k ** 2 + a - 4.0)
    H = np.empty(k.shape + (2, 2), dtype=complex)
    H[..., 0, 0] = 2.0 * k + 0.25 * b
    H[..., 0, 1] = off
    H[..., 1, 0] = np.conj(off)
    H[..., 1, 1] = -(2.0 * k + 0.25 * b)
    return H


def momentum_field(mod: Modulus, k: CurvatureProfile,
                   tolerance: float = MOMENTUM_TOLERANCE) -> MomentumFrame:
    """H along the profile, with its eigenvalues ±λ and H' + [U, H] = 0 checked."""
    quartic = quartic_from_modulus(mod)
    k_s = spectral.derivative(k.values, k.period)
    H = momentum_matrix(k.values, k_s, quartic.a, quartic.b)
    eigen = np.sqrt(np.real(H[:, 0, 0]) ** 2 + np.abs(H[:, 0, 1]) ** 2)
    drift = float(np.max(np.abs(eigen - quartic.lam)))
    if drift > tolerance * max(1.0, quartic.lam):
        raise ConsistencyError(f"momentum eigenvalues drift by {drift:.3e} from λ={quartic.lam:.6f}")

    U = np.zeros_like(H)
    U[:, 0, 1] = -1.0
    U[:, 1, 0] = 1.0
    U[:, 1, 1] = 1j * k.values
    residual = spectral.derivative(H, k.period) + (U @ H - H @ U)
    conservation = float(np.max(np.abs(residual)))
    logger.debug("momentum drift %.3e, conservation residual %.3e", drift, conservation)
    return MomentumFrame(H=H, lam=quartic.lam, eigenvalue_drift=drift, conservation_residual=conservation)


def momentum_frame0(mod: Modulus, k: CurvatureProfile) -> np.ndarray:
    """A frame at s = 0 putting the momentum in the form diag(-λ, λ)."""
    if mod.case == SYMMETRIC:
        return standard_frame(mod)
    quartic = quartic_from_modulus(mod)
    H0 = momentum_matrix(k.values[:1], np.zeros(1), quartic.a, quartic.b)[0]
    _, vectors = np.linalg.eigh(H0)
    return np.conj(vectors).T


# Quadrature

@dataclass
class QuadratureFrame:
    frames: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    Lambda: np.ndarray
    k: CurvatureProfile
    lam: float
    phases: Tuple[float, float]

    @property
    def monodromy(self) -> np.ndarray:
        return np.diag(np.exp(1j * np.array(self.phases)))


def lambda_function(k: np.ndarray, quartic: QuarticData) -> np.ndarray:
    """Λ = (16(4 - a) + (b + 4λ)k) / (4(8k + 4λ + b))."""
    b, lam = quartic.b, quartic.lam
    return (16.0 * (4.0 - quartic.a) + (b + 4.0 * lam) * k) / (4.0 * (8.0 * k + 4.0 * lam + b))


def reconstruct_frame_by_quadrature(mod: Modulus, count: int = DEFAULT_SAMPLES) -> QuadratureFrame:
    """
    Frenet frame over one wavelength from the eigenvectors V¹, V² of H:
    Γ = √(λ/2)·√(8k + 4λ + b)·diag(e^{iθ1}, e^{iθ2})·V⁻¹ with
    θ1 = ∫(¾k + Λ) and θ2 = ∫(¼k - Λ).
    """
    if is_exceptional(mod):
        raise ExceptionalModulusError(f"modulus {mod.to_dict()} is exceptional; integrate the Frenet equations instead")
    quartic = quartic_from_modulus(mod)
    k = curvature_profile(mod, count)
    k_s = spectral.derivative(k.values, k.period)
    H = momentum_matrix(k.values, k_s, quartic.a, quartic.b)
    lam = quartic.lam
    v1 = np.stack([H[:, 0, 1], -H[:, 0, 0] - lam], axis=1)
    v2 = np.stack([-H[:, 1, 1] + lam, H[:, 1, 0]], axis=1)
    smallest = float(min(np.min(np.linalg.norm(v1, axis=1)), np.min(np.linalg.norm(v2, axis=1))))
    if smallest < 1e-8:
        raise ConsistencyError(f"momentum eigenvectors degenerate (norm {smallest:.2e})")

    denominator = 8.0 * k.values + 4.0 * lam + quartic.b
    Lambda = lambda_function(k.values, quartic)
    theta1 = spectral.antiderivative(0.75 * k.values + Lambda, k.period)
    theta2 = spectral.antiderivative(0.25 * k.values - Lambda, k.period)
    V = np.stack([v1, v2], axis=2)
    scale = np.sqrt(0.5 * lam * denominator)
    phases = np.zeros((k.count, 2, 2), dtype=complex)
    phases[:, 0, 0] = np.exp(1j * theta1)
    phases[:, 1, 1] = np.exp(1j * theta2)
    frames = scale[:, None, None] * phases @ np.linalg.inv(V)
    total = (
        float(spectral.integrate(0.75 * k.values + Lambda, k.period)),
        float(spectral.integrate(0.25 * k.values - Lambda, k.period)),
    )
    return QuadratureFrame(frames=frames, v1=v1, v2=v2, Lambda=Lambda, k=k, lam=lam, phases=total)


# Closure

def exceptional_phi2(e1: float) -> float:
    """Φ2 on the exceptional circle |e| = 4: e1·K(e1²/16)/(4π)."""
    return e1 / (4.0 * math.pi) * ellip.complete_K(e1 * e1 / 16.0)


def regularized_phi2(e1: float, e3: float) -> float:
    """
    Φ̃2 on the symmetric quadrant: the closed form of ∫Λ/2π, shifted by 0
    inside |e| = 4, by 1 outside and by ½ on the circle itself.
    """
    mod = Modulus.symmetric(e1, e3)
    r2 = e1 * e1 + e3 * e3
    if abs(r2 - 16.0) <= 16.0 * 1e-12:
        return exceptional_phi2(e1) + 0.5
    radius = mod.radius
    lam = 0.25 * math.sqrt((r2 - 16.0) ** 2 + 64.0 * e1 * e1)
    m = e1 * e1 / r2
    characteristic = -64.0 * e1 * e1 / (r2 - 16.0) ** 2
    phi2 = lam / (2.0 * math.pi * radius) * (
        ellip.complete_K(m) - (r2 + 16.0) / (r2 - 16.0) * ellip.complete_Pi(characteristic, m)
    )
    return phi2 if r2 < 16.0 else phi2 + 1.0


def _regularization_offset(mod: Modulus) -> float:
    return 0.0 if mod.radius < 4.0 else 1.0


@dataclass
class ClosureReport:
    modulus: Modulus
    phi1: float
    phi2: float
    phi2_regularized: float
    rational_pair: Optional[Tuple[Tuple[int, int], Tuple[int, int]]]
    closed: bool
    wave_number: Optional[int]
    monodromy: np.ndarray
    monodromy_defect: float = 0.0
    lam: float = 0.0
    omega: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "modulus": self.modulus.to_dict(),
            "phi1": self.phi1,
            "phi2": self.phi2,
            "phi2_regularized": self.phi2_regularized,
            "rational_pair": [list(p) for p in self.rational_pair] if self.rational_pair else None,
            "closed": self.closed,
            "wave_number": self.wave_number,
            "monodromy": [[[z.real, z.imag] for z in row] for row in self.monodromy.tolist()],
            "monodromy_defect": self.monodromy_defect,
            "lambda": self.lam,
            "omega": self.omega,
        }


def _exact_order(phases: Tuple[Fraction, Fraction], bound: int) -> Optional[int]:
    """Least n with n·φ integral for both rational phases (in turns), if at most bound."""
    order = 1
    for phase in phases:
        order = order * phase.denominator // math.gcd(order, phase.denominator)
    return order if order <= bound else None


def _power_defect(matrix: np.ndarray, power: int) -> float:
    return float(np.max(np.abs(np.linalg.matrix_power(matrix, power) - np.eye(2))))


def _quanta(mod: Modulus, quartic: QuarticData, detect: RationalDetect, count: int):
    k = curvature_profile(mod, count)
    phi1 = k.total() / (2.0 * math.pi)

    if mod.case == SYMMETRIC:
        if is_exceptional(mod):
            phi2 = exceptional_phi2(mod.e1)
            regularized = phi2 + 0.5
        else:
            regularized = regularized_phi2(mod.e1, mod.e3)
            phi2 = regularized - _regularization_offset(mod)
            quadrature = float(spectral.integrate(lambda_function(k.values, quartic), k.period)) / (2.0 * math.pi)
            logger.debug("Φ2 closed form %.12f, quadrature %.12f", phi2, quadrature)
    else:
        if is_exceptional(mod):
            raise ExceptionalModulusError(f"modulus {mod.to_dict()} is exceptional; Λ is singular")
        phi2 = float(spectral.integrate(lambda_function(k.values, quartic), k.period)) / (2.0 * math.pi)
        regularized = phi2

    M = monodromy(frenet_frames(k, momentum_frame0(mod, k)))
    first = detect_rational(phi1, detect)
    second = detect_rational(regularized, detect)
    rational_pair = (first, second) if first is not None and second is not None else None
    return phi1, phi2, regularized, M, rational_pair


def closure_quanta(mod: Modulus, detect: RationalDetect = RationalDetect(),
                   count: int = DEFAULT_SAMPLES,
                   wave_number_bound: int = WAVE_NUMBER_BOUND,
                   refine: bool = True,
                   monodromy_tolerance: float = MONODROMY_TOLERANCE) -> ClosureReport:
    """
    Φ1, Φ2 (and Φ̃2 in the symmetric case), their rationality and the monodromy.

    A symmetric modulus whose Φ̃2 is detected as q is first projected onto
    Σ_q when `refine` is set. The curve counts as closed only when the
    monodromy raised to the wave number is the identity within
    `monodromy_tolerance`.
    """
    quartic = quartic_from_modulus(mod)
    phi1, phi2, regularized, M, rational_pair = _quanta(mod, quartic, detect, count)

    if refine and mod.case == SYMMETRIC and rational_pair is not None:
        q = Fraction(*rational_pair[1])
        try:
            refined = refine_to_modular_curve(mod, float(q))
        except ValidationError as exc:
            logger.info("modulus left unrefined: %s", exc.message)
        except ConsistencyError as exc:
            logger.warning("modulus left unrefined: %s", exc.message)
        else:
            mod, quartic = refined, quartic_from_modulus(refined)
            phi1, phi2, regularized, M, rational_pair = _quanta(mod, quartic, detect, count)

    wave_number = None
    defect = 0.0
    if rational_pair is not None:
        phi1_exact = Fraction(*rational_pair[0])
        phi2_exact = Fraction(*rational_pair[1])
        turns = (Fraction(3, 4) * phi1_exact + phi2_exact, Fraction(1, 4) * phi1_exact - phi2_exact)
        wave_number = _exact_order(turns, wave_number_bound)
        if wave_number is None:
            logger.info("monodromy order exceeds the bound %d", wave_number_bound)
        else:
            defect = _power_defect(M, wave_number)
    closed = wave_number is not None and defect <= monodromy_tolerance
    if wave_number is not None and not closed:
        logger.warning("monodromy^%d differs from the identity by %.2e", wave_number, defect)
    logger.info("Φ1=%.10f Φ̃2=%.10f closed=%s wave number=%s", phi1, regularized, closed, wave_number)
    return ClosureReport(
        modulus=mod,
        phi1=phi1,
        phi2=phi2,
        phi2_regularized=regularized,
        rational_pair=rational_pair,
        closed=closed,
        wave_number=wave_number,
        monodromy=M,
        monodromy_defect=defect,
        lam=quartic.lam,
        omega=quartic.omega,
    )


# Standard loops

def standard_frame(mod: Modulus) -> np.ndarray:
    """
    Γ(0) of the standard loop: γ(0) = U/‖U‖ and γ'(0) = U*/‖U‖ with
    U = (-4i(2e1 + λ), |e|² - 16) and U* = (-conj U2, conj U1).
    """
    if mod.case != SYMMETRIC:
        raise InvalidModulusError("standard loops are defined for symmetric moduli")
    lam = quartic_from_modulus(mod).lam
    U = np.array([-4j * (2.0 * mod.e1 + lam), mod.radius ** 2 - 16.0])
    U_star = np.array([-np.conj(U[1]), np.conj(U[0])])
    return np.stack([U, U_star], axis=1) / np.linalg.norm(U)


def _symmetric_residual(point: np.ndarray, q: float) -> float:
    return regularized_phi2(float(point[0]), float(point[1])) - q


def _residual_gradient(point: np.ndarray, q: float) -> np.ndarray:
    step = 1e-6 * max(1.0, float(np.linalg.norm(point)))
    gradient = np.empty(2)
    for axis in range(2):
        offset = np.zeros(2)
        offset[axis] = step
        gradient[axis] = (_symmetric_residual(point + offset, q) - _symmetric_residual(point - offset, q)) / (2.0 * step)
    return gradient


def _correct(point: np.ndarray, q: float, tolerance: float, iterations: int = 12) -> Optional[np.ndarray]:
    """Newton along the gradient of Φ̃2 - q; None when it does not converge."""
    point = np.array(point, dtype=float)
    for _ in range(iterations):
        try:
            residual = _symmetric_residual(point, q)
            if abs(residual) <= tolerance:
                return point
            gradient = _residual_gradient(point, q)
        except ValidationError:
            return None
        norm_sq = float(gradient @ gradient)
        if norm_sq == 0.0 or not math.isfinite(norm_sq):
            return None
        point = point - residual * gradient / norm_sq
    try:
        return point if abs(_symmetric_residual(point, q)) <= tolerance else None
    except ValidationError:
        return None


def exceptional_point(q: float) -> Modulus:
    """The point of Σ_q on the circle |e| = 4: e1·K(e1²/16)/(4π) + ½ = q."""
    _check_characteristic(q)

    def residual(e1: float) -> float:
        return exceptional_phi2(e1) + 0.5 - q

    upper = float(np.nextafter(4.0, 0.0))
    if residual(upper) < 0.0:
        raise ValidationError(f"characteristic number {q} is beyond the reach of the exceptional circle")
    e1 = brentq(residual, 1e-300, upper, xtol=1e-15, rtol=4.0 * np.finfo(float).eps)
    return Modulus.symmetric(e1, math.sqrt(16.0 - e1 * e1))


def boundary_limits(q: float) -> Tuple[Tuple[float, float], Optional[Tuple[float, float]]]:
    """Limit points of Σ_q on the e3-axis: (0, 2/q), and (0, 2/(1-q)) when q < 1."""
    _check_characteristic(q)
    lower = (0.0, 2.0 / q)
    upper = (0.0, 2.0 / (1.0 - q)) if q < 1.0 else None
    return lower, upper


def _check_characteristic(q: float) -> None:
    if not q > 0.5:
        raise ValidationError(f"characteristic number must exceed 1/2, got {q}")


def refine_to_modular_curve(mod: Modulus, q: float,
                            tolerance: float = 1e-13) -> Modulus:
    """Nearest point of Σ_q to a symmetric modulus quoted to a few digits."""
    if mod.case != SYMMETRIC:
        raise InvalidModulusError("modular curves live in the symmetric quadrant")
    q = float(q)
    _check_characteristic(q)
    if is_exceptional(mod):
        return exceptional_point(q)
    corrected = _correct(np.array([mod.e1, mod.e3]), q, tolerance, iterations=30)
    if corrected is None or (np.linalg.norm(corrected) < 4.0) != (mod.radius < 4.0):
        raise ConsistencyError(f"could not project {mod.to_dict()} onto the modular curve of {q}")
    refined = Modulus.symmetric(*corrected)
    logger.debug("refined (%.6f, %.6f) to (%.12f, %.12f)", mod.e1, mod.e3, refined.e1, refined.e3)
    return refined


@dataclass
class StandardLoop:
    curve: SampledCurve
    modulus: Modulus
    q: Fraction
    wave_number: int
    wavelength: float
    monodromy: np.ndarray
    monodromy_defect: float
    closure_gap: float
    k: CurvatureProfile


def build_standard_loop(mod: Modulus, q: Optional[Fraction] = None,
                        detect: RationalDetect = RationalDetect(),
                        count: int = DEFAULT_SAMPLES, refine: bool = True,
                        closure_tolerance: float = 1e-5,
                        monodromy_tolerance: float = MONODROMY_TOLERANCE) -> StandardLoop:
    """
    The standard φ-loop of a symmetric modulus over its full period n·ω.
    The characteristic number is read from Φ̃2 unless given, and the
    modulus is projected onto Σ_q first when `refine` is set.
    """
    if mod.case != SYMMETRIC:
        raise InvalidModulusError("standard loops are defined for symmetric moduli")
    if q is None:
        detected = detect_rational(regularized_phi2(mod.e1, mod.e3), detect)
        if detected is None:
            raise NonClosureError(f"Φ̃2 of {mod.to_dict()} is not rational within {detect.tolerance:g}")
        q = Fraction(*detected)
    q = Fraction(q)
    if refine:
        mod = refine_to_modular_curve(mod, float(q))
    n = q.denominator
    if n > WAVE_NUMBER_BOUND:
        raise NonClosureError(f"wave number {n} exceeds the bound {WAVE_NUMBER_BOUND}")

    per_wave = max(16, -(-count // n))
    k = curvature_profile(mod, per_wave)
    frames = frenet_frames(k.tiled(n), standard_frame(mod))
    M = frames[per_wave] @ np.conj(frames[0]).T
    expected = np.diag([np.exp(2j * math.pi * float(q)), np.exp(-2j * math.pi * float(q))])
    defect = float(np.max(np.abs(M - expected)))
    gap = float(np.max(np.abs(frames[-1][:, 0] - frames[0][:, 0])))
    logger.info("standard loop q=%s n=%d monodromy defect %.2e closure gap %.2e", q, n, defect, gap)
    if gap > closure_tolerance:
        raise NonClosureError(f"loop does not close after {n} wavelengths (gap {gap:.2e})")
    if defect > monodromy_tolerance:
        raise ConsistencyError(f"monodromy differs from diag(e^(2πiq), e^(-2πiq)) by {defect:.2e}")
    curve = SampledCurve(frames[:-1, :, 0], n * k.period)
    return StandardLoop(curve=curve, modulus=mod, q=q, wave_number=n, wavelength=k.period,
                        monodromy=M, monodromy_defect=defect, closure_gap=gap, k=k)


def standard_phi_loop(mod: Modulus, count: int = DEFAULT_SAMPLES,
                      detect: RationalDetect = RationalDetect()) -> SampledCurve:
    return build_standard_loop(mod, detect=detect, count=count).curve


# Modular curves

@dataclass
class ModularCurveTrace:
    q: float
    points: List[Modulus] = field(default_factory=list)
    exceptional: Optional[Modulus] = None
    lower_limit: Optional[Tuple[float, float]] = None
    upper_limit: Optional[Tuple[float, float]] = None
    unbounded: bool = False
    p_minimum: Optional[Tuple[float, Modulus]] = None

    def asymptotic_slope(self, tail: int = 20) -> Optional[float]:
        """Slope e3/e1 of the chord through the last points of an unbounded trace."""
        if not self.unbounded or len(self.points) < tail + 1:
            return None
        first, last = self.points[-tail - 1], self.points[-1]
        return (last.e3 - first.e3) / (last.e1 - first.e1)


def _start_point(q: float, e1: float) -> np.ndarray:
    upper = math.sqrt(16.0 - e1 * e1) * (1.0 - 1e-12)
    lower = min(1.0 / q, 0.5 * upper)
    try:
        e3 = brentq(lambda value: regularized_phi2(e1, value) - q, lower, upper, xtol=1e-14)
    except ValueError as exc:
        raise ContinuationStallError(f"no point of the modular curve of {q} near the e3-axis") from exc
    return np.array([e1, e3])


def _end_point(q: float, e1: float, radius_max: float) -> Optional[np.ndarray]:
    lower = math.sqrt(16.0 - e1 * e1) * (1.0 + 1e-12)
    try:
        e3 = brentq(lambda value: regularized_phi2(e1, value) - q, lower, radius_max, xtol=1e-14)
    except ValueError:
        return None
    return np.array([e1, e3])


def _tangent(point: np.ndarray, q: float, previous: Optional[np.ndarray]) -> np.ndarray:
    gradient = _residual_gradient(point, q)
    tangent = np.array([-gradient[1], gradient[0]])
    tangent /= np.linalg.norm(tangent)
    reference = previous if previous is not None else np.array([1.0, 0.0])
    return tangent if tangent @ reference >= 0.0 else -tangent


def scan_modular_curve(q: float, e1_min: float = SCAN_E1_MIN,
                       radius_max: float = SCAN_RADIUS_MAX,
                       initial_step: float = SCAN_INITIAL_STEP,
                       max_step: float = SCAN_MAX_STEP,
                       tolerance: float = SCAN_NEWTON_TOLERANCE,
                       max_failures: int = SCAN_MAX_FAILURES,
                       max_points: int = 100000) -> ModularCurveTrace:
    """
    Trace Σ_q = {Φ̃2 = q} from its lower limit on the e3-axis by
    pseudo-arclength continuation: tangent predictor, Newton corrector
    along the gradient, step halved on failure and grown on success.
    The trace ends back at the axis or beyond `radius_max`.
    """
    _check_characteristic(q)
    trace = ModularCurveTrace(q=q)
    point = _start_point(q, e1_min)
    trace.points.append(Modulus.symmetric(*point))
    trace.lower_limit = (0.0, float(point[1]))
    tangent = _tangent(point, q, None)
    step = initial_step
    failures = 0
    logger.info("tracing the modular curve of %s from (%.4f, %.6f)", q, point[0], point[1])

    while True:
        if len(trace.points) >= max_points:
            raise ContinuationStallError(f"modular curve of {q} not finished after {max_points} points")
        predicted = point + step * tangent
        if predicted[0] <= e1_min:
            end = _end_point(q, e1_min, radius_max)
            if end is None:
                raise ContinuationStallError(f"modular curve of {q} returned to the axis without an end point")
            trace.points.append(Modulus.symmetric(*end))
            trace.upper_limit = (0.0, float(end[1]))
            break
        corrected = _correct(predicted, q, tolerance)
        if corrected is None or np.linalg.norm(corrected - point) > 2.0 * step:
            failures += 1
            step *= 0.5
            logger.debug("corrector failed at (%.6f, %.6f); step now %.2e", predicted[0], predicted[1], step)
            if failures >= max_failures:
                raise ContinuationStallError(
                    f"corrector failed {failures} times in a row near ({point[0]:.6f}, {point[1]:.6f})")
            continue
        failures = 0
        if (np.linalg.norm(corrected) < 4.0) != (np.linalg.norm(point) < 4.0):
            crossing = exceptional_point(q)
            distance = math.hypot(crossing.e1 - corrected[0], crossing.e3 - corrected[1])
            if distance > 2.0 * step:
                raise ConsistencyError(f"exceptional point of {q} lies {distance:.3e} away from the traced crossing")
            trace.exceptional = crossing
        point = corrected
        trace.points.append(Modulus.symmetric(*point))
        if np.linalg.norm(point) > radius_max:
            trace.unbounded = True
            break
        tangent = _tangent(point, q, tangent)
        step = min(1.5 * step, max_step)

    trace.p_minimum = _p_minimum(trace, q, tolerance)
    logger.info("modular curve of %s: %d points, unbounded=%s", q, len(trace.points), trace.unbounded)
    return trace


def _p_minimum(trace: ModularCurveTrace, q: float, tolerance: float) -> Optional[Tuple[float, Modulus]]:
    """Minimum of P_q along the trace, refined between the neighbours of the sampled minimum."""
    values = [time_periodicity_function(point) for point in trace.points]
    index = int(np.argmin(values))
    if index == 0 or index == len(values) - 1:
        return values[index], trace.points[index]
    left, centre, right = (np.array([p.e1, p.e3]) for p in trace.points[index - 1:index + 2])

    def on_curve(tau: float) -> Optional[np.ndarray]:
        # quadratic through the three neighbours, parametrized on [-1, 1]
        guess = centre + 0.5 * tau * (right - left) + 0.5 * tau * tau * (right - 2.0 * centre + left)
        return _correct(guess, q, tolerance)

    def objective(tau: float) -> float:
        point = on_curve(tau)
        return math.inf if point is None else time_periodicity_function(Modulus.symmetric(*point))

    result = minimize_scalar(objective, bounds=(-1.0, 1.0), method="bounded", options={"xatol": 1e-10})
    best = on_curve(float(result.x))
    if best is None or result.fun > values[index]:
        return values[index], trace.points[index]
    return float(result.fun), Modulus.symmetric(*best)


def modular_row(mod: Modulus) -> Dict[str, float]:
    """One CSV row of a traced modular curve."""
    quartic = quartic_from_modulus(mod)
    return {
        "e1": mod.e1,
        "e3": mod.e3,
        "phi2_regularized": regularized_phi2(mod.e1, mod.e3),
        "lambda": quartic.lam,
        "omega": quartic.omega,
        "P_q": time_periodicity_function(mod),
    }


# Time evolution

def time_evolution(loop: SampledCurve, mod: Modulus, t: float) -> SampledCurve:
    """γ̂(s, t) = exp(i(𝔪 - ¼b)t)·γ(s - at), for a loop whose momentum is diag(-λ, λ)."""
    quartic = quartic_from_modulus(mod)
    if t == 0.0:
        return SampledCurve(loop.samples.copy(), loop.period)
    shifted = spectral.shift(loop.samples, loop.period, -quartic.a * t)
    phases = np.exp(1j * (quartic.lam * _MOMENTUM.diagonal() - 0.25 * quartic.b) * t)
    return SampledCurve(shifted * phases[None, :], loop.period)


def time_periodicity_function(mod: Modulus, q: Optional[float] = None) -> float:
    """P_q(e) = π(e3² - e1²)|e| / (16 λ K(m)); q only names the modular curve."""
    if mod.case != SYMMETRIC:
        raise InvalidModulusError("the time periodicity function is defined for symmetric moduli")
    quartic = quartic_from_modulus(mod)
    return math.pi * (mod.e3 ** 2 - mod.e1 ** 2) * mod.radius / (16.0 * quartic.lam * ellip.complete_K(quartic.m))


@dataclass
class TimePeriodicity:
    value: float
    rational: Optional[Tuple[int, int]]
    gcd: Optional[int]
    period: Optional[float]

    @property
    def periodic(self) -> bool:
        return self.period is not None


def classify_time_periodicity(mod: Modulus, q: Fraction,
                              detect: RationalDetect = RationalDetect()) -> TimePeriodicity:
    """
    A φ-loop of Σ_q, q = m/n, moves periodically in time exactly when
    P_q = m̃/ñ is rational; the period is 2π ñ n / (h λ), h = gcd(n, m̃).
    """
    q = Fraction(q)
    value = time_periodicity_function(mod, float(q))
    rational = detect_rational(value, detect)
    if rational is None:
        return TimePeriodicity(value=value, rational=None, gcd=None, period=None)
    m_tilde, n_tilde = rational
    h = math.gcd(q.denominator, abs(m_tilde)) or 1
    lam = quartic_from_modulus(mod).lam
    period = 2.0 * math.pi * n_tilde * q.denominator / (h * lam)
    return TimePeriodicity(value=value, rational=rational, gcd=h, period=period)


# Homotopy

@dataclass
class HomotopyReport:
    clifford_winding: Optional[int]
    lagrangian_winding: Optional[int]
    crossings: Optional[int]
    clifford_index: int

    def to_dict(self) -> Dict[str, Optional[int]]:
        return {
            "clifford_winding": self.clifford_winding,
            "lagrangian_winding": self.lagrangian_winding,
            "crossings": self.crossings,
            "clifford_index": self.clifford_index,
        }


def homotopy_class(loop: SampledCurve, pole_distance: float = 1e-6) -> HomotopyReport:
    """
    Winding of the Clifford projection around the polar axis through (±1, 0, 0)
    over its own period, winding of the Lagrangian projection around the
    origin over the whole loop, and the number of Lagrangian double points.
    Windings are None when the curve passes through the axis.
    """
    eta = clifford_projection(loop)
    cl, _ = clifford_index_and_spin(loop)
    clifford = None
    if np.min(np.hypot(eta[:, 1], eta[:, 2])) > pole_distance:
        clifford = int(round(_turns(eta[:, 1:]) / cl))

    lagrangian = None
    crossings = None
    try:
        planar = heisenberg_projection(loop)[:, :2]
        if np.min(np.linalg.norm(planar, axis=1)) > pole_distance:
            lagrangian = winding_number(planar)
        crossings = len(lagrangian_crossings(loop))
    except LegendrianError as exc:
        logger.info("Lagrangian projection unavailable: %s", exc)
    return HomotopyReport(clifford_winding=clifford, lagrangian_winding=lagrangian,
                          crossings=crossings, clifford_index=cl)


def _turns(vectors: np.ndarray) -> float:
    angles = np.arctan2(vectors[:, 1], vectors[:, 0])
    steps = np.diff(np.append(angles, angles[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.sum(steps)) / (2.0 * math.pi)
