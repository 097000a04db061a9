"""
Hierarchy flows of Legendrian curves and their curvature.

The field V_j = N_j γ_s + M_j (iγ_s) + L_j (iγ) moves the curvature by
k_t = M_{j+1} + 4 M_j; the combination Z_n = Σ (-4)^{n-j} V_j moves it by the
pure mKdV flow k_t = M_{n+1}. Curvature is evolved pseudospectrally with
ETDRK4: the linear part of the right-hand side is integrated exactly and
the nonlinear remainder with the Kassam-Trefethen contour coefficients.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from legendrian import spectral
from legendrian.config import (
    BLOWUP_FACTOR,
    COMPATIBILITY_TOLERANCE,
    FLOW_CFL,
)
from legendrian.diffalg import (
    DiffPoly,
    evaluate,
    generate_hierarchy,
    iterated_derivative,
    linear_part,
)
from legendrian.errors import BlowUpError, CompatibilityError, ValidationError
from legendrian.geom import (
    CurvatureProfile,
    SampledCurve,
    frenet_frames,
    polar_unitary,
)
from legendrian.logging_utils import get_logger

logger = get_logger("FLOW")

_CONTOUR_POINTS = 32
FIELDS = ("Z", "V")


@dataclass
class ConservationRow:
    t: float
    rho1: float
    rho2: float
    rho3: float
    max_abs_k: float


@dataclass
class FlowState:
    """Curvature at time t, with the frame at s = 0 used for reconstruction."""

    k: CurvatureProfile
    t: float = 0.0
    frame0: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    snapshots: List[Tuple[float, np.ndarray]] = field(default_factory=list)
    conservation: List[ConservationRow] = field(default_factory=list)
    drift: Optional[float] = None


def flow_polynomial(n: int, kind: str = "Z") -> DiffPoly:
    """Right-hand side of k_t: M_{n+1} for Z_n, M_{n+1} + 4 M_n for V_n."""
    if kind not in FIELDS:
        raise ValidationError(f"unknown flow field {kind!r}; expected one of {FIELDS}")
    if n < 0:
        raise ValidationError(f"flow index must be non-negative, got {n}")
    levels = generate_hierarchy(n + 1)
    rhs = levels[n].M
    if kind == "V" and n >= 1:
        rhs = rhs + 4 * levels[n - 1].M
    return rhs


def conserved_quantities(k: CurvatureProfile) -> Tuple[float, float, float]:
    """∫ρ_1, ∫ρ_2, ∫ρ_3 over one period."""
    levels = generate_hierarchy(3)
    order = max(level.rho.order() for level in levels)
    jet = spectral.jets(k.values, k.period, max(order, 0))
    pad = np.zeros(k.count)
    rho1, rho2, rho3 = (float(spectral.integrate(evaluate(level.rho, jet) + pad, k.period)) for level in levels)
    return rho1, rho2, rho3


class _SpectralStepper:
    """ETDRK4 for k_t = (linear part) + (nonlinear part) of a DiffPoly on a real periodic grid."""

    def __init__(self, rhs: DiffPoly, count: int, period: float, dt: float):
        self.count = count
        self.period = period
        self.kx = 2.0 * math.pi / period * np.arange(count // 2 + 1)
        self.nyquist = count % 2 == 0
        linear = linear_part(rhs)
        symbol = np.zeros(self.kx.size, dtype=complex)
        for order, coefficient in linear.items():
            symbol += float(coefficient) * self._derivative_symbol(order)
        self.nonlinear = rhs - DiffPoly({(0,) * order + (1,): c for order, c in linear.items()})
        self.jet_order = max(self.nonlinear.order(), 0)
        self.set_step(symbol, dt)

    def _derivative_symbol(self, order: int) -> np.ndarray:
        symbol = (1j * self.kx) ** order
        if self.nyquist and order % 2 == 1:
            symbol[-1] = 0.0
        return symbol

    def set_step(self, symbol: np.ndarray, dt: float) -> None:
        self.dt = dt
        hl = dt * symbol
        self.E = np.exp(hl)
        self.E2 = np.exp(hl / 2.0)
        # full circle around each hl; the symbols are imaginary
        roots = np.exp(2j * math.pi * (np.arange(1, _CONTOUR_POINTS + 1) - 0.5) / _CONTOUR_POINTS)
        lr = hl[:, None] + roots[None, :]
        self.Q = dt * np.mean((np.exp(lr / 2.0) - 1.0) / lr, axis=1)
        self.f1 = dt * np.mean((-4.0 - lr + np.exp(lr) * (4.0 - 3.0 * lr + lr ** 2)) / lr ** 3, axis=1)
        self.f2 = dt * np.mean((2.0 + lr + np.exp(lr) * (-2.0 + lr)) / lr ** 3, axis=1)
        self.f3 = dt * np.mean((-4.0 - 3.0 * lr - lr ** 2 + np.exp(lr) * (4.0 - lr)) / lr ** 3, axis=1)

    def jets(self, v: np.ndarray, order: int) -> List[np.ndarray]:
        return [np.fft.irfft(self._derivative_symbol(j) * v, n=self.count) for j in range(order + 1)]

    def nonlinear_term(self, v: np.ndarray) -> np.ndarray:
        if self.nonlinear.is_zero():
            return np.zeros_like(v)
        values = evaluate(self.nonlinear, self.jets(v, self.jet_order)) + np.zeros(self.count)
        return np.fft.rfft(values)

    def step(self, v: np.ndarray) -> np.ndarray:
        nv = self.nonlinear_term(v)
        a = self.E2 * v + self.Q * nv
        na = self.nonlinear_term(a)
        b = self.E2 * v + self.Q * na
        nb = self.nonlinear_term(b)
        c = self.E2 * a + self.Q * (2.0 * nb - nv)
        nc = self.nonlinear_term(c)
        return self.E * v + nv * self.f1 + 2.0 * (na + nb) * self.f2 + nc * self.f3

    def values(self, v: np.ndarray) -> np.ndarray:
        return np.fft.irfft(v, n=self.count)


def time_step_bound(k: CurvatureProfile, n: int, cfl: float = FLOW_CFL) -> float:
    """C·h_s^{2n-1} / (1 + ‖k‖∞²); the stiff u_{2n+1} term is integrated exactly."""
    exponent = max(2 * n - 1, 1)
    return cfl * k.spacing ** exponent / (1.0 + float(np.max(np.abs(k.values))) ** 2)


def _schedule(t_span: float, bound: float) -> Tuple[int, float]:
    if t_span <= 0.0:
        return 0, 0.0
    steps = max(1, int(math.ceil(t_span / bound)))
    return steps, t_span / steps


def _snapshot_steps(steps: int, snapshots: int) -> set:
    if snapshots <= 0 or steps == 0:
        return set()
    return {int(round(i * steps / snapshots)) for i in range(1, snapshots + 1)}


def _record(state: FlowState, t: float, values: np.ndarray) -> None:
    profile = CurvatureProfile(values, state.k.period)
    rho1, rho2, rho3 = conserved_quantities(profile)
    state.snapshots.append((t, values.copy()))
    state.conservation.append(ConservationRow(t, rho1, rho2, rho3, float(np.max(np.abs(values)))))


def _guard(values: np.ndarray, limit: float, t: float) -> None:
    peak = float(np.max(np.abs(values)))
    if not math.isfinite(peak) or peak > limit:
        raise BlowUpError(f"curvature reached {peak:.3e} at t={t:.6f} (limit {limit:.3e})")


def evolve_curvature(state: FlowState, n: int, t_end: float, kind: str = "Z",
                     snapshots: int = 0, cfl: float = FLOW_CFL,
                     blowup_factor: float = BLOWUP_FACTOR) -> FlowState:
    """
    Evolve the curvature from state.t to t_end under k_t = M_{n+1} (kind "Z")
    or k_t = M_{n+1} + 4 M_n (kind "V"). The returned state carries
    `snapshots` evenly spaced samples and their conserved quantities,
    starting with the initial data, and `drift`, the largest change
    |Δ∫ρ_j| / (1 + |∫ρ_j|) between the initial and final profiles.
    """
    if t_end < state.t:
        raise ValidationError(f"t_end={t_end} precedes the current time {state.t}")
    rhs = flow_polynomial(n, kind)
    steps, dt = _schedule(t_end - state.t, time_step_bound(state.k, n, cfl))
    limit = blowup_factor * max(float(np.max(np.abs(state.k.values))), 1.0)
    result = FlowState(k=state.k, t=state.t, frame0=state.frame0)
    _record(result, state.t, state.k.values)
    if steps == 0:
        result.drift = 0.0
        return result

    logger.info("evolving %s_%d over [%.4f, %.4f] in %d steps", kind, n, state.t, t_end, steps)
    stepper = _SpectralStepper(rhs, state.k.count, state.k.period, dt)
    v = np.fft.rfft(state.k.values)
    marks = _snapshot_steps(steps, snapshots)
    for index in range(1, steps + 1):
        v = stepper.step(v)
        values = stepper.values(v)
        t = state.t + index * dt
        _guard(values, limit, t)
        if index in marks:
            _record(result, t, values)
    result.k = CurvatureProfile(stepper.values(v), state.k.period)
    result.t = t_end
    drift = max(
        abs(last - first) / (1.0 + abs(first))
        for first, last in zip(
            (result.conservation[0].rho1, result.conservation[0].rho2, result.conservation[0].rho3),
            conserved_quantities(result.k),
        )
    )
    logger.debug("relative drift of conserved densities %.3e", drift)
    result.drift = drift
    return result


def lax_matrix(jet: List[np.ndarray]) -> np.ndarray:
    """P of the Z_1 flow, Γ_t = Γ P, from the jet (k, k_s, k_ss); shape (N, 2, 2)."""
    k, ks, kss = jet[0], jet[1], jet[2]
    P = np.empty(k.shape + (2, 2), dtype=complex)
    P[..., 0, 0] = 2j * k
    P[..., 0, 1] = 4.0 - 0.5 * k ** 2 + 1j * ks
    P[..., 1, 0] = 0.5 * k ** 2 - 4.0 + 1j * ks
    P[..., 1, 1] = 1j * (kss + 0.5 * k ** 3 - 2.0 * k)
    return P


def _lax_matrix_rate(jet: List[np.ndarray], rates: List[np.ndarray]) -> np.ndarray:
    """∂P/∂t given k and its time derivatives (k_t, k_st, k_sst)."""
    k = jet[0]
    kt, kst, ksst = rates
    P = np.empty(k.shape + (2, 2), dtype=complex)
    P[..., 0, 0] = 2j * kt
    P[..., 0, 1] = -k * kt + 1j * kst
    P[..., 1, 0] = k * kt + 1j * kst
    P[..., 1, 1] = 1j * (ksst + 1.5 * k ** 2 * kt - 2.0 * kt)
    return P


def compatibility_residual(k_values: np.ndarray, k_rate: np.ndarray, period: float) -> float:
    """max |U_t - P_s - [U, P]| for U = [[0, -1], [1, ik]] and the Z_1 matrix P."""
    jet = spectral.jets(k_values, period, 3)
    P = lax_matrix(jet)
    P_s = _lax_matrix_rate(jet, [jet[1], jet[2], jet[3]])
    U = np.zeros_like(P)
    U[..., 0, 1] = -1.0
    U[..., 1, 0] = 1.0
    U[..., 1, 1] = 1j * jet[0]
    U_t = np.zeros_like(P)
    U_t[..., 1, 1] = 1j * k_rate
    residual = U_t - P_s - (U @ P - P @ U)
    return float(np.max(np.abs(residual)))


@dataclass
class FrameFlowResult:
    curve: SampledCurve
    frames: np.ndarray
    state: FlowState
    compatibility_residual: Optional[float]


def evolve_frames(state: FlowState, t_end: float, cfl: float = FLOW_CFL,
                  compatibility_tolerance: float = COMPATIBILITY_TOLERANCE) -> FrameFlowResult:
    """
    Z_1 evolution of the whole frame field Γ(s_j, t): the curvature follows
    k_t = M_2 while every node integrates Γ_t = Γ P(k) by RK4, with P at the
    half step from cubic Hermite interpolation in time.
    """
    k0 = state.k
    frames = frenet_frames(k0, state.frame0)[:-1]
    rhs = flow_polynomial(1, "Z")
    rates_poly = [rhs, iterated_derivative(rhs, 1), iterated_derivative(rhs, 2)]
    order = max(p.order() for p in rates_poly)
    steps, dt = _schedule(t_end - state.t, time_step_bound(k0, 1, cfl))
    if steps == 0:
        curve = SampledCurve(frames[:, :, 0], k0.period)
        return FrameFlowResult(curve, frames, FlowState(k=k0, t=state.t, frame0=frames[0]), None)

    logger.info("evolving Z_1 frames over [%.4f, %.4f] in %d steps", state.t, t_end, steps)
    stepper = _SpectralStepper(rhs, k0.count, k0.period, dt)
    limit = BLOWUP_FACTOR * max(float(np.max(np.abs(k0.values))), 1.0)

    def matrices(v: np.ndarray):
        jet = stepper.jets(v, order)
        rates = [evaluate(p, jet) + np.zeros(k0.count) for p in rates_poly]
        return lax_matrix(jet), _lax_matrix_rate(jet, rates), jet[0], rates[0]

    v = np.fft.rfft(k0.values)
    P0, Pt0, _, _ = matrices(v)
    for index in range(1, steps + 1):
        v_next = stepper.step(v)
        P1, Pt1, values, rate = matrices(v_next)
        _guard(values, limit, state.t + index * dt)
        Pm = 0.5 * (P0 + P1) + dt / 8.0 * (Pt0 - Pt1)
        s1 = frames @ P0
        s2 = (frames + 0.5 * dt * s1) @ Pm
        s3 = (frames + 0.5 * dt * s2) @ Pm
        s4 = (frames + dt * s3) @ P1
        frames = polar_unitary(frames + dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4))
        v, P0, Pt0 = v_next, P1, Pt1

    # k_t is the rate the stepper integrates, evaluated at the final state
    residual = compatibility_residual(values, rate, k0.period)
    logger.debug("zero-curvature residual %.3e", residual)
    if residual > compatibility_tolerance:
        raise CompatibilityError(f"zero-curvature residual {residual:.3e} exceeds {compatibility_tolerance:.1e}")

    final = FlowState(k=CurvatureProfile(stepper.values(v), k0.period), t=t_end, frame0=frames[0])
    return FrameFlowResult(SampledCurve(frames[:, :, 0], k0.period), frames, final, residual)


def z1_frame_evolution(state: FlowState, t_end: float) -> SampledCurve:
    """Curve at t_end under the Z_1 flow, starting from the reconstruction of state."""
    return evolve_frames(state, t_end).curve


def vector_field_components(j: int, k: CurvatureProfile) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(p, q, r) = (N_j, M_j, L_j) of V_j along a unit-speed curve; V_0 = γ_s."""
    if j == 0:
        ones = np.ones(k.count)
        return ones, np.zeros(k.count), np.zeros(k.count)
    level = generate_hierarchy(j)[j - 1]
    order = max(level.N.order(), level.M.order(), level.L.order(), 0)
    jet = spectral.jets(k.values, k.period, order)
    pad = np.zeros(k.count)
    return (
        evaluate(level.N, jet) + pad,
        evaluate(level.M, jet) + pad,
        evaluate(level.L, jet) + pad,
    )


def zn_components(n: int, k: CurvatureProfile) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Components of Z_n = Σ_{j=0}^{n} (-4)^{n-j} V_j."""
    p, q, r = (np.zeros(k.count) for _ in range(3))
    for j in range(n + 1):
        weight = (-4.0) ** (n - j)
        pj, qj, rj = vector_field_components(j, k)
        p, q, r = p + weight * pj, q + weight * qj, r + weight * rj
    return p, q, r


def field_along(curve: SampledCurve, p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """The vector field p γ_s + q (iγ_s) + r (iγ) at the samples of a unit-speed curve."""
    tangent = curve.derivative()
    return p[:, None] * tangent + 1j * q[:, None] * tangent + 1j * r[:, None] * curve.samples


def hamiltonian_length_field(k: CurvatureProfile) -> Tuple[np.ndarray, np.ndarray]:
    """(q, r) = (k_s, 2k): the Hamiltonian field of four times the length."""
    return spectral.derivative(k.values, k.period), 2.0 * k.values


def symplectic_pairing(m: int, j: int, k: CurvatureProfile) -> float:
    """Ω(V_m, V_j) = ∫ L_m D(L_j) ds."""
    levels = generate_hierarchy(max(m, j))
    first = levels[m - 1].L
    second = iterated_derivative(levels[j - 1].L, 1)
    jet = spectral.jets(k.values, k.period, max(first.order(), second.order(), 0))
    integrand = evaluate(first * second, jet) + np.zeros(k.count)
    return float(spectral.integrate(integrand, k.period))


def pairing_scale(m: int, j: int, k: CurvatureProfile) -> float:
    """∫ |L_m| |D L_j| ds, the natural size against which a pairing is small."""
    levels = generate_hierarchy(max(m, j))
    first = levels[m - 1].L
    second = iterated_derivative(levels[j - 1].L, 1)
    jet = spectral.jets(k.values, k.period, max(first.order(), second.order(), 0))
    magnitude = np.abs(evaluate(first, jet) + np.zeros(k.count)) * np.abs(evaluate(second, jet) + np.zeros(k.count))
    return float(spectral.integrate(magnitude, k.period))
