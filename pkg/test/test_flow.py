import math

import numpy as np
import pytest

from legendrian import spectral
from legendrian.diffalg import evaluate, hierarchy_level, u
from legendrian.errors import BlowUpError, ValidationError
from legendrian.flow import (
    _SpectralStepper,
    FlowState,
    compatibility_residual,
    conserved_quantities,
    evolve_curvature,
    evolve_frames,
    field_along,
    flow_polynomial,
    hamiltonian_length_field,
    lax_matrix,
    pairing_scale,
    symplectic_pairing,
    vector_field_components,
    zn_components,
)
from legendrian.geom import CurvatureProfile, Frame, frenet_reconstruct, torus_knot_curve
from legendrian.stationary import (
    Modulus,
    build_standard_loop,
    curvature_profile,
    quartic_from_modulus,
    standard_frame,
    time_evolution,
)
from conftest import FIVE_SIXTHS, LOWER_BRANCH, smooth_profile


def random_state(rng, count=64, modes=3, amplitude=0.5) -> FlowState:
    return FlowState(k=CurvatureProfile(smooth_profile(rng, count, modes=modes, amplitude=amplitude), 2.0 * math.pi))


# ========== FLOW POLYNOMIALS ==========

def test_flow_polynomials():
    M2 = hierarchy_level(2).M
    assert flow_polynomial(0) == u(1)
    assert flow_polynomial(0, "V") == u(1)
    assert flow_polynomial(1) == M2
    assert flow_polynomial(1, "V") == M2 + 4 * u(1)


@pytest.mark.parametrize("n, kind", [(1, "W"), (-1, "Z")])
def test_flow_polynomial_rejects_bad_arguments(n, kind):
    with pytest.raises(ValidationError) as info:
        flow_polynomial(n, kind)
    assert info.value.exit_code == 2


# ========== CURVATURE EVOLUTION ==========

def test_constant_curvature_is_fixed():
    state = FlowState(k=CurvatureProfile(np.full(32, 0.7), 2.0 * math.pi))
    result = evolve_curvature(state, 1, 0.5)
    assert result.t == 0.5
    assert np.max(np.abs(result.k.values - 0.7)) < 1e-12


def test_symmetric_profile_on_the_a_zero_line_is_stationary():
    mod = Modulus.symmetric(2.0, 2.0)
    assert quartic_from_modulus(mod).a == 0.0
    k = curvature_profile(mod, 128)
    result = evolve_curvature(FlowState(k=k), 1, 0.5)
    assert np.max(np.abs(result.k.values - k.values)) < 1e-8


def test_symmetric_profile_travels_at_speed_a():
    mod = Modulus.symmetric(1.0, 2.5)
    quartic = quartic_from_modulus(mod)
    assert quartic.a == pytest.approx(1.3125)
    k = curvature_profile(mod, 128)
    for t in (0.3, quartic.omega / quartic.a):
        result = evolve_curvature(FlowState(k=k), 1, t)
        expected = spectral.shift(k.values, k.period, -quartic.a * t)
        assert np.max(np.abs(result.k.values - expected)) < 1e-5


def test_etd_coefficients_match_their_closed_forms():
    dt = 0.01
    stepper = _SpectralStepper(u(3), 64, 2.0 * math.pi, dt)
    hl = dt * (1j * stepper.kx) ** 3
    away = np.abs(hl) > 3.0
    assert np.count_nonzero(away) > 10
    z = hl[away]
    E = np.exp(z)
    closed = {
        "Q": dt * (np.exp(z / 2.0) - 1.0) / z,
        "f1": dt * (-4.0 - z + E * (4.0 - 3.0 * z + z ** 2)) / z ** 3,
        "f2": dt * (2.0 + z + E * (-2.0 + z)) / z ** 3,
        "f3": dt * (-4.0 - 3.0 * z - z ** 2 + E * (4.0 - z)) / z ** 3,
    }
    for name, expected in closed.items():
        assert np.max(np.abs(getattr(stepper, name)[away] - expected)) < 1e-12 * dt, name


def test_conserved_densities_stay_constant(rng):
    state = random_state(rng)
    result = evolve_curvature(state, 1, 0.2, snapshots=4)
    assert result.drift is not None and result.drift <= 1e-7
    assert len(result.snapshots) == 5
    assert len(result.conservation) == 5
    before = np.array(conserved_quantities(state.k))
    after = np.array(conserved_quantities(result.k))
    assert np.all(np.abs(after - before) <= 1e-7 * (1.0 + np.abs(before)))
    assert result.conservation[0].rho1 == pytest.approx(before[0])


def test_second_flow_conserves_densities(rng):
    state = random_state(rng, count=48, modes=2, amplitude=0.3)
    result = evolve_curvature(state, 2, 0.01)
    before = np.array(conserved_quantities(state.k))
    after = np.array(conserved_quantities(result.k))
    assert np.all(np.abs(after - before) <= 1e-6 * (1.0 + np.abs(before)))


def test_V_flow_is_Z_flow_in_a_moving_frame(rng):
    state = random_state(rng, modes=2, amplitude=0.4)
    t = 0.25
    z_flow = evolve_curvature(state, 1, t, kind="Z")
    v_flow = evolve_curvature(state, 1, t, kind="V")
    expected = spectral.shift(z_flow.k.values, state.k.period, 4.0 * t)
    assert np.max(np.abs(v_flow.k.values - expected)) < 1e-7


def test_blow_up_guard(rng):
    with pytest.raises(BlowUpError) as info:
        evolve_curvature(random_state(rng), 1, 0.1, blowup_factor=0.5)
    assert info.value.exit_code == 3


def test_backwards_time_is_rejected():
    state = FlowState(k=CurvatureProfile(np.zeros(16), 1.0), t=1.0)
    with pytest.raises(ValidationError):
        evolve_curvature(state, 1, 0.5)


# ========== LAX PAIR ==========

def test_lax_matrix_is_anti_hermitian(rng):
    jet = list(rng.standard_normal((3, 20)))
    P = lax_matrix(jet)
    assert np.max(np.abs(P + np.conj(np.swapaxes(P, 1, 2)))) < 1e-14


def test_zero_curvature_equation_holds_exactly_for_the_mkdv_rate(rng):
    k = CurvatureProfile(smooth_profile(rng, 64), 2.0 * math.pi)
    jet = spectral.jets(k.values, k.period, 3)
    rate = evaluate(hierarchy_level(2).M, jet)
    assert compatibility_residual(k.values, rate, k.period) < 1e-9
    assert compatibility_residual(k.values, np.zeros(k.count), k.period) > 1e-3


# ========== FRAME EVOLUTION ==========

def test_great_circle_slides_along_itself():
    k = CurvatureProfile(np.zeros(128), 2.0 * math.pi)
    result = evolve_frames(FlowState(k=k), 0.3, cfl=0.02)
    s = k.nodes - 4.0 * 0.3
    assert np.max(np.abs(result.curve.samples[:, 0] - np.cos(s))) < 1e-6
    assert np.max(np.abs(result.curve.samples[:, 1] - np.sin(s))) < 1e-6
    assert result.compatibility_residual == pytest.approx(0.0, abs=1e-10)


def test_frame_evolution_is_independent_of_the_route(rng):
    state = random_state(rng, modes=1, amplitude=0.3)
    direct = evolve_frames(state, 0.2)
    halfway = evolve_frames(state, 0.1)
    two_steps = evolve_frames(halfway.state, 0.2)
    assert np.max(np.abs(direct.curve.samples - two_steps.curve.samples)) < 1e-6
    assert np.max(np.abs(direct.state.k.values - two_steps.state.k.values)) < 1e-8


def test_evolved_frames_match_the_evolved_curvature(rng):
    state = random_state(rng, modes=1, amplitude=0.3)
    result = evolve_frames(state, 0.2)
    rebuilt = frenet_reconstruct(result.state.k, Frame(result.state.frame0))
    assert np.max(np.abs(rebuilt.samples - result.curve.samples)) < 1e-6
    assert result.compatibility_residual is not None and result.compatibility_residual < 1e-9


def test_standard_loop_moves_by_its_momentum():
    loop = build_standard_loop(Modulus.symmetric(*LOWER_BRANCH), q=FIVE_SIXTHS, count=768)
    state = FlowState(k=loop.k.tiled(loop.wave_number), frame0=standard_frame(loop.modulus))
    t = 0.05
    result = evolve_frames(state, t)
    expected = time_evolution(loop.curve, loop.modulus, t)
    assert np.max(np.abs(result.curve.samples - expected.samples)) < 1e-6


# ========== VECTOR FIELDS ==========

@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_hierarchy_fields_are_legendrian(rng, j):
    k = CurvatureProfile(smooth_profile(rng, 64, modes=2), 2.0 * math.pi)
    p, q, r = vector_field_components(j, k)
    assert np.max(np.abs(spectral.derivative(p, k.period) - k.values * q)) < 1e-8
    assert np.max(np.abs(spectral.derivative(r, k.period) - 2.0 * q)) < 1e-8


def test_z1_components(rng):
    k = CurvatureProfile(smooth_profile(rng, 64), 2.0 * math.pi)
    p, q, r = zn_components(1, k)
    assert np.allclose(p, 0.5 * k.values ** 2 - 4.0)
    assert np.allclose(q, spectral.derivative(k.values, k.period))
    assert np.allclose(r, 2.0 * k.values)


def test_length_field_is_the_first_hierarchy_field(rng):
    k = CurvatureProfile(smooth_profile(rng, 64), 2.0 * math.pi)
    q, r = hamiltonian_length_field(k)
    _, q1, r1 = vector_field_components(1, k)
    assert np.max(np.abs(q - q1)) < 1e-12
    assert np.max(np.abs(r - r1)) < 1e-12


@pytest.mark.parametrize("m, j", [(1, 1), (1, 2), (2, 3)])
def test_hierarchy_fields_are_in_involution(rng, m, j):
    k = CurvatureProfile(smooth_profile(rng, 64), 2.0 * math.pi)
    scale = pairing_scale(m, j, k)
    assert scale > 0.0
    assert abs(symplectic_pairing(m, j, k)) <= 1e-9 * scale


def test_z1_field_along_a_great_circle_is_the_tangent_scaled():
    k = CurvatureProfile(np.zeros(64), 2.0 * math.pi)
    curve = frenet_reconstruct(k, Frame.identity())
    field = field_along(curve, *zn_components(1, k))
    assert np.max(np.abs(field + 4.0 * curve.derivative())) < 1e-10


def test_hierarchy_fields_are_tangent_to_the_sphere():
    curve = torus_knot_curve(2, 3, 256)
    k = CurvatureProfile(np.full(curve.count, -1.0 / math.sqrt(6.0)), curve.period)
    field = field_along(curve, *vector_field_components(2, k))
    assert np.max(np.abs(np.real(np.sum(field * np.conj(curve.samples), axis=1)))) < 1e-9
