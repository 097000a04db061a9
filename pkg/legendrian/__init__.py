"""
Legendrian curves in S³ and the mKdV hierarchy.

This package provides:
- ellip: complete elliptic integrals and Jacobi functions
- diffalg: differential polynomials and the hierarchy recursion
- geom: sampled curves, Frenet frames and the Clifford/Heisenberg projections
- invariants: Maslov, Clifford index, spin, turning and Bennequin numbers
- flow: the V_j / Z_n flows on curvature and frames
- stationary: stationary curves of Z_1, their closure and modular curves

Usage:
    from legendrian import torus_knot_curve, compute_invariants, closure_quanta, Modulus
"""

from legendrian.errors import (
    LegendrianError,
    ValidationError,
    NumericalError,
)

from legendrian.ellip import (
    complete_K,
    complete_Pi,
    jacobi_cn_dn_sn,
)

from legendrian.diffalg import (
    DiffPoly,
    HierarchyLevel,
    evaluate,
    euler_operator,
    generate_hierarchy,
    hierarchy_level,
    inverse_derivative,
    total_derivative,
    u,
)

from legendrian.geom import (
    CurvatureProfile,
    Frame,
    SampledCurve,
    clifford_projection,
    curvature_of,
    frenet_reconstruct,
    heisenberg_projection,
    lagrangian_projection,
    legendrian_from_lagrangian,
    legendrian_lift,
    torus_knot_curve,
)

from legendrian.invariants import (
    InvariantReport,
    RationalDetect,
    bennequin_number,
    clifford_index_and_spin,
    compute_invariants,
    detect_rational,
    maslov_index,
    turning_number,
)

from legendrian.flow import (
    FlowState,
    evolve_curvature,
    hamiltonian_length_field,
    symplectic_pairing,
    z1_frame_evolution,
)

from legendrian.stationary import (
    ClosureReport,
    Modulus,
    QuarticData,
    closure_quanta,
    curvature_profile,
    momentum_field,
    quartic_from_modulus,
    reconstruct_frame_by_quadrature,
    scan_modular_curve,
    standard_phi_loop,
    time_evolution,
    time_periodicity_function,
)

__all__ = [
    # Errors
    "LegendrianError",
    "ValidationError",
    "NumericalError",

    # Elliptic functions
    "complete_K",
    "complete_Pi",
    "jacobi_cn_dn_sn",

    # Differential algebra
    "DiffPoly",
    "HierarchyLevel",
    "evaluate",
    "euler_operator",
    "generate_hierarchy",
    "hierarchy_level",
    "inverse_derivative",
    "total_derivative",
    "u",

    # Geometry
    "CurvatureProfile",
    "Frame",
    "SampledCurve",
    "clifford_projection",
    "curvature_of",
    "frenet_reconstruct",
    "heisenberg_projection",
    "lagrangian_projection",
    "legendrian_from_lagrangian",
    "legendrian_lift",
    "torus_knot_curve",

    # Invariants
    "InvariantReport",
    "RationalDetect",
    "bennequin_number",
    "clifford_index_and_spin",
    "compute_invariants",
    "detect_rational",
    "maslov_index",
    "turning_number",

    # Flows
    "FlowState",
    "evolve_curvature",
    "hamiltonian_length_field",
    "symplectic_pairing",
    "z1_frame_evolution",

    # Stationary curves
    "ClosureReport",
    "Modulus",
    "QuarticData",
    "closure_quanta",
    "curvature_profile",
    "momentum_field",
    "quartic_from_modulus",
    "reconstruct_frame_by_quadrature",
    "scan_modular_curve",
    "standard_phi_loop",
    "time_evolution",
    "time_periodicity_function",
]
