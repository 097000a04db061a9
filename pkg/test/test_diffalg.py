from fractions import Fraction

import numpy as np
import pytest

from legendrian.config import HIERARCHY_MAX_LEVEL
from legendrian.diffalg import (
    DiffPoly,
    equivalent_densities,
    euler_operator,
    evaluate,
    generate_hierarchy,
    hierarchy_level,
    inverse_derivative,
    iterated_derivative,
    linear_part,
    normalize_density,
    to_text,
    total_derivative,
    u,
)
from legendrian.errors import HierarchyError

half = Fraction(1, 2)

# ========== RANDOM POLYNOMIALS ==========

def random_polynomial(rng, terms: int = 5) -> DiffPoly:
    poly = {}
    for _ in range(rng.integers(0, terms + 1)):
        exponents = tuple(int(e) for e in rng.integers(0, 4, size=rng.integers(0, 5)))
        poly[exponents] = Fraction(int(rng.integers(-35, 36)), int(rng.integers(1, 8)))
    return DiffPoly(poly)


RANDOM_SEEDS = list(range(40))


# ========== ALGEBRA ==========

def test_arithmetic_with_scalars():
    P = 2 * u(0) * u(1) + Fraction(1, 3)
    assert P - Fraction(1, 3) == 2 * u(1) * u(0)
    assert (u(0) + 1) ** 2 == u(0) * u(0) + 2 * u(0) + 1
    assert (P - P).is_zero()


def test_total_derivative_follows_chain_rule():
    assert total_derivative(u(0) ** 3) == 3 * u(0) ** 2 * u(1)
    assert total_derivative(u(0) * u(2)) == u(1) * u(2) + u(0) * u(3)
    assert total_derivative(DiffPoly.constant(7)).is_zero()


def test_inverse_derivative_of_non_derivative_raises():
    with pytest.raises(HierarchyError):
        inverse_derivative(u(0) ** 2)
    with pytest.raises(HierarchyError):
        inverse_derivative(u(1) ** 2)


def test_normalize_density_moves_linear_top_variables():
    assert normalize_density(u(0) * u(2)) == -u(1) * u(1)
    assert equivalent_densities(u(0) ** 3 * u(2), -3 * u(0) ** 2 * u(1) ** 2)


@pytest.mark.parametrize("seed", RANDOM_SEEDS)
def test_euler_annihilates_total_derivatives(seed):
    P = random_polynomial(np.random.default_rng(seed))
    assert euler_operator(total_derivative(P)).is_zero()


@pytest.mark.parametrize("seed", RANDOM_SEEDS)
def test_inverse_derivative_undoes_total_derivative(seed):
    P = random_polynomial(np.random.default_rng(seed))
    constant = P.terms.get((), Fraction(0))
    assert inverse_derivative(total_derivative(P)) == P - constant


@pytest.mark.parametrize("seed", RANDOM_SEEDS)
def test_normalized_density_is_equivalent(seed):
    P = random_polynomial(np.random.default_rng(seed))
    assert equivalent_densities(normalize_density(P), P)


def test_evaluate_on_arrays():
    s = np.linspace(0.0, 1.0, 5)
    jet = [np.sin(s), np.cos(s)]
    values = evaluate(half * u(0) ** 2 + u(1), jet)
    assert np.allclose(values, 0.5 * np.sin(s) ** 2 + np.cos(s))


def test_evaluate_rejects_short_jets():
    with pytest.raises(HierarchyError):
        evaluate(u(3), [np.zeros(3)])


def test_to_text_is_stable():
    P = u(1) + Fraction(3, 2) * u(0) ** 2 * u(1)
    assert to_text(P) == to_text(DiffPoly(dict(reversed(list(P.terms.items())))))
    assert to_text(DiffPoly()) == "0"


# ========== HIERARCHY ==========

def test_first_levels_match_the_closed_forms():
    levels = generate_hierarchy(3)
    assert [level.index for level in levels] == [1, 2, 3]
    assert levels[0].M == u(1)
    assert levels[1].M == u(3) + Fraction(3, 2) * u(0) ** 2 * u(1)
    assert levels[2].M == (
        u(5)
        + Fraction(5, 2) * u(0) ** 2 * u(3)
        + 10 * u(0) * u(1) * u(2)
        + Fraction(5, 2) * u(1) ** 3
        + Fraction(15, 8) * u(1) * u(0) ** 4
    )


def test_densities_match_up_to_total_derivatives():
    levels = generate_hierarchy(3)
    assert equivalent_densities(levels[0].rho, half * u(0) ** 2)
    assert equivalent_densities(levels[1].rho, -half * u(1) ** 2 + Fraction(1, 8) * u(0) ** 4)
    rho3 = (
        half * u(2) ** 2
        + Fraction(5, 6) * u(0) ** 3 * u(2)
        + Fraction(5, 4) * u(0) ** 2 * u(1) ** 2
        + Fraction(1, 16) * u(0) ** 6
    )
    assert equivalent_densities(levels[2].rho, rho3)


@pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
def test_level_structure(j):
    level = hierarchy_level(j)
    assert euler_operator(level.rho) == level.euler_rho
    assert level.M == total_derivative(level.euler_rho)
    assert total_derivative(level.N) == u(0) * level.M
    assert level.L == 2 * level.euler_rho
    assert level.M.is_odd() and level.rho.is_even()
    assert level.M.order() == 2 * j - 1


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_recursion_operator_maps_M_j_to_M_next(j):
    M = hierarchy_level(j).M
    expected = iterated_derivative(M, 2) + total_derivative(u(0) * inverse_derivative(u(0) * M))
    assert hierarchy_level(j + 1).M == expected


@pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
def test_linear_part_is_the_top_derivative(j):
    assert linear_part(hierarchy_level(j).M) == {2 * j - 1: Fraction(1)}


def test_hierarchy_cap():
    with pytest.raises(HierarchyError) as info:
        generate_hierarchy(HIERARCHY_MAX_LEVEL + 1)
    assert info.value.exit_code == 3
    with pytest.raises(HierarchyError):
        generate_hierarchy(0)


def test_level_to_dict_uses_text():
    data = hierarchy_level(1).to_dict()
    assert data["index"] == 1
    assert data["M"] == to_text(u(1))
