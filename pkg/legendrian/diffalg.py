"""
Exact differential polynomials in one dependent variable and the mKdV hierarchy.

A DiffPoly is a polynomial with rational coefficients in the jet variables
u0, u1, u2, ... (u_j standing for the j-th s-derivative of the curvature).
Monomials are stored as exponent tuples with trailing zeros trimmed, so
(2, 0, 1) is u0^2 u2 and the empty tuple is the constant monomial.

The hierarchy is produced by the recursion operator D² + D u D⁻¹ u acting on
M_1 = u1, with D⁻¹ realised by exact integration by parts. Each level keeps
the conserved density ρ_j, its Euler image E ρ_j, the flow M_j = D E ρ_j and
the components N_j = D⁻¹(u M_j), L_j = 2 E ρ_j of the vector field V_j.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from legendrian.config import HIERARCHY_MAX_LEVEL
from legendrian.errors import HierarchyError

Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _trim(exponents: Iterable[int]) -> Exponents:
    items = list(exponents)
    while items and items[-1] == 0:
        items.pop()
    return tuple(items)


def _bump(exponents: Exponents, index: int, delta: int) -> Exponents:
    items = list(exponents) + [0] * max(0, index + 1 - len(exponents))
    items[index] += delta
    return _trim(items)


class DiffPoly:
    """Immutable polynomial over Q in the jet variables u0, u1, ..."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Dict[Exponents, Scalar] = None):
        clean: Dict[Exponents, Fraction] = {}
        for exponents, coefficient in (terms or {}).items():
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                key = _trim(exponents)
                clean[key] = clean.get(key, Fraction(0)) + coefficient
                if clean[key] == 0:
                    del clean[key]
        self._terms = clean

    # constructors

    @classmethod
    def variable(cls, index: int) -> "DiffPoly":
        return cls({_bump((), index, 1): 1})

    @classmethod
    def constant(cls, value: Scalar) -> "DiffPoly":
        return cls({(): value})

    # inspection

    @property
    def terms(self) -> Dict[Exponents, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def order(self) -> int:
        """Highest jet index present, -1 for constants."""
        return max((len(e) - 1 for e in self._terms), default=-1)

    def degrees(self) -> List[int]:
        return sorted({sum(e) for e in self._terms})

    def homogeneous_part(self, degree: int) -> "DiffPoly":
        return DiffPoly({e: c for e, c in self._terms.items() if sum(e) == degree})

    def is_odd(self) -> bool:
        return all(sum(e) % 2 == 1 for e in self._terms)

    def is_even(self) -> bool:
        return all(sum(e) % 2 == 0 for e in self._terms)

    # arithmetic

    def __add__(self, other) -> "DiffPoly":
        other = _coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return DiffPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "DiffPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "DiffPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "DiffPoly":
        other = _coerce(other)
        terms: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                width = max(len(e1), len(e2))
                key = _trim(
                    (e1[i] if i < len(e1) else 0) + (e2[i] if i < len(e2) else 0)
                    for i in range(width)
                )
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return DiffPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "DiffPoly":
        result = DiffPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.constant(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"DiffPoly({to_text(self)!r})"

    # calculus

    def partial(self, index: int) -> "DiffPoly":
        """∂/∂u_index."""
        terms: Dict[Exponents, Fraction] = {}
        for e, c in self._terms.items():
            if index < len(e) and e[index] > 0:
                key = _bump(e, index, -1)
                terms[key] = terms.get(key, Fraction(0)) + c * e[index]
        return DiffPoly(terms)


def _coerce(value) -> DiffPoly:
    if isinstance(value, DiffPoly):
        return value
    return DiffPoly.constant(value)



def u(index: int) -> DiffPoly:
    """The jet variable u_index."""
    return DiffPoly.variable(index)


def total_derivative(P: DiffPoly) -> DiffPoly:
    """D P = Σ_j u_{j+1} ∂P/∂u_j."""
    result = DiffPoly()
    for j in range(P.order() + 1):
        result = result + u(j + 1) * P.partial(j)
    return result


def iterated_derivative(P: DiffPoly, times: int) -> DiffPoly:
    for _ in range(times):
        P = total_derivative(P)
    return P


def euler_operator(P: DiffPoly) -> DiffPoly:
    """E P = Σ_j (-D)^j ∂P/∂u_j; it annihilates exactly the total derivatives."""
    result = DiffPoly()
    for j in range(P.order() + 1):
        term = P.partial(j)
        for _ in range(j):
            term = -total_derivative(term)
        result = result + term
    return result


def _antiderivative_in(A: DiffPoly, index: int) -> DiffPoly:
    """∫ A du_index, term by term."""
    terms: Dict[Exponents, Fraction] = {}
    for e, c in A.terms.items():
        power = e[index] if index < len(e) else 0
        key = _bump(e, index, 1)
        terms[key] = terms.get(key, Fraction(0)) + c / (power + 1)
    return DiffPoly(terms)


def inverse_derivative(P: DiffPoly) -> DiffPoly:
    """
    The Q without constant term with D Q = P.

    Repeatedly strips the part of P linear in its top jet variable u_n by
    integrating the coefficient in u_{n-1}; raises HierarchyError if P is
    not a total derivative.
    """
    remainder = P
    result = DiffPoly()
    while not remainder.is_zero():
        n = remainder.order()
        if n < 1:
            raise HierarchyError(f"{to_text(P)} is not a total derivative")
        linear: Dict[Exponents, Fraction] = {}
        for e, c in remainder.terms.items():
            top = e[n] if n < len(e) else 0
            if top > 1:
                raise HierarchyError(f"{to_text(P)} is not a total derivative")
            if top == 1:
                linear[_bump(e, n, -1)] = c
        primitive = _antiderivative_in(DiffPoly(linear), n - 1)
        result = result + primitive
        remainder = remainder - total_derivative(primitive)
    return result


def density_from_euler_image(G: DiffPoly) -> DiffPoly:
    """A density ρ with E ρ = G, by the scaling homotopy ρ = Σ_d u0·G_d / (d + 1)."""
    rho = DiffPoly()
    for degree in G.degrees():
        rho = rho + u(0) * G.homogeneous_part(degree) * Fraction(1, degree + 1)
    return rho


def normalize_density(rho: DiffPoly) -> DiffPoly:
    """
    Canonical representative of ρ modulo total derivatives.

    Every monomial whose highest jet variable u_n (n >= 1) appears linearly
    is integrated by parts until none is left.
    """
    current = rho
    while True:
        target = None
        for e in sorted(current.terms, key=len, reverse=True):
            if len(e) >= 2 and e[-1] == 1:
                target = e
                break
        if target is None:
            return current
        n = len(target) - 1
        coefficient = current.terms[target]
        A = DiffPoly({_bump(target, n, -1): coefficient})
        primitive = _antiderivative_in(A, n - 1)
        # A u_n = D(primitive) - Σ_{i<n-1} u_{i+1} ∂primitive/∂u_i
        correction = DiffPoly()
        for i in range(n - 1):
            correction = correction + u(i + 1) * primitive.partial(i)
        current = current - DiffPoly({target: coefficient}) - correction


def equivalent_densities(P: DiffPoly, Q: DiffPoly) -> bool:
    """Whether P - Q is a total derivative."""
    return euler_operator(P - Q).is_zero()


def evaluate(P: DiffPoly, jet: Sequence):
    """Value of P at a jet [u0, u1, ...]; jet entries may be floats or numpy arrays."""
    if P.order() >= len(jet):
        raise HierarchyError(f"jet of length {len(jet)} too short for order {P.order()}")
    total = 0.0
    for e, c in P.terms.items():
        term = float(c)
        for index, power in enumerate(e):
            if power:
                term = term * jet[index] ** power
        total = total + term
    return total


def linear_part(P: DiffPoly) -> Dict[int, Fraction]:
    """Coefficients {j: c_j} of the degree-one monomials c_j u_j."""
    return {len(e) - 1: c for e, c in P.terms.items() if sum(e) == 1}


def to_text(P: DiffPoly) -> str:
    """Stable text form: "c * u0^a0 u1^a1 ..." terms joined by " + "."""
    if P.is_zero():
        return "0"
    def sort_key(e: Exponents):
        return (len(e), tuple(reversed(e)))
    parts = []
    for e in sorted(P.terms, key=sort_key, reverse=True):
        coefficient = P.terms[e]
        factors = " ".join(f"u{i}^{p}" for i, p in enumerate(e) if p)
        parts.append(f"{coefficient} * {factors}" if factors else f"{coefficient}")
    return " + ".join(parts)


@dataclass(frozen=True)
class HierarchyLevel:
    """One level j of the mKdV hierarchy."""

    index: int
    rho: DiffPoly
    euler_rho: DiffPoly
    M: DiffPoly
    N: DiffPoly
    L: DiffPoly

    def to_dict(self) -> Dict[str, object]:
        return {
            "index": self.index,
            "rho": to_text(self.rho),
            "M": to_text(self.M),
            "N": to_text(self.N),
            "L": to_text(self.L),
        }


def first_level() -> HierarchyLevel:
    u0 = u(0)
    half = Fraction(1, 2)
    return HierarchyLevel(
        index=1,
        rho=half * u0 * u0,
        euler_rho=u0,
        M=u(1),
        N=half * u0 * u0,
        L=2 * u0,
    )


def recursion_step(level: HierarchyLevel) -> HierarchyLevel:
    """
    Level j+1 from level j:

        E ρ_{j+1} = D² E ρ_j + u N_j,    M_{j+1} = D E ρ_{j+1},
        N_{j+1} = D⁻¹(u M_{j+1}),       L_{j+1} = 2 E ρ_{j+1}.
    """
    euler_next = iterated_derivative(level.euler_rho, 2) + u(0) * level.N
    M_next = total_derivative(euler_next)
    N_next = inverse_derivative(u(0) * M_next)
    rho_next = normalize_density(density_from_euler_image(euler_next))
    if not (M_next.is_odd() and rho_next.is_even()):
        raise HierarchyError(f"parity violated at level {level.index + 1}")
    return HierarchyLevel(
        index=level.index + 1,
        rho=rho_next,
        euler_rho=euler_next,
        M=M_next,
        N=N_next,
        L=2 * euler_next,
    )


@lru_cache(maxsize=None)
def _hierarchy(n_max: int) -> Tuple[HierarchyLevel, ...]:
    levels = [first_level()]
    while len(levels) < n_max:
        levels.append(recursion_step(levels[-1]))
    return tuple(levels)


def generate_hierarchy(n_max: int) -> List[HierarchyLevel]:
    """Levels 1..n_max; levels above LEGENDRIAN_HIERARCHY_MAX_LEVEL are refused."""
    if n_max < 1:
        raise HierarchyError(f"hierarchy depth must be positive, got {n_max}")
    if n_max > HIERARCHY_MAX_LEVEL:
        raise HierarchyError(f"hierarchy depth {n_max} exceeds the cap {HIERARCHY_MAX_LEVEL}")
    return list(_hierarchy(n_max))


def hierarchy_level(j: int) -> HierarchyLevel:
    return generate_hierarchy(j)[j - 1]
