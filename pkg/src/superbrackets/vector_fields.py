"""Formal polynomial vector fields on a graded space V, truncated by degree.

A field is stored by its Taylor coefficients ``T^j_m`` on canonical lower
tuples m (non-decreasing, no odd index repeated).  The single normalization
used everywhere: ``T^j_m`` is the j-th component of

    [...[[X, ∂_{m_1}], ∂_{m_2}], ..., ∂_{m_k}](0)

so the Taylor table of a field *is* its bracket table, and the 0-th
coefficient is X(0).  On monomials this means

    X = Σ_{j, m} T^j_m / χ(m, j) · ξ^{m_1} ⋯ ξ^{m_k} ∂_j

with χ(m, j) = ±Π mult(m)! the same commutator chain applied to the monomial
(see :func:`monomial_factor`); the sign accounts for moving odd ∂'s past
odd ξ's.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .brackets import SymmetricBracketFamily, derived_bracket_family, v_is_abelian
from .errors import ArgumentError, PreconditionError
from .graded import GradedSpace, add_into, is_canonical
from .superalgebra import Decomposition, Derivation, check_preserves_k, derivation_commutator


def _sign(p):
    return -1 if p % 2 else 1


# ---------------------------------------------------------------------------
# supercommutative monomials on V


def mono_parity(m, par) -> int:
    return sum(par[i] for i in m) % 2


def mono_mul(a: tuple, b: tuple, par):
    """``ξ^a ξ^b`` for canonical a, b as ``(sign, monomial)``; sign 0 if it vanishes."""
    odd_b = [y for y in b if par[y]]
    swaps = 0
    for x in a:
        if par[x]:
            if x in odd_b:
                return 0, ()
            swaps += sum(1 for y in odd_b if y < x)
    return _sign(swaps), tuple(sorted(a + b))


def mono_derivative(i: int, m: tuple, par):
    """Left derivative ∂/∂ξ^i of ξ^m as ``(coefficient, monomial)``; coefficient 0 if absent."""
    if i not in m:
        return 0, ()
    p = m.index(i)
    r = m.count(i)
    before = sum(par[x] for x in m[:p])
    coeff = r * _sign(par[i] * before)
    return coeff, m[:p] + m[p + 1:]


@lru_cache(maxsize=None)
def _chain(m: tuple, j: int, par: tuple) -> Fraction:
    # [[ξ^m ∂_j, ∂_{m_1}], ..., ∂_{m_k}] evaluated at 0, using
    # [f ∂_j, ∂_i] = -(-1)^{(f + j) i} (∂_i f) ∂_j
    coeff = Fraction(1)
    f = m
    for i in m:
        s = -_sign((mono_parity(f, par) + par[j]) * par[i])
        c, f = mono_derivative(i, f, par)
        coeff *= s * c
    return coeff


def monomial_factor(space: GradedSpace, m: tuple, j: int) -> Fraction:
    """Coefficient of ``ξ^m ∂_j`` per unit Taylor coefficient ``T^j_m``.

    Equals ``1 / χ`` where χ = ±Π mult(m)! is the commutator chain of the
    monomial itself; nonzero for every canonical m.
    """
    return 1 / _chain(tuple(m), j, space.parities)


# ---------------------------------------------------------------------------
# fields


class FormalVectorField:
    """Truncated formal vector field with graded-symmetric Taylor coefficients.

    ``coefficients[(j, m)]`` is ``T^j_m``.  ``truncated`` records that some
    operation discarded terms above ``degree_cap``; ``exact_through`` is the
    highest degree whose coefficients are known to be complete.
    """

    def __init__(self, space: GradedSpace, parity: int, degree_cap: int, coefficients: Mapping,
                 truncated: bool = False, exact_through: int | None = None):
        par = space.parities
        clean = {}
        for (j, m), c in coefficients.items():
            m = tuple(m)
            if not c:
                continue
            if not 0 <= j < space.dim or any(not 0 <= i < space.dim for i in m):
                raise ArgumentError(f"index out of range in coefficient ({j}, {m})")
            if not is_canonical(m, par):
                raise ArgumentError(f"lower tuple {m} is not canonical")
            if len(m) > degree_cap:
                raise ArgumentError(f"degree {len(m)} exceeds the cap {degree_cap}")
            if (mono_parity(m, par) + par[j]) % 2 != parity:
                raise ArgumentError(f"coefficient ({j}, {m}) does not have parity {parity}")
            clean[(j, m)] = Fraction(c)
        self.space = space
        self.parity = parity
        self.degree_cap = degree_cap
        self.coefficients = clean
        self.truncated = truncated
        self.exact_through = degree_cap if exact_through is None else min(exact_through, degree_cap)

    @classmethod
    def from_monomials(cls, space, parity, degree_cap, monomials: Mapping, **kw):
        """From coefficients of ``ξ^m ∂_j`` keyed by ``(j, m)``."""
        return cls(space, parity, degree_cap,
                   {(j, tuple(m)): c / monomial_factor(space, tuple(m), j) for (j, m), c in monomials.items() if c},
                   **kw)

    def monomials(self) -> dict:
        return {(j, m): c * monomial_factor(self.space, m, j) for (j, m), c in self.coefficients.items()}

    def degree_part(self, k: int) -> dict:
        return {key: c for key, c in self.coefficients.items() if len(key[1]) == k}

    def has_constant_term(self) -> bool:
        return any(not m for _, m in self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def _combine(self, other, scale):
        if self.space != other.space or self.degree_cap != other.degree_cap:
            raise ArgumentError("fields on different spaces or caps")
        if self.parity != other.parity and not (self.is_zero() or other.is_zero()):
            raise ArgumentError("sum of fields of different parity")
        coeffs = dict(self.coefficients)
        add_into(coeffs, other.coefficients, scale)
        parity = self.parity if not self.is_zero() else other.parity
        return FormalVectorField(self.space, parity, self.degree_cap, coeffs,
                                 self.truncated or other.truncated,
                                 min(self.exact_through, other.exact_through))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scaled(self, c):
        c = Fraction(c)
        return FormalVectorField(self.space, self.parity, self.degree_cap,
                                 {k: c * v for k, v in self.coefficients.items()},
                                 self.truncated, self.exact_through)

    def __eq__(self, other):
        if not isinstance(other, FormalVectorField):
            return NotImplemented
        return (self.space == other.space and self.degree_cap == other.degree_cap
                and self.coefficients == other.coefficients
                and (self.parity == other.parity or self.is_zero()))

    __hash__ = None

    def __repr__(self):
        return f"FormalVectorField(parity={self.parity}, cap={self.degree_cap}, terms={len(self.coefficients)})"


def zero_field(space, parity=0, degree_cap=1) -> FormalVectorField:
    return FormalVectorField(space, parity, degree_cap, {})


def _apply(fx: dict, gy: dict, par) -> dict:
    """Monomial form of X(g^k) ∂_k, with X = Σ f^j ∂_j acting on coefficients of Y."""
    out: dict = {}
    for (j, mf), cf in fx.items():
        for (k, mg), cg in gy.items():
            d, rest = mono_derivative(j, mg, par)
            if not d:
                continue
            s, prod = mono_mul(mf, rest, par)
            if s:
                add_into(out, {(k, prod): cf * cg * d * s})
    return out


def field_commutator(X: FormalVectorField, Y: FormalVectorField, degree_cap: int | None = None) -> FormalVectorField:
    """Graded commutator ``[X, Y] = X(g^k)∂_k - (-1)^{XY} Y(f^k)∂_k``.

    Terms above the cap are dropped and the result flagged as truncated.
    """
    if X.space != Y.space:
        raise ArgumentError("fields live on different spaces")
    if degree_cap is None:
        if X.degree_cap != Y.degree_cap:
            raise ArgumentError("fields have different degree caps")
        degree_cap = X.degree_cap
    par = X.space.parities
    fx, gy = X.monomials(), Y.monomials()
    mono = _apply(fx, gy, par)
    add_into(mono, _apply(gy, fx, par), -_sign(X.parity * Y.parity))
    kept = {key: c for key, c in mono.items() if len(key[1]) <= degree_cap}
    truncated = X.truncated or Y.truncated or len(kept) != len(mono)
    exact = min(X.exact_through, Y.exact_through, degree_cap)
    if X.has_constant_term():
        exact = min(exact, Y.exact_through - 1)
    if Y.has_constant_term():
        exact = min(exact, X.exact_through - 1)
    return FormalVectorField.from_monomials(X.space, (X.parity + Y.parity) % 2, degree_cap, kept,
                                            truncated=truncated, exact_through=exact)


def field_square(X: FormalVectorField, degree_cap: int | None = None) -> FormalVectorField:
    """½[X, X] for odd X."""
    if X.parity != 1:
        raise ArgumentError("the square ½[X,X] is defined for odd fields")
    return field_commutator(X, X, degree_cap).scaled(Fraction(1, 2))


def brackets_from_field(X: FormalVectorField, max_arity: int) -> SymmetricBracketFamily:
    """Brackets ``{e_m}_X = [...[X, e_{m_1}], ..., e_{m_k}](0)``; the 0-bracket is X(0).

    With the normalization of this module this is a re-packaging of the
    Taylor table.
    """
    if max_arity > X.degree_cap:
        raise ArgumentError(f"max_arity {max_arity} exceeds the degree cap {X.degree_cap}")
    tables: dict = {k: {} for k in range(1, max_arity + 1)}
    zero = {}
    for (j, m), c in sorted(X.coefficients.items()):
        if not m:
            zero[j] = c
        elif len(m) <= max_arity:
            tables[len(m)].setdefault(m, {})[j] = c
    beyond = any(len(m) > max_arity for _, m in X.coefficients)
    return SymmetricBracketFamily(X.space, X.parity, tables, max_arity, zero,
                                  vanishes_above=not beyond and not X.truncated and max_arity == X.degree_cap)


def field_from_brackets(fam: SymmetricBracketFamily, degree_cap: int) -> FormalVectorField:
    """Inverse of :func:`brackets_from_field` up to ``degree_cap``."""
    if degree_cap > fam.max_arity and not fam.vanishes_above:
        raise ArgumentError(f"family has arities only up to {fam.max_arity}")
    coeffs = {(j, ()): c for j, c in fam.zero_bracket.items()}
    for k in range(1, min(degree_cap, fam.max_arity) + 1):
        for m, val in fam.tables[k].items():
            for j, c in val.items():
                coeffs[(j, m)] = c
    return FormalVectorField(fam.space, fam.parity, degree_cap, coeffs)


def qd(dec: Decomposition, D: Derivation, degree_cap: int) -> FormalVectorField:
    """The field Q_D generating the higher derived brackets of D."""
    if not check_preserves_k(D, dec):
        raise PreconditionError("D must preserve K = Ker P (PDP = PD)")
    return field_from_brackets(derived_bracket_family(dec, D, degree_cap), degree_cap)


@dataclass
class FieldDefectReport:
    lhs: FormalVectorField
    rhs: FormalVectorField
    defect: dict = field(default_factory=dict)
    exact_through: int = 0

    @property
    def ok(self) -> bool:
        return not self.defect


def verify_homomorphism(dec: Decomposition, D1: Derivation, D2: Derivation, degree_cap: int) -> FieldDefectReport:
    """``[Q_{D1}, Q_{D2}] - Q_{[D1, D2]}`` coefficientwise up to the cap."""
    if not v_is_abelian(dec):
        raise PreconditionError("V must be abelian")
    for name, D in (("D1", D1), ("D2", D2)):
        if not check_preserves_k(D, dec):
            raise PreconditionError(f"{name} does not preserve K = Ker P")
    lhs = field_commutator(qd(dec, D1, degree_cap), qd(dec, D2, degree_cap))
    rhs = qd(dec, derivation_commutator(D1, D2), degree_cap)
    diff = dict(lhs.coefficients)
    add_into(diff, rhs.coefficients, -1)
    defect = {key: c for key, c in diff.items() if len(key[1]) <= lhs.exact_through}
    return FieldDefectReport(lhs, rhs, defect, lhs.exact_through)


def is_homological(X: FormalVectorField, degree_cap: int | None = None):
    """``(flag, ½[X, X])``: flag is true iff the square vanishes through its exact degree."""
    if X.parity != 1:
        raise ArgumentError("homological fields are odd")
    sq = field_square(X, degree_cap)
    bad = {key: c for key, c in sq.coefficients.items() if len(key[1]) <= sq.exact_through}
    return not bad, sq
