"""Lie superalgebras given by structure constants, adapted decompositions
L = K ⊕ V, derivations, and generators for W(n) and End Λ_m.
"""
from __future__ import annotations

import random as _random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import grassmann, linalg
from .graded import (
    GradedLinearMap,
    GradedSpace,
    GradingError,
    Vector,
    add_into,
    compose,
    format_rational,
    scalar,
)

Element = Vector


@dataclass
class ValidationReport:
    """Outcome of a structural check: every violation carries its witness."""

    check: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(f"{self.check}+{other.check}", self.violations + other.violations)


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


class LieSuperalgebra:
    """Finite-dimensional Lie superalgebra with sparse structure constants.

    ``table[(i, j)]`` is ``[e_i, e_j]`` as a dict ``k -> c_ij^k``.  The table
    is complete (both orders); :meth:`from_brackets` fills missing transposed
    pairs by graded antisymmetry but keeps explicitly given ones, so that an
    inconsistent input can still be reported by validation.
    """

    def __init__(self, space: GradedSpace, table: Mapping):
        self.space = space
        n = space.dim
        clean = {}
        for (i, j), col in table.items():
            if not (0 <= i < n and 0 <= j < n):
                raise GradingError(f"bracket index ({i}, {j}) out of range")
            col = {k: scalar(c) for k, c in col.items() if c}
            for k in col:
                if not 0 <= k < n:
                    raise GradingError(f"bracket target {k} out of range")
            if col:
                clean[(i, j)] = col
        self.table = clean
        self._ad_cache: dict = {}

    @classmethod
    def from_brackets(cls, space: GradedSpace, entries: Iterable, complete: bool = True):
        """Build from ``(i, j, k, value)`` entries.

        With ``complete`` the transposed pair of each given ``(i, j)`` is
        filled by antisymmetry unless it was given explicitly.
        """
        table: dict = {}
        for i, j, k, value in entries:
            col = table.setdefault((i, j), {})
            add_into(col, {k: scalar(value)})
        if complete:
            par = space.parities
            for (i, j), col in list(table.items()):
                if i != j and (j, i) not in table:
                    s = -_sign(par[i] * par[j])
                    table[(j, i)] = {k: s * c for k, c in col.items()}
        return cls(space, table)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def parities(self):
        return self.space.parities

    def bracket_basis(self, i: int, j: int) -> dict:
        return self.table.get((i, j), {})

    def bracket_coeffs(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        table = self.table
        for i, a in x.items():
            for j, b in y.items():
                col = table.get((i, j))
                if col:
                    add_into(out, col, a * b)
        return out

    def bracket(self, a: Vector, b: Vector) -> Vector:
        if a.space != self.space or b.space != self.space:
            raise GradingError("elements do not belong to this algebra")
        return Vector._raw(self.space, self.bracket_coeffs(a.coeffs, b.coeffs))

    def ad_basis(self, i: int) -> GradedLinearMap:
        if i not in self._ad_cache:
            cols = tuple(dict(self.bracket_basis(i, j)) for j in range(self.dim))
            self._ad_cache[i] = GradedLinearMap(self.space, self.space, self.parities[i], cols)
        return self._ad_cache[i]

    def ad(self, x: Vector) -> GradedLinearMap:
        p = x.parity
        if p is None:
            raise GradingError("ad of a non-homogeneous element")
        cols = tuple(self.bracket_coeffs(x.coeffs, {j: Fraction(1)}) for j in range(self.dim))
        return GradedLinearMap(self.space, self.space, p, cols)

    def upper_entries(self):
        """Sorted ``(i, j, k, value)`` entries sufficient to rebuild the table.

        Pairs ``i <= j`` always; ``i > j`` only where the stored value differs
        from what antisymmetry would fill in.
        """
        par = self.parities
        out = []
        for (i, j), col in self.table.items():
            if i > j:
                implied = {k: -_sign(par[i] * par[j]) * c for k, c in self.table.get((j, i), {}).items()}
                if (j, i) in self.table and implied == col:
                    continue
            out.extend((i, j, k, c) for k, c in col.items())
        # pairs (i<j) that are zero but whose transpose is stored must still
        # block the antisymmetric fill-in; flag them with an explicit zero
        for (i, j) in self.table:
            if i > j and (j, i) not in self.table:
                for k in self.table[(i, j)]:
                    out.append((j, i, k, Fraction(0)))
        return sorted(set(out))

    def __eq__(self, other):
        return isinstance(other, LieSuperalgebra) and self.space == other.space and self.table == other.table

    __hash__ = None


def validate_lie_superalgebra(alg: LieSuperalgebra) -> ValidationReport:
    """Parity consistency, graded antisymmetry and graded Jacobi, exactly."""
    report = ValidationReport("lie_superalgebra")
    par = alg.parities
    n = alg.dim
    for (i, j), col in sorted(alg.table.items()):
        for k, c in sorted(col.items()):
            if par[k] != (par[i] + par[j]) % 2:
                report.violations.append({"kind": "parity", "pair": (i, j), "target": k, "value": c})
    antisym_ok = True
    for i in range(n):
        for j in range(i, n):
            a = alg.bracket_basis(i, j)
            b = alg.bracket_basis(j, i)
            defect = dict(a)
            add_into(defect, b, _sign(par[i] * par[j]))
            if defect:
                antisym_ok = False
                report.violations.append({"kind": "antisymmetry", "pair": (i, j), "defect": defect})
    # [a,[b,c]] = [[a,b],c] + (-1)^{ab} [b,[a,c]]; sorted triples suffice
    # once antisymmetry holds
    for i in range(n):
        for j in range(i if antisym_ok else 0, n):
            bij = alg.bracket_basis(i, j)
            for k in range(j if antisym_ok else 0, n):
                lhs = alg.bracket_coeffs({i: 1}, alg.bracket_basis(j, k))
                add_into(lhs, alg.bracket_coeffs(bij, {k: 1}), -1)
                add_into(lhs, alg.bracket_coeffs({j: 1}, alg.bracket_basis(i, k)), -_sign(par[i] * par[j]))
                if lhs:
                    report.violations.append({"kind": "jacobi", "triple": (i, j, k), "defect": lhs})
    return report


# ---------------------------------------------------------------------------
# decompositions


class Decomposition:
    """Adapted splitting L = K ⊕ V: each basis vector lies in K or in V."""

    def __init__(self, algebra: LieSuperalgebra, k_indices, v_indices, abelian: bool = True):
        k = tuple(sorted(int(i) for i in k_indices))
        v = tuple(sorted(int(i) for i in v_indices))
        if set(k) & set(v) or sorted(k + v) != list(range(algebra.dim)) or len(set(k)) != len(k) or len(set(v)) != len(v):
            raise GradingError("K and V index sets must partition the basis")
        self.algebra = algebra
        self.k_indices = k
        self.v_indices = v
        self.abelian = bool(abelian)
        self._v_pos = {i: p for p, i in enumerate(v)}
        self._k_pos = {i: p for p, i in enumerate(k)}
        sp = algebra.space
        self.v_space = GradedSpace(tuple(sp.names[i] for i in v), tuple(sp.parities[i] for i in v))
        self.k_space = GradedSpace(tuple(sp.names[i] for i in k), tuple(sp.parities[i] for i in k))

    @property
    def v_set(self):
        return self._v_pos

    def project_coeffs(self, x: Mapping) -> dict:
        return {i: c for i, c in x.items() if i in self._v_pos}

    def project(self, a: Vector) -> Vector:
        return Vector._raw(a.space, self.project_coeffs(a.coeffs))

    def to_v(self, x: Mapping) -> dict:
        """L-coordinates → V-coordinates of the projection."""
        pos = self._v_pos
        return {pos[i]: c for i, c in x.items() if i in pos}

    def from_v(self, y: Mapping) -> dict:
        v = self.v_indices
        return {v[p]: c for p, c in y.items()}

    def to_k(self, x: Mapping) -> dict:
        pos = self._k_pos
        return {pos[i]: c for i, c in x.items() if i in pos}

    def from_k(self, y: Mapping) -> dict:
        k = self.k_indices
        return {k[p]: c for p, c in y.items()}

    def v_element(self, y: Mapping) -> Vector:
        return Vector._raw(self.algebra.space, self.from_v({p: scalar(c) for p, c in y.items() if c}))

    def projector(self) -> GradedLinearMap:
        """P as an even map L → L."""
        sp = self.algebra.space
        cols = tuple({i: Fraction(1)} if i in self._v_pos else {} for i in range(sp.dim))
        return GradedLinearMap(sp, sp, 0, cols)

    def projection_to_v(self) -> GradedLinearMap:
        """P as an even map L → V."""
        cols = tuple({self._v_pos[i]: Fraction(1)} if i in self._v_pos else {} for i in range(self.algebra.dim))
        return GradedLinearMap(self.algebra.space, self.v_space, 0, cols)

    def inclusion_of_v(self) -> GradedLinearMap:
        cols = tuple({i: Fraction(1)} for i in self.v_indices)
        return GradedLinearMap(self.v_space, self.algebra.space, 0, cols)

    def inclusion_of_k(self) -> GradedLinearMap:
        cols = tuple({i: Fraction(1)} for i in self.k_indices)
        return GradedLinearMap(self.k_space, self.algebra.space, 0, cols)


def validate_decomposition(dec: Decomposition, require_abelian: bool | None = None) -> ValidationReport:
    """K-closure, V-closure, and (when required) [Pa, Pb] = 0 together with
    the distributivity law P[a,b] = P[Pa,b] + P[a,Pb] on all basis pairs.

    Distributivity is equivalent to K and V being subalgebras with V abelian,
    so it is only checked when abelianness is required.
    """
    if require_abelian is None:
        require_abelian = dec.abelian
    alg = dec.algebra
    report = ValidationReport("decomposition")
    vset = dec.v_set
    for name, idx, inside in (("K", dec.k_indices, lambda r: r not in vset), ("V", dec.v_indices, lambda r: r in vset)):
        for a in idx:
            for b in idx:
                out = {r: c for r, c in alg.bracket_basis(a, b).items() if not inside(r)}
                if out:
                    report.violations.append({"kind": f"{name}-closure", "pair": (a, b), "defect": out})
    if require_abelian:
        for a in dec.v_indices:
            for b in dec.v_indices:
                if alg.bracket_basis(a, b):
                    report.violations.append(
                        {"kind": "V-abelian", "pair": (a, b), "defect": dict(alg.bracket_basis(a, b))}
                    )
        for a in range(alg.dim):
            pa = dec.project_coeffs({a: Fraction(1)})
            for b in range(alg.dim):
                pb = dec.project_coeffs({b: Fraction(1)})
                lhs = dec.project_coeffs(alg.bracket_basis(a, b))
                add_into(lhs, dec.project_coeffs(alg.bracket_coeffs(pa, {b: 1})), -1)
                add_into(lhs, dec.project_coeffs(alg.bracket_coeffs({a: 1}, pb)), -1)
                if lhs:
                    report.violations.append({"kind": "distributivity", "pair": (a, b), "defect": lhs})
    return report


# ---------------------------------------------------------------------------
# derivations


class Derivation:
    """A parity-homogeneous linear endomorphism of L meant to satisfy Leibniz.

    Construction only checks the parity blocks; use :func:`validate_derivation`
    for the Leibniz rule.
    """

    def __init__(self, algebra: LieSuperalgebra, map: GradedLinearMap):
        if map.source != algebra.space or map.target != algebra.space:
            raise GradingError("derivation must be an endomorphism of the algebra")
        self.algebra = algebra
        self.map = map

    @property
    def parity(self) -> int:
        return self.map.parity

    def __call__(self, a):
        return self.map.apply(a)

    def apply_coeffs(self, x: Mapping) -> dict:
        return self.map.apply_coeffs(x)

    def column(self, i: int) -> dict:
        return self.map.columns[i]

    def __add__(self, other):
        return Derivation(self.algebra, self.map + other.map)

    def __sub__(self, other):
        return Derivation(self.algebra, self.map - other.map)

    def scaled(self, c):
        return Derivation(self.algebra, self.map.scaled(c))

    def __rmul__(self, c):
        return self.scaled(c)

    def __neg__(self):
        return self.scaled(-1)

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.algebra is other.algebra and self.map == other.map

    __hash__ = None

    @classmethod
    def zero(cls, algebra, parity=0):
        return cls(algebra, GradedLinearMap.zero(algebra.space, algebra.space, parity))


def validate_derivation(D: Derivation) -> ValidationReport:
    """Graded Leibniz D[a,b] = [Da,b] + (-1)^{D a}[a,Db] on all basis pairs."""
    alg = D.algebra
    par = alg.parities
    report = ValidationReport("derivation")
    for a in range(alg.dim):
        da = D.column(a)
        s = _sign(D.parity * par[a])
        for b in range(alg.dim):
            lhs = D.apply_coeffs(alg.bracket_basis(a, b))
            add_into(lhs, alg.bracket_coeffs(da, {b: 1}), -1)
            add_into(lhs, alg.bracket_coeffs({a: 1}, D.column(b)), -s)
            if lhs:
                report.violations.append({"kind": "leibniz", "pair": (a, b), "defect": lhs})
    return report


def check_preserves_k(D: Derivation, dec: Decomposition) -> bool:
    """D(K) ⊆ K, tested as the matrix identity PDP = PD."""
    P = dec.projector()
    return compose(P, compose(D.map, P)) == compose(P, D.map)


def inner_derivation(algebra: LieSuperalgebra, delta: Vector) -> Derivation:
    return Derivation(algebra, algebra.ad(delta))


def derivation_commutator(D1: Derivation, D2: Derivation) -> Derivation:
    """Graded commutator D1 D2 - (-1)^{D1 D2} D2 D1."""
    if D1.algebra is not D2.algebra and D1.algebra != D2.algebra:
        raise GradingError("derivations of different algebras")
    a = compose(D1.map, D2.map)
    b = compose(D2.map, D1.map)
    return Derivation(D1.algebra, a - b.scaled(_sign(D1.parity * D2.parity)))


def derivation_square(D: Derivation) -> Derivation:
    """D∘D = ½[D, D] for odd D."""
    if D.parity != 1:
        raise GradingError("the square ½[D,D] is a derivation only for odd D")
    return Derivation(D.algebra, compose(D.map, D.map))


def derivation_space(algebra: LieSuperalgebra, parity: int, dec: Decomposition | None = None) -> list[Derivation]:
    """Basis of all derivations of the given parity (preserving K if ``dec`` given).

    Solves the Leibniz equations exactly; intended for small algebras.
    """
    n = algebra.dim
    par = algebra.parities
    unknowns = [(r, c) for c in range(n) for r in range(n) if par[r] == (par[c] + parity) % 2]
    if dec is not None:
        unknowns = [(r, c) for r, c in unknowns if not (c in dec.k_indices and r in dec.v_set)]
    pos = {u: t for t, u in enumerate(unknowns)}
    rows = []
    for a in range(n):
        s = _sign(parity * par[a])
        for b in range(n):
            eqs: dict = {}
            # D[a,b] - [Da,b] - s [a,Db] = 0, linear in the unknown entries
            for k, c in algebra.bracket_basis(a, b).items():
                for r in range(n):
                    if (r, k) in pos:
                        add_into(eqs.setdefault(r, {}), {pos[(r, k)]: c})
            for r in range(n):
                if (r, a) in pos:
                    for k, c in algebra.bracket_basis(r, b).items():
                        add_into(eqs.setdefault(k, {}), {pos[(r, a)]: -c})
                if (r, b) in pos:
                    for k, c in algebra.bracket_basis(a, r).items():
                        add_into(eqs.setdefault(k, {}), {pos[(r, b)]: -s * c})
            for eq in eqs.values():
                if eq:
                    row = [Fraction(0)] * len(unknowns)
                    for t, c in eq.items():
                        row[t] = c
                    rows.append(row)
    basis = linalg.nullspace(rows, len(unknowns))
    out = []
    for vec in basis:
        cols = [dict() for _ in range(n)]
        for (r, c), x in zip(unknowns, vec):
            if x:
                cols[c][r] = x
        out.append(Derivation(algebra, GradedLinearMap(algebra.space, algebra.space, parity, tuple(cols))))
    return out


def random_element(algebra: LieSuperalgebra, rng: _random.Random, parity=None, among=None, density=0.5, bound=3):
    """Random rational element (homogeneous of ``parity`` if given)."""
    idx = range(algebra.dim) if among is None else among
    coeffs = {}
    for i in idx:
        if parity is not None and algebra.parities[i] != parity:
            continue
        if rng.random() < density:
            c = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            if c:
                coeffs[i] = c
    return Vector(algebra.space, coeffs)


# ---------------------------------------------------------------------------
# generators


def _decompose_derivation_op(n: int, op) -> dict:
    """Coordinates of a derivation of Λ_n in the basis ξ^A ∂_i of W(n)."""
    idx = grassmann.monomial_index(n)
    out = {}
    basis_pos = _wn_positions(n)
    for i in range(n):
        image = [row[idx[(i,)]] for row in op]
        for m, c in zip(grassmann.monomials(n), image):
            if c:
                out[basis_pos[(m, i)]] = c
    return out


@lru_cache(maxsize=None)
def _wn_basis(n: int) -> tuple:
    return tuple((m, i) for m in grassmann.monomials(n) for i in range(n))


@lru_cache(maxsize=None)
def _wn_positions(n: int) -> dict:
    return {b: p for p, b in enumerate(_wn_basis(n))}


def wn_field_op(n: int, mono: tuple, i: int):
    """Operator ξ^mono ∂_i on Λ_n (differentiate, then multiply on the left)."""
    return grassmann.compose(grassmann.mult_op(n, mono), grassmann.deriv_op(n, i))


@lru_cache(maxsize=None)
def gen_wn(n: int):
    """W(n): polynomial vector fields on a purely odd n-dimensional space.

    Basis ``ξ^A ∂_i`` ordered by degree of A, then A, then i; structure
    constants come from supercommutators of the operators on Λ_n.  V is the
    span of the constant fields ∂_i, K the fields vanishing at the origin.
    """
    if not 1 <= n <= 5:
        raise ValueError("gen_wn supports 1 <= n <= 5")
    basis = _wn_basis(n)
    names = tuple(("" if not m else grassmann.monomial_name(m) + "*") + f"d{i + 1}" for m, i in basis)
    parities = tuple((len(m) + 1) % 2 for m, i in basis)
    space = GradedSpace(names, parities)
    ops = [wn_field_op(n, m, i) for m, i in basis]
    table = {}
    for a in range(len(basis)):
        for b in range(a, len(basis)):
            comm = grassmann.supercommutator(ops[a], ops[b], parities[a], parities[b])
            col = _decompose_derivation_op(n, comm)
            if col:
                table[(a, b)] = col
                if a != b:
                    s = -_sign(parities[a] * parities[b])
                    table[(b, a)] = {k: s * c for k, c in col.items()}
    alg = LieSuperalgebra(space, table)
    v = [p for p, (m, i) in enumerate(basis) if not m]
    k = [p for p, (m, i) in enumerate(basis) if m]
    return alg, Decomposition(alg, k, v, abelian=True)


def wn_element(n: int, terms: Mapping) -> Vector:
    """Element of W(n) from ``{(monomial, i): coefficient}`` (0-based i)."""
    alg, _ = gen_wn(n)
    pos = _wn_positions(n)
    coeffs = {}
    for (mono, i), c in terms.items():
        mono = tuple(mono)
        if tuple(sorted(set(mono))) != mono:
            raise ValueError(f"monomial {mono} must be strictly increasing")
        add_into(coeffs, {pos[(mono, i)]: scalar(c)})
    return Vector(alg.space, coeffs)


def wn_terms(n: int, x: Vector) -> dict:
    """Inverse of :func:`wn_element`."""
    basis = _wn_basis(n)
    return {basis[p]: c for p, c in x.coeffs.items()}


def _normalize_constants(constants) -> dict:
    if isinstance(constants, Mapping):
        items = []
        for (i, j), col in constants.items():
            items.extend((i, j, k, c) for k, c in col.items())
    else:
        items = list(constants)
    out: dict = {}
    for i, j, k, c in items:
        add_into(out.setdefault((i, j), {}), {k: scalar(c)})
    return out


def gen_ce_field(constants, n: int | None = None) -> Vector:
    """Quadratic odd field Q = ½ ξ^i ξ^j c_ji^k ∂_k in W(n).

    ``constants`` are structure constants ``c_ij^k`` of an n-dimensional Lie
    algebra, as ``(i, j, k, value)`` entries (0-based) or a mapping
    ``(i, j) -> {k: value}``; entries not given are zero.  They must be
    antisymmetric; the Jacobi identity is not required.
    """
    c = _normalize_constants(constants)
    if n is None:
        n = 1 + max([max(i, j, *col.keys()) for (i, j), col in c.items() if col] or [0])
    for (i, j), col in c.items():
        if max(i, j, *(col or {0: 0}).keys()) >= n:
            raise ValueError("structure constant index out of range")
        if (i == j and col) or col != {k: -v for k, v in c.get((j, i), {}).items()}:
            raise ValueError(f"structure constants are not antisymmetric at ({i}, {j})")
    terms: dict = {}
    for (j, i), col in c.items():
        # ½ ξ^i ξ^j c_ji^k: both orders of an unordered pair collapse onto
        # the increasing monomial
        if i == j:
            continue
        mono, sign = ((i, j), 1) if i < j else ((j, i), -1)
        for k, v in col.items():
            key = (mono, k)
            terms[key] = terms.get(key, 0) + Fraction(sign) * v / 2
    return wn_element(n, {k: v for k, v in terms.items() if v})


def complete_constants(entries) -> list:
    """``(i, j, k, c)`` entries with i < j, extended by ``c_ji^k = -c_ij^k``."""
    out = []
    for i, j, k, c in entries:
        if i >= j:
            raise ValueError("give each structure constant once, with i < j")
        c = scalar(c)
        out += [(i, j, k, c), (j, i, k, -c)]
    return out


# small Lie algebras, constants with i < j; broken3 violates Jacobi
CE_PRESETS = {
    "so3": [(0, 1, 2, 1), (1, 2, 0, 1), (0, 2, 1, -1)],
    "aff2": [(0, 1, 0, 1)],
    "heis3": [(0, 1, 2, 1)],
    "broken3": [(0, 1, 2, 1), (1, 2, 2, 1), (0, 2, 0, 1)],
}


def _end_basis(m: int):
    monos = grassmann.monomials(m)
    v = [("mult", c) for c in monos]
    k = [("unit", a, b) for b in monos if b for a in monos]
    return tuple(v + k)


def _end_name(b) -> str:
    if b[0] == "mult":
        return "m[" + grassmann.monomial_name(b[1]) + "]"
    return "E[" + grassmann.monomial_name(b[1]) + "|" + grassmann.monomial_name(b[2]) + "]"


@lru_cache(maxsize=None)
def _end_ops(m: int):
    return tuple(
        grassmann.mult_op(m, b[1]) if b[0] == "mult" else grassmann.unit_op(m, b[1], b[2]) for b in _end_basis(m)
    )


def end_decompose(m: int, op) -> dict:
    """Coordinates of an operator on Λ_m in the adapted basis of End Λ_m.

    The V-part is multiplication by op(1); the remainder kills 1 and is read
    off entrywise.
    """
    monos = grassmann.monomials(m)
    idx = grassmann.monomial_index(m)
    basis = _end_basis(m)
    pos = {b: p for p, b in enumerate(basis)}
    out = {}
    image_of_one = [row[idx[()]] for row in op]
    rest = [list(r) for r in op]
    for mono, c in zip(monos, image_of_one):
        if c:
            out[pos[("mult", mono)]] = c
            rest = grassmann.add(rest, grassmann.mult_op(m, mono), -c)
    for r, a in enumerate(monos):
        for col, b in enumerate(monos):
            x = rest[r][col]
            if x:
                if not b:
                    raise AssertionError("remainder must annihilate 1")
                out[pos[("unit", a, b)]] = x
    return out


@lru_cache(maxsize=None)
def gen_end_grassmann(m: int):
    """End Λ_m with the supercommutator, split as K ⊕ V.

    V is the image of Λ_m as multiplication operators, K = {Δ : Δ(1) = 0}.
    Returns ``(algebra, decomposition, embedding)`` where ``embedding`` maps
    each monomial of Λ_m to the basis index of its multiplication operator.
    """
    if not 1 <= m <= 3:
        raise ValueError("gen_end_grassmann supports 1 <= m <= 3")
    basis = _end_basis(m)
    names = tuple(_end_name(b) for b in basis)
    parities = tuple(
        len(b[1]) % 2 if b[0] == "mult" else (len(b[1]) + len(b[2])) % 2 for b in basis
    )
    space = GradedSpace(names, parities)
    ops = _end_ops(m)
    table = {}
    for a in range(len(basis)):
        for b in range(a, len(basis)):
            comm = grassmann.supercommutator(ops[a], ops[b], parities[a], parities[b])
            col = end_decompose(m, comm)
            if col:
                table[(a, b)] = col
                if a != b:
                    s = -_sign(parities[a] * parities[b])
                    table[(b, a)] = {k: s * c for k, c in col.items()}
    alg = LieSuperalgebra(space, table)
    v = [p for p, b in enumerate(basis) if b[0] == "mult"]
    k = [p for p, b in enumerate(basis) if b[0] == "unit"]
    embedding = {b[1]: p for p, b in enumerate(basis) if b[0] == "mult"}
    return alg, Decomposition(alg, k, v, abelian=True), embedding


def end_element(m: int, op) -> Vector:
    alg, _, _ = gen_end_grassmann(m)
    return Vector(alg.space, end_decompose(m, op))


def end_operator(m: int, x: Vector):
    """Operator on Λ_m represented by an element of End Λ_m."""
    ops = _end_ops(m)
    out = grassmann.zero_op(m)
    for p, c in x.coeffs.items():
        out = grassmann.add(out, ops[p], c)
    return out


def koszul_delta(m: int) -> Vector:
    """∂_1 ∂_2 ... ∂_m as an element of End Λ_m."""
    op = grassmann.identity_op(m)
    for i in range(m):
        op = grassmann.compose(op, grassmann.deriv_op(m, i))
    return end_element(m, op)


def describe(x: Vector) -> str:
    return " + ".join(f"{format_rational(c)}*{x.space.names[i]}" for i, c in x) or "0"
