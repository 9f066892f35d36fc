"""L∞ structure on ΠL ⊕ V built from a homological derivation D preserving K.

Basis of M = ΠL ⊕ V: first Πe_0, ..., Πe_{n-1} (parities flipped), then the
V basis in V-coordinates.  Brackets are evaluated on the canonical order
(ΠL arguments first, each block ascending) and extended to every order by
Koszul symmetrization.  On canonical order, with r ΠL arguments and s V
arguments:

    n = 1          d(Πx, a) = (-ΠDx, P(x + Da))
    r = 0, s ≥ 2   {a_1, ..., a_s} = P[...[Da_1, a_2], ..., a_s]
    r = 1, s ≥ 1   {Πx, a_1, ..., a_s} = P[...[x, a_1], ..., a_s]
    r = 2, s = 0   {Πx, Πy} = (-1)^x Π[x, y]
    otherwise      0
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .brackets import (
    JacobiatorReport,
    SymmetricBracketFamily,
    derived_bracket_family,
    evaluate_multilinear,
    v_is_abelian,
    verify_linfinity,
)
from .errors import ArgumentError, PreconditionError
from .graded import GradedLinearMap, GradedSpace, Vector, add_into, canonical_tuples, parity_reverse, sort_sign
from .homotopy import square_witness
from .superalgebra import Decomposition, Derivation, check_preserves_k

__all__ = [
    "ExtendedBracketStructure",
    "build_extended_brackets",
    "check_binary_leibniz",
    "check_v_ideal",
    "fiber_matches_derived",
    "homotopy_fiber_structure",
    "verify_linfinity",
    "verify_theorem",
]

SKIP_FOUR_PI = ("at least 4 ΠL arguments: every term has a bracket with 3 or more ΠL arguments, "
                "or 2 ΠL arguments beside a V argument, and those vanish")
SKIP_THREE_PI = ("exactly 3 ΠL arguments and some V argument: the only ΠL-valued inner brackets are "
                 "{Πx,Πy} and d(Πx), after which the outer bracket vanishes")


class ExtendedBracketStructure:
    """Rule-based evaluator of the brackets on ΠL ⊕ V.  Values are cached per canonical tuple."""

    parity = 1
    vanishes_above = False

    def __init__(self, dec: Decomposition, D: Derivation, max_arity: int):
        self.dec = dec
        self.D = D
        self.max_arity = max_arity
        L = dec.algebra.space
        self.n_l = L.dim
        pil = parity_reverse(L)
        V = dec.v_space
        self.space = GradedSpace(pil.names + V.names, pil.parities + V.parities)
        self._cache: dict = {}
        self._chain_cache: dict = {}
        self.zero_bracket: dict = {}

    # -- index helpers
    def is_pi(self, m: int) -> bool:
        return m < self.n_l

    def _v_to_l(self, m: int) -> dict:
        return self.dec.from_v({m - self.n_l: 1})

    def _to_m_v(self, x: Mapping) -> dict:
        """P x for x in L coordinates, as M coordinates."""
        return {self.n_l + p: c for p, c in self.dec.to_v(x).items()}

    def _chain(self, head: tuple, tail: tuple) -> dict:
        """[...[head, a_1], ..., a_s] in L coordinates; head is ('D', m) or ('x', i)."""
        key = (head, tail)
        hit = self._chain_cache.get(key)
        if hit is not None:
            return hit
        alg = self.dec.algebra
        if not tail:
            kind, m = head
            out = self.D.apply_coeffs(self._v_to_l(m)) if kind == "D" else {m: 1}
        else:
            prev = self._chain(head, tail[:-1])
            out = alg.bracket_coeffs(prev, self._v_to_l(tail[-1])) if prev else {}
        self._chain_cache[key] = out
        return out

    # -- the formula families, on canonical order
    def pi_pair_sign(self, x_parity: int) -> int:
        return -1 if x_parity else 1

    def unary(self, m: int) -> dict:
        if self.is_pi(m):
            out = {k: -c for k, c in self.D.column(m).items()}
            add_into(out, self._to_m_v({m: 1}))
            return out
        return self._to_m_v(self.D.apply_coeffs(self._v_to_l(m)))

    def formula(self, idx: tuple) -> dict:
        """Bracket on a tuple already in canonical order (no sign)."""
        if len(idx) == 1:
            return self.unary(idx[0])
        pis = [m for m in idx if self.is_pi(m)]
        vs = tuple(m for m in idx if not self.is_pi(m))
        r = len(pis)
        if r == 0:
            return self._to_m_v(self._chain(("D", vs[0]), vs[1:]))
        if r == 1 and vs:
            return self._to_m_v(self._chain(("x", pis[0]), vs))
        if r == 2 and not vs:
            x, y = pis
            s = self.pi_pair_sign(self.dec.algebra.parities[x])
            return {k: s * c for k, c in self.dec.algebra.bracket_basis(x, y).items()}
        return {}

    def bracket_basis(self, idx: Sequence[int]) -> dict:
        idx = tuple(idx)
        if not idx:
            return {}
        key = tuple(sorted(idx))
        par = self.space.parities
        for a, b in zip(key, key[1:]):
            if a == b and par[a]:
                return {}
        if key not in self._cache:
            self._cache[key] = self.formula(key)
        val = self._cache[key]
        if not val or key == idx:
            return val
        s = sort_sign(idx, par)
        return {k: s * c for k, c in val.items()}

    def bracket(self, args: Sequence[Vector]) -> Vector:
        for a in args:
            if a.space != self.space:
                raise ArgumentError("argument outside ΠL ⊕ V")
        return Vector._raw(self.space, evaluate_multilinear(self, [a.coeffs for a in args]))

    def unary_map(self) -> GradedLinearMap:
        cols = tuple(self.unary(m) for m in range(self.space.dim))
        return GradedLinearMap(self.space, self.space, 1, cols)

    def structural_skip(self, idx: Sequence[int]):
        r = sum(1 for m in idx if self.is_pi(m))
        if r >= 4:
            return SKIP_FOUR_PI
        if r == 3 and len(idx) > 3:
            return SKIP_THREE_PI
        return None

    def check_overlaps(self) -> list:
        """Where two orders of the same arguments both fall under a formula, they must agree.

        Compares the raw formula on a non-canonical order with the Koszul
        sign times the canonical value.  Returns violations.
        """
        bad = []
        par = self.space.parities
        alg = self.dec.algebra
        n = self.n_l
        for x in range(n):
            for y in range(x + 1, n):
                swapped = {k: self.pi_pair_sign(alg.parities[y]) * c for k, c in alg.bracket_basis(y, x).items()}
                s = -1 if par[x] * par[y] else 1
                expect = {k: s * c for k, c in self.formula((x, y)).items()}
                if swapped != expect:
                    bad.append(("pi-pair", (x, y)))
        vidx = range(n, self.space.dim)
        for x in range(n):
            for a in vidx:
                for b in vidx:
                    if a < b:
                        raw = self._to_m_v(self._chain(("x", x), (b, a)))
                        s = -1 if par[a] * par[b] else 1
                        expect = {k: s * c for k, c in self._to_m_v(self._chain(("x", x), (a, b))).items()}
                        if raw != expect:
                            bad.append(("pi-v-v", (x, a, b)))
        return bad


def build_extended_brackets(dec: Decomposition, D: Derivation, max_arity: int) -> ExtendedBracketStructure:
    if D.parity != 1:
        raise PreconditionError("D must be odd")
    if not v_is_abelian(dec):
        raise PreconditionError("V must be an abelian subalgebra")
    if not check_preserves_k(D, dec):
        raise PreconditionError("D does not preserve K = Ker P")
    w = square_witness(D)
    if w:
        raise PreconditionError(f"D^2 != 0: {w}")
    s = ExtendedBracketStructure(dec, D, max_arity)
    bad = s.check_overlaps()
    if bad:
        raise PreconditionError(f"bracket formulas disagree on overlaps: {bad[:3]}")
    return s


def check_binary_leibniz(s: ExtendedBracketStructure) -> list:
    """``d{u,v} + {du,v} + (-1)^u {u,dv}`` on (Πe_i, Πe_j) and (Πe_i, e_a).

    Returns the nonzero defects as ``(names, defect dict)``.
    """
    par = s.space.parities
    d = s.unary_map()
    defects = []
    pairs = [(i, j) for i in range(s.n_l) for j in range(i, s.n_l) if not (i == j and par[i])]
    pairs += [(i, a) for i in range(s.n_l) for a in range(s.n_l, s.space.dim)]
    for u, v in pairs:
        lhs = d.apply_coeffs(s.bracket_basis((u, v)))
        add_into(lhs, evaluate_multilinear(s, [d.columns[u], {v: 1}]))
        add_into(lhs, evaluate_multilinear(s, [{u: 1}, d.columns[v]]), -1 if par[u] else 1)
        if lhs:
            defects.append(((s.space.names[u], s.space.names[v]),
                            {s.space.names[k]: c for k, c in sorted(lhs.items())}))
    return defects


def homotopy_fiber_structure(s: ExtendedBracketStructure, max_arity: int | None = None) -> SymmetricBracketFamily:
    """Restriction of the structure to V-only arguments, in V coordinates."""
    k_max = max_arity or s.max_arity
    V = s.dec.v_space
    tables = {}
    for k in range(1, k_max + 1):
        tab = {}
        for t in canonical_tuples(V.parities, k):
            val = s.bracket_basis(tuple(s.n_l + i for i in t))
            if any(s.is_pi(m) for m in val):
                raise ArgumentError(f"bracket of V arguments {t} leaves V")
            if val:
                tab[t] = {m - s.n_l: c for m, c in val.items()}
        tables[k] = tab
    return SymmetricBracketFamily(V, 1, tables, k_max)


def check_v_ideal(s: ExtendedBracketStructure, max_arity: int) -> list:
    """Canonical tuples with a V argument whose bracket has a ΠL component."""
    bad = []
    for k in range(1, max_arity + 1):
        for t in canonical_tuples(s.space.parities, k):
            if any(not s.is_pi(m) for m in t) and any(s.is_pi(m) for m in s.bracket_basis(t)):
                bad.append(t)
    return bad


def fiber_matches_derived(s: ExtendedBracketStructure, max_arity: int) -> bool:
    return homotopy_fiber_structure(s, max_arity) == derived_bracket_family(s.dec, s.D, max_arity)


def verify_theorem(s: ExtendedBracketStructure, max_n: int, brute_force: bool = False) -> JacobiatorReport:
    return verify_linfinity(s, max_n, brute_force=brute_force)
