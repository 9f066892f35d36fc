"""Higher derived brackets of a derivation, graded-symmetric bracket families,
and the Jacobiator engine shared by every L∞ check in the package.

Conventions
-----------
* ``{a_1, ..., a_k}_D = P[...[[D a_1, a_2], a_3], ..., a_k]``.
* The Jacobiator is the sum over k and over (k, n-k)-shuffles of
  ``ε · {{a_σ(1..k)}, a_σ(k+1..n)}`` where ε is the Koszul sign of the
  shuffle and nothing else.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import ArgumentError, PreconditionError
from .graded import (
    GradedSpace,
    Vector,
    add_into,
    canonical_tuples,
    enumerate_shuffles,
    is_canonical,
    koszul_sign,
    sort_sign,
)
from .superalgebra import (
    Decomposition,
    Derivation,
    check_preserves_k,
    derivation_square,
)


def _scaled(d: Mapping, c) -> dict:
    return {i: c * v for i, v in d.items()}


def _has_repeated_odd(idx: Sequence[int], parities) -> bool:
    seen = set()
    for i in idx:
        if parities[i]:
            if i in seen:
                return True
            seen.add(i)
    return False


class SymmetricBracketFamily:
    """Graded-symmetric multilinear brackets of a common parity on a space.

    ``tables[k]`` maps canonical index tuples of arity k to sparse values.
    The 0-bracket is ``zero_bracket`` (a sparse dict, empty for families
    coming from derivations).  Brackets above ``max_arity`` are unknown unless
    ``vanishes_above`` is set, in which case they are zero.
    """

    def __init__(self, space: GradedSpace, parity: int, tables: Mapping, max_arity: int,
                 zero_bracket: Mapping | None = None, vanishes_above: bool = False):
        self.space = space
        self.parity = parity
        self.max_arity = max_arity
        self.vanishes_above = vanishes_above
        self.zero_bracket = {i: c for i, c in (zero_bracket or {}).items() if c}
        par = space.parities
        clean = {}
        for k in range(1, max_arity + 1):
            table = {}
            for idx, val in (tables.get(k) or {}).items():
                idx = tuple(idx)
                if len(idx) != k or not is_canonical(idx, par):
                    raise ArgumentError(f"{idx} is not a canonical tuple of arity {k}")
                val = {i: c for i, c in val.items() if c}
                if val:
                    table[idx] = val
            clean[k] = table
        extra = [k for k in tables if k > max_arity or k < 1]
        if any(tables[k] for k in extra):
            raise ArgumentError(f"tables given for arities {extra} outside 1..{max_arity}")
        self.tables = clean

    def bracket_basis(self, idx: Sequence[int]) -> dict:
        """Value on an arbitrary basis tuple (returned dicts are read-only)."""
        k = len(idx)
        if k == 0:
            return self.zero_bracket
        if k > self.max_arity:
            if self.vanishes_above:
                return {}
            raise ArgumentError(f"arity {k} is not tabulated (max_arity={self.max_arity})")
        par = self.space.parities
        key = tuple(sorted(idx))
        if _has_repeated_odd(key, par):
            return {}
        val = self.tables[k].get(key)
        if not val:
            return {}
        if sort_sign(idx, par) < 0:
            return _scaled(val, -1)
        return val

    def bracket(self, args: Sequence[Vector]) -> Vector:
        for a in args:
            if a.space != self.space:
                raise ArgumentError("argument outside the family's space")
        return Vector._raw(self.space, evaluate_multilinear(self, [a.coeffs for a in args]))

    def __eq__(self, other):
        if not isinstance(other, SymmetricBracketFamily):
            return NotImplemented
        return (self.space == other.space and self.max_arity == other.max_arity
                and self.tables == other.tables and self.zero_bracket == other.zero_bracket
                and (self.parity == other.parity or self.is_zero()))

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.zero_bracket and not any(self.tables.values())

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def _combine(self, other, scale):
        if self.space != other.space or self.max_arity != other.max_arity:
            raise ArgumentError("families on different spaces or arities")
        tables = {}
        for k in range(1, self.max_arity + 1):
            t = {key: dict(v) for key, v in self.tables[k].items()}
            for key, v in other.tables[k].items():
                add_into(t.setdefault(key, {}), v, scale)
            tables[k] = t
        zero = dict(self.zero_bracket)
        add_into(zero, other.zero_bracket, scale)
        parity = self.parity if not self.is_zero() else other.parity
        return SymmetricBracketFamily(self.space, parity, tables, self.max_arity, zero,
                                      self.vanishes_above and other.vanishes_above)

    def nonzero_arities(self) -> list[int]:
        return [k for k in range(1, self.max_arity + 1) if self.tables[k]]


def evaluate_multilinear(structure, args: Sequence[Mapping]) -> dict:
    """Expand sparse arguments over their supports (scalars are even)."""
    out: dict = {}
    for combo in itertools.product(*(sorted(a.items()) for a in args)):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        val = structure.bracket_basis(tuple(i for i, _ in combo))
        if val:
            add_into(out, val, coeff)
    return out


# ---------------------------------------------------------------------------
# Jacobiators


@lru_cache(maxsize=None)
def _signed_shuffles(n: int, parities: tuple):
    out = []
    for k in range(n + 1):
        for sigma in enumerate_shuffles(k, n - k):
            out.append((k, sigma, koszul_sign(sigma, parities)))
    return tuple(out)


def jacobiator_basis(structure, idx: Sequence[int]) -> dict:
    """n-th Jacobiator of a bracket structure on a basis tuple.

    ``structure`` needs ``space`` and ``bracket_basis``.
    """
    par = structure.space.parities
    n = len(idx)
    out: dict = {}
    for k, sigma, sign in _signed_shuffles(n, tuple(par[i] for i in idx)):
        inner = structure.bracket_basis(tuple(idx[p] for p in sigma[:k]))
        if not inner:
            continue
        rest = tuple(idx[p] for p in sigma[k:])
        for m, c in inner.items():
            val = structure.bracket_basis((m,) + rest)
            if val:
                add_into(out, val, sign * c)
    return out


def jacobiator(structure, args: Sequence[Vector]) -> Vector:
    """J^n on arbitrary arguments, by multilinear expansion."""
    n = len(args)
    if n > getattr(structure, "max_arity", n) and not getattr(structure, "vanishes_above", True):
        raise ArgumentError(f"arity {n} is not tabulated (max_arity={structure.max_arity})")
    for a in args:
        if a.space != structure.space:
            raise ArgumentError("argument outside the structure's space")

    class _J:
        space = structure.space

        @staticmethod
        def bracket_basis(idx):
            return jacobiator_basis(structure, idx)

    return Vector._raw(structure.space, evaluate_multilinear(_J, [a.coeffs for a in args]))


@dataclass
class JacobiatorEntry:
    args: tuple
    jacobiator: dict
    comparison: dict
    defect: dict


@dataclass
class JacobiatorReport:
    """Per-arity Jacobiator values, their comparison values and exact defects."""

    space: GradedSpace
    entries: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def add(self, args, jac, comparison):
        defect = dict(jac)
        add_into(defect, comparison, -1)
        self.entries.setdefault(len(args), []).append(JacobiatorEntry(tuple(args), jac, dict(comparison), defect))

    def skip(self, args, reason):
        self.skipped.setdefault(len(args), []).append((tuple(args), reason))

    @property
    def ok(self) -> bool:
        return all(not e.defect for es in self.entries.values() for e in es)

    def failures(self):
        return [e for n in sorted(self.entries) for e in self.entries[n] if e.defect]

    def first_failure(self):
        f = self.failures()
        return f[0] if f else None

    def counts(self) -> dict:
        out = {}
        for n in sorted(set(self.entries) | set(self.skipped)):
            es = self.entries.get(n, [])
            bad = sum(1 for e in es if e.defect)
            out[n] = {"checked": len(es), "passed": len(es) - bad, "failed": bad,
                      "skipped": len(self.skipped.get(n, []))}
        return out

    def jacobiators_vanish(self) -> bool:
        return all(not e.jacobiator for es in self.entries.values() for e in es)

    def nonzero_jacobiator_arities(self) -> list[int]:
        return sorted(n for n, es in self.entries.items() if any(e.jacobiator for e in es))


def verify_linfinity(structure, max_n: int, brute_force: bool = False, skip_rule=None) -> JacobiatorReport:
    """All Jacobiators up to ``max_n`` on canonical basis tuples must vanish.

    ``skip_rule(idx)`` may return a justification string for tuples whose
    Jacobiator is known to vanish structurally; with ``brute_force`` they
    are computed anyway.
    """
    if skip_rule is None:
        skip_rule = getattr(structure, "structural_skip", None)
    report = JacobiatorReport(structure.space)
    par = structure.space.parities
    for n in range(1, max_n + 1):
        for idx in canonical_tuples(par, n):
            reason = skip_rule(idx) if skip_rule else None
            if reason and not brute_force:
                report.skip(idx, reason)
                continue
            report.add(idx, jacobiator_basis(structure, idx), {})
    return report


# ---------------------------------------------------------------------------
# derived brackets


def _ensure_in_v(dec: Decomposition, a: Vector):
    if a.space != dec.algebra.space:
        raise ArgumentError("argument is not an element of the algebra")
    stray = [i for i in a.coeffs if i not in dec.v_set]
    if stray:
        raise ArgumentError(f"argument has components outside V: {[a.space.names[i] for i in stray]}")


def nested_chain(dec: Decomposition, D: Derivation, args: Sequence[Mapping]) -> dict:
    """``[...[[D a_1, a_2], a_3], ..., a_k]`` without the projection."""
    alg = dec.algebra
    x = D.apply_coeffs(args[0])
    for a in args[1:]:
        if not x:
            return {}
        x = alg.bracket_coeffs(x, a)
    return x


def derived_bracket(dec: Decomposition, D: Derivation, args: Sequence[Vector]) -> Vector:
    """``{a_1, ..., a_k}_D = P[...[[D a_1, a_2], a_3], ..., a_k]`` for k ≥ 1."""
    if not args:
        raise ArgumentError("the 0-bracket of a derivation is not defined")
    if D.algebra is not dec.algebra and D.algebra != dec.algebra:
        raise ArgumentError("derivation and decomposition use different algebras")
    for a in args:
        _ensure_in_v(dec, a)
    val = dec.project_coeffs(nested_chain(dec, D, [a.coeffs for a in args]))
    return Vector._raw(dec.algebra.space, val)


def v_is_abelian(dec: Decomposition) -> bool:
    alg = dec.algebra
    return not any(alg.bracket_basis(a, b) for a in dec.v_indices for b in dec.v_indices)


def derived_bracket_family(dec: Decomposition, D: Derivation, max_arity: int,
                           check_symmetry: bool = True) -> SymmetricBracketFamily:
    """Tables of all derived brackets of D on canonical tuples of V.

    Values are in V-coordinates.  Each tuple with at least two distinct
    entries is re-evaluated in reversed order and compared with the
    Koszul-signed canonical value.
    """
    if max_arity < 1:
        raise ArgumentError("max_arity must be at least 1")
    if not v_is_abelian(dec):
        raise PreconditionError(
            "V is not abelian, so derived brackets are not symmetric; "
            "use check_transposition_identity instead"
        )
    alg = dec.algebra
    vpar = dec.v_space.parities
    vidx = dec.v_indices
    chains: dict = {}
    tables: dict = {}
    for k in range(1, max_arity + 1):
        table = {}
        for t in canonical_tuples(vpar, k):
            if k == 1:
                x = D.apply_coeffs({vidx[t[0]]: Fraction(1)})
            else:
                prev = chains.get(t[:-1])
                x = alg.bracket_coeffs(prev, {vidx[t[-1]]: Fraction(1)}) if prev else {}
            if x:
                chains[t] = x
            val = dec.to_v(x)
            if val:
                table[t] = val
            if check_symmetry and len(set(t)) > 1:
                rev = t[::-1]
                direct = dec.to_v(nested_chain(dec, D, [{vidx[i]: Fraction(1)} for i in rev]))
                expected = _scaled(val, sort_sign(rev, vpar))
                if direct != expected:
                    raise AssertionError(f"derived bracket not graded-symmetric at {t}")
        tables[k] = table
    return SymmetricBracketFamily(dec.v_space, D.parity, tables, max_arity)


def verify_main_theorem(dec: Decomposition, D: Derivation, max_n: int) -> JacobiatorReport:
    """Compare J^n of the derived brackets of odd D with the brackets of D².

    Every canonical tuple of V of arity ``1..max_n`` is checked; the
    comparison side is computed directly from the matrix D∘D.
    """
    if D.parity != 1:
        raise PreconditionError("the Jacobiator identity concerns odd derivations")
    if not check_preserves_k(D, dec):
        raise PreconditionError("hypothesis fails: D must preserve K = Ker P (PDP = PD)")
    fam = derived_bracket_family(dec, D, max_n)
    D2 = derivation_square(D)
    vidx = dec.v_indices
    report = JacobiatorReport(dec.v_space)
    for n in range(1, max_n + 1):
        for t in canonical_tuples(dec.v_space.parities, n):
            jac = jacobiator_basis(fam, t)
            rhs = dec.to_v(nested_chain(dec, D2, [{vidx[i]: Fraction(1)} for i in t]))
            report.add(t, jac, rhs)
    return report


def derivation_order(dec: Decomposition, D: Derivation, max_probe: int):
    """Smallest r ≤ max_probe with all (r+1)-fold ``[...[D a_1, a_2], ..., a_{r+1}]`` zero.

    Returns None when no such r exists up to ``max_probe``.
    """
    if max_probe < 0:
        raise ArgumentError("max_probe must be non-negative")
    vidx = dec.v_indices
    vpar = dec.v_space.parities
    abelian = v_is_abelian(dec)
    for r in range(max_probe + 1):
        if abelian:
            tuples = canonical_tuples(vpar, r + 1)
        else:
            tuples = itertools.product(range(len(vidx)), repeat=r + 1)
        if all(not nested_chain(dec, D, [{vidx[i]: Fraction(1)} for i in t]) for t in tuples):
            return r
    return None


def check_transposition_identity(dec: Decomposition, D: Derivation, args: Sequence[Vector], i: int) -> Vector:
    """Defect of the adjacent-transposition identity at 0-based position i.

    Returns ``{.., a_i, a_{i+1}, ..} - (-1)^{a_i a_{i+1}} {.., a_{i+1}, a_i, ..}
    - {.., [a_i, a_{i+1}], ..}``, which vanishes for any subalgebra V.
    """
    k = len(args)
    if not 0 <= i < k - 1:
        raise ArgumentError(f"position {i} out of range for {k} arguments")
    for a in args:
        _ensure_in_v(dec, a)
    pa, pb = args[i].parity, args[i + 1].parity
    if pa is None or pb is None:
        raise ArgumentError("transposed arguments must be homogeneous")
    alg = dec.algebra
    swapped = list(args)
    swapped[i], swapped[i + 1] = args[i + 1], args[i]
    merged = list(args[:i]) + [alg.bracket(args[i], args[i + 1])] + list(args[i + 2:])
    out = derived_bracket(dec, D, args)
    out = out - derived_bracket(dec, D, swapped) * (-1 if pa * pb else 1)
    return out - derived_bracket(dec, D, merged)
