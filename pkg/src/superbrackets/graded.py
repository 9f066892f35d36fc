"""Exact scalars, Z2-graded spaces, sparse vectors and parity-aware linear maps.

Everything here is immutable once built.  Scalars are :class:`fractions.Fraction`;
floating point never enters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import ArgumentError

Scalar = Fraction
Permutation = tuple  # tuple of 0-based positions, see koszul_sign


class GradingError(ArgumentError):
    """Raised on parity, dimension or space mismatches."""


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ``"p/q"`` to a Fraction.

    Floats are rejected outright.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(p, q)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# signs and shuffles


def koszul_sign(sigma: Sequence[int], parities: Sequence[int]) -> int:
    """Sign of rearranging ``a_0..a_{n-1}`` into ``a_sigma[0]..a_sigma[n-1]``.

    ``parities[i]`` is the parity of ``a_i``.  Every pair of elements whose
    relative order is reversed contributes ``(-1)**(p_i * p_j)``.
    """
    n = len(sigma)
    if n != len(parities):
        raise ValueError(f"permutation of length {n} vs {len(parities)} parities")
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"not a permutation: {tuple(sigma)!r}")
    odd_swaps = 0
    for p in range(n):
        sp = sigma[p]
        if not parities[sp]:
            continue
        for q in range(p + 1, n):
            sq = sigma[q]
            if sq < sp and parities[sq]:
                odd_swaps += 1
    return -1 if odd_swaps % 2 else 1


def sort_sign(indices: Sequence[int], parities: Sequence[int]) -> int:
    """Koszul sign relating a basis tuple to its sorted (canonical) order.

    ``parities`` is indexed by basis index.  Equal indices are never swapped.
    """
    odd_swaps = 0
    n = len(indices)
    for p in range(n):
        ip = indices[p]
        if not parities[ip]:
            continue
        for q in range(p + 1, n):
            iq = indices[q]
            if iq < ip and parities[iq]:
                odd_swaps += 1
    return -1 if odd_swaps % 2 else 1


def enumerate_shuffles(k: int, l: int) -> list[tuple[int, ...]]:
    """All (k, l)-shuffles in lexicographic order.

    A shuffle is returned as the tuple ``(s_0, ..., s_{k+l-1})`` of positions,
    increasing on the first ``k`` entries and on the last ``l``.
    """
    if k < 0 or l < 0:
        raise ValueError("shuffle block sizes must be non-negative")
    n = k + l
    out = []
    for head in itertools.combinations(range(n), k):
        chosen = set(head)
        out.append(head + tuple(i for i in range(n) if i not in chosen))
    return out


def is_canonical(indices: Sequence[int], parities: Sequence[int]) -> bool:
    """Non-decreasing, with no odd index repeated."""
    for a, b in zip(indices, indices[1:]):
        if a > b or (a == b and parities[a]):
            return False
    return True


def canonical_tuples(parities: Sequence[int], arity: int, among: Sequence[int] | None = None):
    """Iterate canonical basis tuples of the given arity, in lexicographic order."""
    pool = list(range(len(parities))) if among is None else sorted(among)
    for combo in itertools.combinations_with_replacement(pool, arity):
        if is_canonical(combo, parities):
            yield combo


# ---------------------------------------------------------------------------
# spaces and vectors


@dataclass(frozen=True)
class GradedSpace:
    names: tuple
    parities: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "parities", tuple(int(p) for p in self.parities))
        if len(self.names) != len(self.parities):
            raise GradingError("names and parities differ in length")
        if len(set(self.names)) != len(self.names):
            raise GradingError("basis names must be unique")
        if any(p not in (0, 1) for p in self.parities):
            raise GradingError("parities must be 0 or 1")

    @classmethod
    def from_dims(cls, even: int, odd: int, prefix: str = "e") -> "GradedSpace":
        names = [f"{prefix}{i}" for i in range(even + odd)]
        return cls(tuple(names), (0,) * even + (1,) * odd)

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def dims(self) -> tuple[int, int]:
        odd = sum(self.parities)
        return (self.dim - odd, odd)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def basis_vector(self, i: int) -> "Vector":
        return Vector(self, {i: Fraction(1)})

    def zero(self) -> "Vector":
        return Vector(self, {})

    def vector(self, coeffs) -> "Vector":
        """Build a vector from a mapping ``index -> scalar`` or a dense sequence."""
        if isinstance(coeffs, Mapping):
            return Vector(self, {int(i): scalar(c) for i, c in coeffs.items()})
        coeffs = list(coeffs)
        if len(coeffs) != self.dim:
            raise GradingError(f"expected {self.dim} coordinates, got {len(coeffs)}")
        return Vector(self, {i: scalar(c) for i, c in enumerate(coeffs)})


def parity_reverse(space: GradedSpace, mark: str = "Π") -> GradedSpace:
    return GradedSpace(tuple(mark + n for n in space.names), tuple(1 - p for p in space.parities))


def direct_sum(*spaces: GradedSpace) -> GradedSpace:
    names, parities = [], []
    for s in spaces:
        names.extend(s.names)
        parities.extend(s.parities)
    return GradedSpace(tuple(names), tuple(parities))


class Vector:
    """Sparse vector over an ordered basis; zero coefficients are never stored."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: GradedSpace, coeffs: Mapping[int, Fraction] | None = None):
        clean = {}
        for i, c in (coeffs or {}).items():
            if not 0 <= i < space.dim:
                raise GradingError(f"index {i} out of range for dimension {space.dim}")
            if c:
                clean[i] = c if isinstance(c, Fraction) else scalar(c)
        self.space = space
        self.coeffs = clean

    @classmethod
    def _raw(cls, space, coeffs):
        v = cls.__new__(cls)
        v.space = space
        v.coeffs = coeffs
        return v

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs.get(i, Fraction(0))

    def __iter__(self):
        return iter(sorted(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        if other.space != self.space:
            raise GradingError("vectors live in different spaces")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        add_into(out, other.coeffs)
        return Vector._raw(self.space, out)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        add_into(out, other.coeffs, -1)
        return Vector._raw(self.space, out)

    def __neg__(self):
        return Vector._raw(self.space, {i: -c for i, c in self.coeffs.items()})

    def __mul__(self, c):
        c = scalar(c)
        if not c:
            return Vector._raw(self.space, {})
        return Vector._raw(self.space, {i: c * v for i, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        return self.space == other.space and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.space, frozenset(self.coeffs.items())))

    @property
    def parity(self) -> int | None:
        """Common parity of the support, 0 for the zero vector, None if mixed."""
        ps = {self.space.parities[i] for i in self.coeffs}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def dense(self) -> list[Fraction]:
        return [self[i] for i in range(self.space.dim)]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = [f"{format_rational(c)}*{self.space.names[i]}" for i, c in self]
        return " + ".join(terms)


def add_into(acc: dict, terms: Mapping[int, Fraction], scale=1) -> None:
    """``acc += scale * terms`` on sparse dicts, dropping cancelled entries."""
    for i, c in terms.items():
        v = acc.get(i, 0) + scale * c
        if v:
            acc[i] = v
        else:
            acc.pop(i, None)


# ---------------------------------------------------------------------------
# linear maps


@dataclass(frozen=True, eq=False)
class GradedLinearMap:
    """Parity-homogeneous linear map stored as sparse columns.

    ``columns[i]`` is the image of basis vector ``i`` of the source, as a dict
    ``row -> scalar``.  The columns are shared, never mutated.
    """

    source: GradedSpace
    target: GradedSpace
    parity: int
    columns: tuple

    def __post_init__(self):
        cols = tuple({r: c for r, c in col.items() if c} for col in self.columns)
        object.__setattr__(self, "columns", cols)
        if len(cols) != self.source.dim:
            raise GradingError(f"{len(cols)} columns for a source of dimension {self.source.dim}")
        tp, sp = self.target.parities, self.source.parities
        for i, col in enumerate(cols):
            for k in col:
                if not 0 <= k < self.target.dim:
                    raise GradingError(f"row {k} out of range")
                if tp[k] != (sp[i] + self.parity) % 2:
                    raise GradingError(
                        f"entry ({k}, {i}) breaks parity {self.parity}: "
                        f"{self.source.names[i]} -> {self.target.names[k]}"
                    )

    @classmethod
    def from_dense(cls, source, target, rows, parity=None):
        cols = [dict() for _ in range(source.dim)]
        for k, row in enumerate(rows):
            if len(row) != source.dim:
                raise GradingError("dense row has the wrong length")
            for i, c in enumerate(row):
                c = scalar(c)
                if c:
                    cols[i][k] = c
        if parity is None:
            parity = infer_parity(source, target, cols)
        return cls(source, target, parity, tuple(cols))

    @classmethod
    def from_entries(cls, source, target, parity, entries: Iterable):
        """From ``(row, col, value)`` triples; repeated positions add up."""
        cols = [dict() for _ in range(source.dim)]
        for row, col, value in entries:
            add_into(cols[col], {row: scalar(value)})
        return cls(source, target, parity, tuple(cols))

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, tuple({i: Fraction(1)} for i in range(space.dim)))

    @classmethod
    def zero(cls, source, target, parity=0):
        return cls(source, target, parity, tuple({} for _ in range(source.dim)))

    def apply(self, v):
        if isinstance(v, Vector):
            if v.space != self.source:
                raise GradingError("vector is not in the source space")
            return Vector._raw(self.target, self.apply_coeffs(v.coeffs))
        return self.apply_coeffs(v)

    __call__ = apply

    def apply_coeffs(self, coeffs: Mapping[int, Fraction]) -> dict:
        out: dict = {}
        for i, c in coeffs.items():
            add_into(out, self.columns[i], c)
        return out

    def entries(self):
        """Sorted ``(row, col, value)`` triples."""
        return sorted((r, i, c) for i, col in enumerate(self.columns) for r, c in col.items())

    def to_dense(self) -> list[list[Fraction]]:
        rows = [[Fraction(0)] * self.source.dim for _ in range(self.target.dim)]
        for i, col in enumerate(self.columns):
            for r, c in col.items():
                rows[r][i] = c
        return rows

    def is_zero(self) -> bool:
        return not any(self.columns)

    def __eq__(self, other):
        if not isinstance(other, GradedLinearMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and (self.parity == other.parity or (self.is_zero() and other.is_zero()))
            and self.columns == other.columns
        )

    __hash__ = None

    def _combine(self, other, scale):
        if self.source != other.source or self.target != other.target:
            raise GradingError("maps between different spaces")
        if self.parity != other.parity and not (self.is_zero() or other.is_zero()):
            raise GradingError("sum of maps of different parity is not homogeneous")
        parity = other.parity if self.is_zero() else self.parity
        cols = []
        for a, b in zip(self.columns, other.columns):
            col = dict(a)
            add_into(col, b, scale)
            cols.append(col)
        return GradedLinearMap(self.source, self.target, parity, tuple(cols))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, c):
        c = scalar(c)
        cols = tuple({r: c * v for r, v in col.items()} for col in self.columns)
        return GradedLinearMap(self.source, self.target, self.parity, cols)

    def __rmul__(self, c):
        return self.scaled(c)

    def __matmul__(self, other):
        return compose(self, other)

    def rank(self) -> int:
        return rank(self)

    def kernel_basis(self) -> list[Vector]:
        return kernel_basis(self)


def infer_parity(source, target, cols) -> int:
    seen = {(target.parities[k] + source.parities[i]) % 2 for i, col in enumerate(cols) for k in col}
    if len(seen) > 1:
        raise GradingError("matrix mixes even and odd blocks")
    return seen.pop() if seen else 0


def compose(f: GradedLinearMap, g: GradedLinearMap) -> GradedLinearMap:
    """``f ∘ g`` (apply g first)."""
    if g.target != f.source:
        raise GradingError("cannot compose: target of g is not the source of f")
    cols = tuple(f.apply_coeffs(col) for col in g.columns)
    return GradedLinearMap(g.source, f.target, (f.parity + g.parity) % 2, cols)


def rank(f: GradedLinearMap) -> int:
    return linalg.rank(f.to_dense())


def kernel_basis(f: GradedLinearMap) -> list[Vector]:
    basis = linalg.nullspace(f.to_dense(), f.source.dim)
    return [f.source.vector(v) for v in basis]


def block_map(source_blocks, target_blocks, blocks, parity) -> GradedLinearMap:
    """Assemble a map between direct sums from a grid of blocks.

    ``blocks[r][c]`` maps summand ``c`` of the source to summand ``r`` of the
    target; it may be None (zero), a GradedLinearMap, or a dense matrix.
    """
    source = direct_sum(*source_blocks)
    target = direct_sum(*target_blocks)
    s_off = list(itertools.accumulate([0] + [s.dim for s in source_blocks]))
    t_off = list(itertools.accumulate([0] + [t.dim for t in target_blocks]))
    cols = [dict() for _ in range(source.dim)]
    for r, row in enumerate(blocks):
        for c, blk in enumerate(row):
            if blk is None:
                continue
            if not isinstance(blk, GradedLinearMap):
                blk_cols = [dict() for _ in range(source_blocks[c].dim)]
                for k, dense_row in enumerate(blk):
                    for i, v in enumerate(dense_row):
                        if v:
                            blk_cols[i][k] = scalar(v)
            else:
                if blk.source.dim != source_blocks[c].dim or blk.target.dim != target_blocks[r].dim:
                    raise GradingError(f"block ({r}, {c}) has the wrong shape")
                blk_cols = blk.columns
            for i, col in enumerate(blk_cols):
                add_into(cols[s_off[c] + i], {t_off[r] + k: v for k, v in col.items()})
    return GradedLinearMap(source, target, parity, tuple(cols))


def relabel(f: GradedLinearMap, source: GradedSpace | None = None, target: GradedSpace | None = None):
    """Same matrix, reinterpreted between spaces with identical parities."""
    source = source or f.source
    target = target or f.target
    if source.parities != f.source.parities or target.parities != f.target.parities:
        raise GradingError("relabelling must keep parities")
    return GradedLinearMap(source, target, f.parity, f.columns)
