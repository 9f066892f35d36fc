"""Z2-graded complexes, exact homology and the standard (co)cylinder constructions.

A complex is a graded space with an odd differential of square zero; chain
maps are even and commute with the differentials.  Direct sums keep the
summands in the written order, so two constructions can be compared as
matrices.  Parity shift negates the differential.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import linalg
from .errors import ArgumentError, PreconditionError
from .graded import GradedLinearMap, GradedSpace, Vector, block_map, compose, format_rational, parity_reverse
from .superalgebra import Decomposition, Derivation, ValidationReport, check_preserves_k


def _column_witness(m: GradedLinearMap):
    for i, col in enumerate(m.columns):
        if col:
            return {"column": m.source.names[i], "image": {m.target.names[k]: format_rational(c) for k, c in sorted(col.items())}}
    return None


def validate_complex(space: GradedSpace, d: GradedLinearMap) -> ValidationReport:
    rep = ValidationReport("complex")
    if d.source != space or d.target != space:
        rep.violations.append({"reason": "differential is not an endomorphism of the space"})
        return rep
    if d.parity != 1:
        rep.violations.append({"reason": "differential is not odd"})
        return rep
    w = _column_witness(compose(d, d))
    if w:
        rep.violations.append({"reason": "d^2 != 0", **w})
    return rep


def _reinterpret(f: GradedLinearMap, source: GradedSpace, target: GradedSpace, parity: int) -> GradedLinearMap:
    """Same matrix between spaces of equal dimensions, possibly parity-shifted."""
    return GradedLinearMap(source, target, parity, f.columns)


def _identity_between(source: GradedSpace, target: GradedSpace, scale=1) -> GradedLinearMap:
    c = Fraction(scale)
    parity = (source.parities[0] + target.parities[0]) % 2 if source.dim else 0
    return GradedLinearMap(source, target, parity, tuple({i: c} for i in range(source.dim)))


def _tag(spaces, labels):
    """Disambiguate basis names of summands only when they collide."""
    names = [n for s in spaces for n in s.names]
    if len(set(names)) == len(names):
        return list(spaces)
    return [GradedSpace(tuple(f"{lab}.{n}" for n in s.names), s.parities) for s, lab in zip(spaces, labels)]


@dataclass(frozen=True, eq=False)
class Complex:
    space: GradedSpace
    differential: GradedLinearMap

    def __post_init__(self):
        rep = validate_complex(self.space, self.differential)
        if not rep.ok:
            raise ArgumentError(f"not a complex: {rep.violations[0]}")

    @property
    def d(self) -> GradedLinearMap:
        return self.differential

    @classmethod
    def zero(cls, space: GradedSpace) -> "Complex":
        return cls(space, GradedLinearMap.zero(space, space, 1))

    def relabelled(self, space: GradedSpace) -> "Complex":
        return Complex(space, _reinterpret(self.d, space, space, 1))

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        return self.space.parities == other.space.parities and self.d.to_dense() == other.d.to_dense()

    __hash__ = None

    def __repr__(self):
        return f"Complex(dims={self.space.dims})"


def validate_chain_map(source: Complex, target: Complex, f: GradedLinearMap) -> ValidationReport:
    rep = ValidationReport("chain map")
    if f.source.parities != source.space.parities or f.target.parities != target.space.parities:
        rep.violations.append({"reason": "map does not match the complexes"})
        return rep
    if f.parity != 0:
        rep.violations.append({"reason": "chain map is not even"})
        return rep
    f = _reinterpret(f, source.space, target.space, 0)
    w = _column_witness(compose(target.d, f) - compose(f, source.d))
    if w:
        rep.violations.append({"reason": "d f != f d", **w})
    return rep


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: Complex
    target: Complex
    map: GradedLinearMap

    def __post_init__(self):
        rep = validate_chain_map(self.source, self.target, self.map)
        if not rep.ok:
            raise ArgumentError(f"not a chain map: {rep.violations[0]}")
        object.__setattr__(self, "map", _reinterpret(self.map, self.source.space, self.target.space, 0))

    def __call__(self, v):
        return self.map.apply(v)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(other.source, self.target, compose(self.map, other.map))

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        return cls(c, c, GradedLinearMap.identity(c.space))

    @classmethod
    def zero(cls, source: Complex, target: Complex) -> "ChainMap":
        return cls(source, target, GradedLinearMap.zero(source.space, target.space))


# ---------------------------------------------------------------------------
# homology


def _block(m: GradedLinearMap, rows, cols):
    return [[m.columns[c].get(r, Fraction(0)) for c in cols] for r in rows]


@dataclass
class HomologySummary:
    """Homology dimensions per parity with chosen cycle representatives.

    ``representatives[p]`` lists vectors of the complex; ``boundaries[p]`` is
    a basis of im d in parity p, kept to express classes.
    """

    even: int
    odd: int
    representatives: dict = field(default_factory=dict)
    boundaries: dict = field(default_factory=dict)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.even, self.odd)

    @property
    def euler_characteristic(self) -> int:
        return self.even - self.odd


def homology(c: Complex) -> HomologySummary:
    sp = c.space
    idx = {p: [i for i in range(sp.dim) if sp.parities[i] == p] for p in (0, 1)}
    reps, bounds, dims = {}, {}, {}
    for p in (0, 1):
        own, other = idx[p], idx[1 - p]
        cycles = linalg.nullspace(_block(c.d, other, own), len(own)) if own else []
        image = linalg.transpose(_block(c.d, own, other), len(own)) if other else []
        basis = [row for row in linalg.rref(image, len(own))[0] if any(row)] if own else []
        chosen = []
        current = list(basis)
        r = len(basis)
        for z in cycles:
            trial = current + [z]
            if linalg.rank(trial) > r:
                current = trial
                r += 1
                chosen.append(z)
        def lift(coords, own=own):
            return Vector(sp, {own[i]: x for i, x in enumerate(coords) if x})
        reps[p] = [lift(z) for z in chosen]
        bounds[p] = [lift(b) for b in basis]
        dims[p] = len(chosen)
    return HomologySummary(dims[0], dims[1], reps, bounds)


@dataclass
class InducedMap:
    """Induced map on homology, one matrix per parity (target classes × source classes)."""

    even: list
    odd: list
    source_dims: tuple
    target_dims: tuple

    def block(self, p: int) -> list:
        return self.odd if p else self.even

    @property
    def is_iso(self) -> bool:
        if self.source_dims != self.target_dims:
            return False
        return all(linalg.rank(self.block(p)) == self.source_dims[p] for p in (0, 1))


def induced_homology_map(f: ChainMap, source_h: HomologySummary | None = None,
                         target_h: HomologySummary | None = None) -> InducedMap:
    hs = source_h or homology(f.source)
    ht = target_h or homology(f.target)
    blocks = {}
    for p in (0, 1):
        basis = ht.representatives[p] + ht.boundaries[p]
        rows = [[v[i] for v in basis] for i in range(f.target.space.dim)]
        n_cls = len(ht.representatives[p])
        mat = [[Fraction(0)] * len(hs.representatives[p]) for _ in range(n_cls)]
        for col, z in enumerate(hs.representatives[p]):
            image = f(z)
            sol = linalg.solve(rows, image.dense()) if basis else ([] if not image else None)
            if sol is None:
                raise ArgumentError("image of a cycle is not a cycle; the map is not a chain map")
            for r in range(n_cls):
                mat[r][col] = sol[r]
        blocks[p] = mat
    return InducedMap(blocks[0], blocks[1], hs.dims, ht.dims)


def is_quasi_iso(f: ChainMap) -> bool:
    return induced_homology_map(f).is_iso


# ---------------------------------------------------------------------------
# standard constructions


def shift(c: Complex, mark: str = "Π") -> Complex:
    """ΠC with differential -d."""
    sp = parity_reverse(c.space, mark)
    return Complex(sp, _reinterpret(-c.d, sp, sp, 1))


class Cylinder(NamedTuple):
    complex: Complex
    j: ChainMap
    p: ChainMap
    i: ChainMap


class Cocylinder(NamedTuple):
    complex: Complex
    j: ChainMap
    p: ChainMap
    q: ChainMap


def _check(f: ChainMap):
    if not isinstance(f, ChainMap):
        raise ArgumentError("expected a ChainMap")


def cylinder(f: ChainMap) -> Cylinder:
    """Cyl f = X ⊕ ΠX ⊕ Y, d(x1, Πx2, y) = (dx1 - x2, -Πdx2, dy + f x2)."""
    _check(f)
    X, Y = f.source, f.target
    bx, bpx, by = _tag([X.space, parity_reverse(X.space), Y.space], ["x1", "x2", "y"])
    dx = X.d
    d = block_map([bx, bpx, by], [bx, bpx, by], [
        [dx, _identity_between(bpx, bx, -1), None],
        [None, _reinterpret(-dx, bpx, bpx, 1), None],
        [None, _reinterpret(f.map, bpx, by, 1), Y.d],
    ], 1)
    cyl = Complex(d.source, d)
    j = ChainMap(X, cyl, block_map([X.space], [bx, bpx, by], [[GradedLinearMap.identity(X.space)], [None], [None]], 0))
    p = ChainMap(cyl, Y, block_map([bx, bpx, by], [Y.space], [[f.map, None, GradedLinearMap.identity(Y.space)]], 0))
    i = ChainMap(Y, cyl, block_map([Y.space], [bx, bpx, by], [[None], [None], [GradedLinearMap.identity(Y.space)]], 0))
    return Cylinder(cyl, j, p, i)


def cone(f: ChainMap) -> Complex:
    """Cone f = ΠX ⊕ Y, d(Πx, y) = (-Πdx, dy + f x)."""
    _check(f)
    X, Y = f.source, f.target
    bpx, by = _tag([parity_reverse(X.space), Y.space], ["x", "y"])
    d = block_map([bpx, by], [bpx, by], [
        [_reinterpret(-X.d, bpx, bpx, 1), None],
        [_reinterpret(f.map, bpx, by, 1), Y.d],
    ], 1)
    return Complex(d.source, d)


def cocylinder(f: ChainMap) -> Cocylinder:
    """Cocyl f = X ⊕ Y ⊕ ΠY, d(x, y1, Πy2) = (dx, dy1, Π(f x - y1 - dy2))."""
    _check(f)
    X, Y = f.source, f.target
    bx, by, bpy = _tag([X.space, Y.space, parity_reverse(Y.space)], ["x", "y1", "y2"])
    d = block_map([bx, by, bpy], [bx, by, bpy], [
        [X.d, None, None],
        [None, Y.d, None],
        [_reinterpret(f.map, bx, bpy, 1), _identity_between(by, bpy, -1), _reinterpret(-Y.d, bpy, bpy, 1)],
    ], 1)
    cc = Complex(d.source, d)
    ix, iy = GradedLinearMap.identity(X.space), GradedLinearMap.identity(Y.space)
    j = ChainMap(X, cc, block_map([X.space], [bx, by, bpy], [[ix], [f.map], [None]], 0))
    p = ChainMap(cc, Y, block_map([bx, by, bpy], [Y.space], [[None, iy, None]], 0))
    q = ChainMap(cc, X, block_map([bx, by, bpy], [X.space], [[ix, None, None]], 0))
    return Cocylinder(cc, j, p, q)


def cocone(f: ChainMap) -> Complex:
    """Cocone f = X ⊕ ΠY, d(x, Πy) = (dx, Π(f x - dy))."""
    _check(f)
    X, Y = f.source, f.target
    bx, bpy = _tag([X.space, parity_reverse(Y.space)], ["x", "y"])
    d = block_map([bx, bpy], [bx, bpy], [
        [X.d, None],
        [_reinterpret(f.map, bx, bpy, 1), _reinterpret(-Y.d, bpy, bpy, 1)],
    ], 1)
    return Complex(d.source, d)


def negate(f: ChainMap) -> ChainMap:
    return ChainMap(f.source, f.target, -f.map)


def check_cone_cocone_duality(f: ChainMap) -> bool:
    """ΠCone f and Cocone(-f) have entrywise equal differentials."""
    lhs = shift(cone(f))
    rhs = cocone(negate(f))
    return lhs.space.parities == rhs.space.parities and lhs.d.to_dense() == rhs.d.to_dense()


def kernel_subcomplex(p: ChainMap, indices) -> Complex:
    """Restriction of the source complex to the coordinate subspace ``indices``.

    Raises if those coordinates are not exactly Ker p or are not d-stable.
    """
    src = p.source
    idx = list(indices)
    pos = {i: n for n, i in enumerate(idx)}
    for i in range(src.space.dim):
        if (i in pos) == bool(p.map.columns[i]):
            raise ArgumentError("the given coordinates are not the kernel of p")
    sp = GradedSpace(tuple(src.space.names[i] for i in idx), tuple(src.space.parities[i] for i in idx))
    cols = []
    for i in idx:
        col = src.d.columns[i]
        if any(k not in pos for k in col):
            raise ArgumentError("kernel coordinates are not preserved by d")
        cols.append({pos[k]: c for k, c in col.items()})
    return Complex(sp, GradedLinearMap(sp, sp, 1, tuple(cols)))


# ---------------------------------------------------------------------------
# the small cocylinder L ⊕ ΠV of K → L


@dataclass
class SmallCocylinder:
    """Cocylinder diagram K → L ⊕ ΠV → L and its parity-shifted twin ΠL ⊕ V.

    ``complex``: d(x, Πa) = (Dx, -ΠP(x + Da)).
    ``shifted``: d(Πx, a) = (-ΠDx, P(x + Da)) on ΠL ⊕ V.
    ``fiber``: ΠV = Ker p with differential -ΠPD.
    """

    k: Complex
    l: Complex
    complex: Complex
    j: ChainMap
    p: ChainMap
    q: ChainMap
    i: ChainMap
    shifted: Complex
    shifted_j: ChainMap
    shifted_p: ChainMap
    fiber: Complex


def square_witness(D: Derivation):
    return _column_witness(compose(D.map, D.map))


def small_cocylinder(dec: Decomposition, D: Derivation) -> SmallCocylinder:
    if D.parity != 1:
        raise PreconditionError("D must be odd")
    w = square_witness(D)
    if w:
        raise PreconditionError(f"D^2 != 0: {w}")
    if not check_preserves_k(D, dec):
        raise PreconditionError("D does not preserve K = Ker P")
    Lsp, Ksp, Vsp = dec.algebra.space, dec.k_space, dec.v_space
    PiV, PiL = parity_reverse(Vsp), parity_reverse(Lsp)
    iK = dec.inclusion_of_k()
    iV = dec.inclusion_of_v()
    P = dec.projection_to_v()
    dK = GradedLinearMap(Ksp, Ksp, 1, tuple(dec.to_k(D.apply_coeffs(col)) for col in iK.columns))
    Kc = Complex(Ksp, dK)
    Lc = Complex(Lsp, D.map)
    PD = compose(P, compose(D.map, iV))
    d = block_map([Lsp, PiV], [Lsp, PiV], [
        [D.map, None],
        [_reinterpret(-P, Lsp, PiV, 1), _reinterpret(-PD, PiV, PiV, 1)],
    ], 1)
    cc = Complex(d.source, d)
    j = ChainMap(Kc, cc, block_map([Ksp], [Lsp, PiV], [[iK], [None]], 0))
    p = ChainMap(cc, Lc, block_map([Lsp, PiV], [Lsp], [[GradedLinearMap.identity(Lsp), None]], 0))
    # q(x, Πa) = (1 - P)(x + Da), in K coordinates
    q_cols = [dec.to_k(col) for col in GradedLinearMap.identity(Lsp).columns]
    q_cols += [dec.to_k(D.apply_coeffs(col)) for col in iV.columns]
    q = ChainMap(cc, Kc, GradedLinearMap(cc.space, Ksp, 0, tuple(q_cols)))
    i = ChainMap(Kc, Lc, iK)

    ssp = GradedSpace(PiL.names + Vsp.names, PiL.parities + Vsp.parities)
    shifted = Complex(ssp, _reinterpret(-d, ssp, ssp, 1))
    PiK = parity_reverse(Ksp)
    sKc = Complex(PiK, _reinterpret(-dK, PiK, PiK, 1))
    sLc = Complex(PiL, _reinterpret(-D.map, PiL, PiL, 1))
    shifted_j = ChainMap(sKc, shifted, _reinterpret(j.map, PiK, ssp, 0))
    shifted_p = ChainMap(shifted, sLc, _reinterpret(p.map, ssp, PiL, 0))
    fiber = kernel_subcomplex(p, range(Lsp.dim, cc.space.dim))
    return SmallCocylinder(Kc, Lc, cc, j, p, q, i, shifted, shifted_j, shifted_p, fiber)
