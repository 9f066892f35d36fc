"""Seeded random instances for property tests: complexes, chain maps, derivations."""
from __future__ import annotations

import random
from fractions import Fraction

from . import linalg
from .graded import GradedLinearMap, GradedSpace
from .homotopy import ChainMap, Complex
from .superalgebra import Decomposition, Derivation, derivation_space


def _rat(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound))


def random_complex(rng: random.Random, even: int, odd: int, prefix: str = "e", steps: int | None = None) -> Complex:
    """d = S N S⁻¹ with N a random standard form (pairs u ↦ du) and S even invertible."""
    space = GradedSpace.from_dims(even, odd, prefix)
    ev, od = list(range(even)), list(range(even, even + odd))
    rng.shuffle(ev)
    rng.shuffle(od)
    n = space.dim
    N = [[Fraction(0)] * n for _ in range(n)]
    while ev and od and rng.random() < 0.7:
        if rng.random() < 0.5:
            src, dst = ev.pop(), od.pop()
        else:
            src, dst = od.pop(), ev.pop()
        N[dst][src] = Fraction(1)
    S = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    Sinv = [row[:] for row in S]
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.randrange(n), rng.randrange(n) if n else 0
        if i == j or space.parities[i] != space.parities[j]:
            continue
        c = _rat(rng, 2)
        for row in S:
            row[j] += c * row[i]
        Sinv[i] = [a - c * b for a, b in zip(Sinv[i], Sinv[j])]
    d = linalg.matmul(linalg.matmul(S, N), Sinv) if n else []
    return Complex(space, GradedLinearMap.from_dense(space, space, d, parity=1))


def chain_map_basis(X: Complex, Y: Complex) -> list[GradedLinearMap]:
    """Basis of the space of chain maps X → Y (solves dY f = f dX)."""
    xs, ys = X.space, Y.space
    unknowns = [(r, c) for c in range(xs.dim) for r in range(ys.dim) if xs.parities[c] == ys.parities[r]]
    pos = {u: n for n, u in enumerate(unknowns)}
    dX, dY = X.d.to_dense(), Y.d.to_dense()
    rows = []
    for r in range(ys.dim):
        for c in range(xs.dim):
            eq = [Fraction(0)] * len(unknowns)
            for k in range(ys.dim):
                if dY[r][k] and (k, c) in pos:
                    eq[pos[(k, c)]] += dY[r][k]
            for k in range(xs.dim):
                if dX[k][c] and (r, k) in pos:
                    eq[pos[(r, k)]] -= dX[k][c]
            if any(eq):
                rows.append(eq)
    basis = linalg.nullspace(rows, len(unknowns)) if unknowns else []
    out = []
    for vec in basis:
        entries = [(r, c, vec[pos[(r, c)]]) for (r, c) in unknowns if vec[pos[(r, c)]]]
        out.append(GradedLinearMap.from_entries(xs, ys, 0, entries))
    return out


def random_chain_map(rng: random.Random, X: Complex, Y: Complex) -> ChainMap:
    f = GradedLinearMap.zero(X.space, Y.space)
    for b in chain_map_basis(X, Y):
        c = _rat(rng, 2)
        if c:
            f = f + b.scaled(c)
    return ChainMap(X, Y, f)


def random_derivation(rng: random.Random, dec: Decomposition, parity: int, preserve_k: bool = True) -> Derivation:
    """Random combination of a basis of derivations (preserving K if asked)."""
    basis = derivation_space(dec.algebra, parity, dec if preserve_k else None)
    m = GradedLinearMap.zero(dec.algebra.space, dec.algebra.space, parity)
    for b in basis:
        c = _rat(rng, 2)
        if c:
            m = m + b.map.scaled(c)
    return Derivation(dec.algebra, m)
