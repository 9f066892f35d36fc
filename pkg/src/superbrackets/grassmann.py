"""The Grassmann algebra Λ_n and operators on it.

Monomials are increasing tuples of generator indices (0-based); the basis of
Λ_n is ordered by degree, then lexicographically.  Operators are dense square
matrices acting on column vectors of monomial coefficients.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def monomials(n: int) -> tuple:
    return tuple(c for k in range(n + 1) for c in itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def monomial_index(n: int) -> dict:
    return {m: i for i, m in enumerate(monomials(n))}


def monomial_name(mono, var="x") -> str:
    return "".join(f"{var}{i + 1}" for i in mono) or "1"


def multiply(a: tuple, b: tuple):
    """``ξ^a ξ^b`` as ``(sign, monomial)``; sign 0 when they overlap."""
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


def derivative(i: int, mono: tuple):
    """Left derivative ∂/∂ξ^i of a monomial, as ``(sign, monomial)``."""
    if i not in mono:
        return 0, ()
    pos = mono.index(i)
    return (-1 if pos % 2 else 1), mono[:pos] + mono[pos + 1:]


def zero_op(n: int):
    size = 2 ** n
    return [[Fraction(0)] * size for _ in range(size)]


def identity_op(n: int):
    op = zero_op(n)
    for i in range(len(op)):
        op[i][i] = Fraction(1)
    return op


def mult_op(n: int, mono: tuple):
    """Left multiplication by ξ^mono."""
    idx = monomial_index(n)
    op = zero_op(n)
    for col, m in enumerate(monomials(n)):
        s, out = multiply(mono, m)
        if s:
            op[idx[out]][col] = Fraction(s)
    return op


def deriv_op(n: int, i: int):
    idx = monomial_index(n)
    op = zero_op(n)
    for col, m in enumerate(monomials(n)):
        s, out = derivative(i, m)
        if s:
            op[idx[out]][col] = Fraction(s)
    return op


def unit_op(n: int, row_mono: tuple, col_mono: tuple):
    """Matrix unit sending ξ^col_mono to ξ^row_mono, everything else to 0."""
    idx = monomial_index(n)
    op = zero_op(n)
    op[idx[row_mono]][idx[col_mono]] = Fraction(1)
    return op


def op_parity(n: int, op):
    """Parity of a homogeneous operator; None if mixed, 0 for the zero operator."""
    ms = monomials(n)
    seen = {(len(ms[r]) + len(ms[c])) % 2 for r, row in enumerate(op) for c, x in enumerate(row) if x}
    if len(seen) > 1:
        return None
    return seen.pop() if seen else 0


def compose(a, b):
    size = len(a)
    out = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        ai = a[i]
        oi = out[i]
        for k in range(size):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(size):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def add(a, b, scale=1):
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def supercommutator(a, b, pa: int, pb: int):
    """``ab - (-1)^{pa pb} ba``."""
    sign = -1 if (pa * pb) % 2 else 1
    return add(compose(a, b), compose(b, a), -sign)


def apply(op, coeffs):
    return [sum((row[j] * coeffs[j] for j in range(len(coeffs)) if row[j]), Fraction(0)) for row in op]
