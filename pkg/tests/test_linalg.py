import random
from fractions import Fraction

import sympy

from superbrackets import linalg


def random_matrix(rng, r, c):
    return [[Fraction(rng.randint(-2, 2)) * (rng.random() < 0.6) for _ in range(c)] for _ in range(r)]


def test_rank_and_kernel_against_sympy():
    rng = random.Random(5)
    for _ in range(60):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = random_matrix(rng, r, c)
        sm = sympy.Matrix(m)
        assert linalg.rank(m) == sm.rank()
        ker = linalg.nullspace(m, c)
        assert len(ker) == len(sm.nullspace())
        for v in ker:
            assert all(sum(row[j] * v[j] for j in range(c)) == 0 for row in m)
        if ker:
            assert linalg.rank(ker) == len(ker)


def test_solve():
    a = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
    x = linalg.solve(a, [Fraction(5), Fraction(6)])
    assert x == [-4, Fraction(9, 2)]
    assert linalg.solve([[Fraction(1)], [Fraction(1)]], [Fraction(1), Fraction(2)]) is None
