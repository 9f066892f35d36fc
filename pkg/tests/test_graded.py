import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from superbrackets.graded import (
    GradedLinearMap,
    GradedSpace,
    GradingError,
    Vector,
    block_map,
    canonical_tuples,
    enumerate_shuffles,
    format_rational,
    is_canonical,
    koszul_sign,
    parity_reverse,
    parse_rational,
    scalar,
    sort_sign,
)


def bubble_sign(sigma, parities):
    """Sort the arrangement by adjacent swaps, one -1 per odd-odd swap."""
    arr = list(sigma)
    sign = 1
    for end in range(len(arr) - 1, 0, -1):
        for k in range(end):
            if arr[k] > arr[k + 1]:
                if parities[arr[k]] and parities[arr[k + 1]]:
                    sign = -sign
                arr[k], arr[k + 1] = arr[k + 1], arr[k]
    return sign


perm_and_parities = st.integers(0, 7).flatmap(
    lambda n: st.tuples(st.permutations(list(range(n))), st.lists(st.integers(0, 1), min_size=n, max_size=n)))


@given(perm_and_parities)
@settings(max_examples=300, deadline=None)
def test_koszul_matches_adjacent_transpositions(data):
    sigma, par = data
    assert koszul_sign(sigma, par) == bubble_sign(sigma, par)


def test_koszul_composition_exhaustive():
    for n in range(6):
        for par in itertools.product((0, 1), repeat=n):
            perms = list(itertools.permutations(range(n)))
            for sigma in perms[:24]:
                moved = [par[s] for s in sigma]
                for tau in perms[:24]:
                    rho = [sigma[t] for t in tau]
                    assert koszul_sign(rho, par) == koszul_sign(sigma, par) * koszul_sign(tau, moved)


def test_koszul_rejects_bad_input():
    with pytest.raises(ValueError):
        koszul_sign((0, 0), (1, 1))
    with pytest.raises(ValueError):
        koszul_sign((0, 1), (1,))


def test_koszul_small_cases():
    assert koszul_sign((), ()) == 1
    assert koszul_sign((1, 0), (1, 1)) == -1
    assert koszul_sign((1, 0), (0, 1)) == 1
    assert koszul_sign((2, 1, 0), (1, 1, 1)) == -1


@pytest.mark.parametrize("k,l", [(k, l) for k in range(9) for l in range(9 - k)])
def test_shuffle_counts(k, l):
    sh = enumerate_shuffles(k, l)
    assert len(sh) == math.comb(k + l, k)
    assert len(set(sh)) == len(sh)
    for s in sh:
        assert sorted(s) == list(range(k + l))
        assert list(s[:k]) == sorted(s[:k]) and list(s[k:]) == sorted(s[k:])
    assert sh == sorted(sh)


def test_canonical_tuples():
    par = (0, 1, 1)
    assert is_canonical((0, 0, 1), par)
    assert not is_canonical((1, 1), par)
    assert not is_canonical((2, 1), par)
    assert list(canonical_tuples(par, 2)) == [(0, 0), (0, 1), (0, 2), (1, 2)]
    # count: multisets of even, subsets of odd
    par = (0, 0, 1, 1, 1)
    for k in range(5):
        expect = sum(math.comb(2 + a - 1, a) * math.comb(3, k - a) for a in range(k + 1))
        assert len(list(canonical_tuples(par, k))) == expect


def test_sort_sign_consistent_with_koszul():
    par = (1, 0, 1, 1)
    for idx in itertools.permutations(range(4)):
        order = sorted(range(4), key=lambda p: idx[p])
        assert sort_sign(idx, par) == koszul_sign(order, [par[i] for i in idx])


def test_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-4") == -4
    assert format_rational(Fraction(-1, 2)) == "-1/2"
    assert format_rational(Fraction(5)) == "5"
    for bad in ["1/0", "x", "1.5", ""]:
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        scalar(0.5)
    with pytest.raises(TypeError):
        scalar(True)


def test_vector_arithmetic_and_parity():
    sp = GradedSpace(("a", "b", "c"), (0, 1, 1))
    u = sp.vector({0: 1})
    v = sp.vector({1: 2, 2: -1})
    assert (u + v).parity is None
    assert v.parity == 1 and sp.zero().parity == 0
    assert (v - v) == sp.zero()
    assert (v * Fraction(1, 2)).coeffs == {1: 1, 2: Fraction(-1, 2)}
    with pytest.raises(GradingError):
        Vector(sp, {3: 1})


def test_linear_map_parity_enforced():
    sp = GradedSpace(("a", "b"), (0, 1))
    GradedLinearMap.from_dense(sp, sp, [[0, 1], [1, 0]], parity=1)
    with pytest.raises(GradingError):
        GradedLinearMap.from_dense(sp, sp, [[1, 1], [0, 0]])


def test_block_map_and_parity_reverse():
    sp = GradedSpace(("a", "b"), (0, 1))
    ps = parity_reverse(sp)
    assert ps.parities == (1, 0) and ps.names == ("Πa", "Πb")
    ident = GradedLinearMap.identity(sp)
    m = block_map([sp], [sp, sp.__class__(("c", "d"), (0, 1))], [[ident], [[[2, 0], [0, 2]]]], 0)
    assert m.to_dense() == [[1, 0], [0, 1], [2, 0], [0, 2]]
