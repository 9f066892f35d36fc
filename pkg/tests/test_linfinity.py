import itertools

import pytest

from conftest import ce_derivation, end2_homological
from superbrackets.brackets import derived_bracket_family
from superbrackets.errors import PreconditionError
from superbrackets.graded import GradedLinearMap, koszul_sign
from superbrackets.homotopy import small_cocylinder
from superbrackets.linfinity import (
    ExtendedBracketStructure,
    build_extended_brackets,
    check_binary_leibniz,
    check_v_ideal,
    homotopy_fiber_structure,
    verify_linfinity,
)
from superbrackets.superalgebra import Derivation, gen_wn


class FlippedPair(ExtendedBracketStructure):
    def pi_pair_sign(self, x_parity):
        return 1


@pytest.fixture(scope="module")
def aff2():
    alg, dec, Q, D = ce_derivation("aff2")
    return dec, D, build_extended_brackets(dec, D, 4)


def test_formula_examples(aff2):
    dec, D, s = aff2
    alg = dec.algebra
    n = s.n_l
    for x in range(n):
        for a in range(s.space.dim - n):
            got = s.bracket_basis((x, n + a))
            expect = dec.to_v(alg.bracket_basis(x, dec.v_indices[a]))
            assert got == {n + p: c for p, c in expect.items()}
    for a in range(s.space.dim - n):
        for b in range(s.space.dim - n):
            va, vb = dec.v_indices[a], dec.v_indices[b]
            expect = dec.to_v(alg.bracket_coeffs(D.column(va), {vb: 1}))
            assert s.bracket_basis((n + a, n + b)) == {n + p: c for p, c in expect.items()}
    # unary of (Πx, 0) = (-ΠDx, Px)
    for x in range(n):
        expect = {k: -c for k, c in D.column(x).items()}
        expect.update({n + p: c for p, c in dec.to_v({x: 1}).items()})
        assert s.bracket_basis((x,)) == expect


def test_theorem_w2_with_brute_force(aff2):
    dec, D, s = aff2
    rep = verify_linfinity(s, 4)
    assert rep.ok and rep.jacobiators_vanish()
    assert sum(len(v) for v in rep.skipped.values()) > 0
    brute = verify_linfinity(s, 4, brute_force=True)
    assert brute.ok and not brute.skipped


def test_graded_symmetry_of_evaluator(aff2):
    dec, D, s = aff2
    par = s.space.parities
    for k in range(1, 4):
        for t in itertools.combinations_with_replacement(range(s.space.dim), k):
            base = s.bracket_basis(t)
            for sigma in itertools.permutations(range(k)):
                moved = tuple(t[i] for i in sigma)
                sign = koszul_sign(sigma, [par[i] for i in t])
                assert s.bracket_basis(moved) == {i: sign * c for i, c in base.items()}


def test_leibniz_and_negative_control(aff2):
    dec, D, s = aff2
    assert check_binary_leibniz(s) == []
    assert check_binary_leibniz(FlippedPair(dec, D, 3))
    assert not verify_linfinity(FlippedPair(dec, D, 3), 3).ok


def test_unary_matches_shifted_cocylinder(aff2):
    dec, D, s = aff2
    um = s.unary_map()
    assert GradedLinearMap.__matmul__(um, um).is_zero()
    assert um.to_dense() == small_cocylinder(dec, D).shifted.d.to_dense()


def test_fiber_and_ideal(aff2):
    dec, D, s = aff2
    assert homotopy_fiber_structure(s, 4) == derived_bracket_family(dec, D, 4)
    assert check_v_ideal(s, 3) == []


def test_end2_theorem():
    alg, dec, X, D = end2_homological()
    s = build_extended_brackets(dec, D, 3)
    assert verify_linfinity(s, 3, brute_force=True).ok
    assert check_binary_leibniz(s) == []
    assert homotopy_fiber_structure(s, 3) == derived_bracket_family(dec, D, 3)


def test_zero_d():
    alg, dec = gen_wn(2)
    D = Derivation(alg, GradedLinearMap.zero(alg.space, alg.space, 1))
    s = build_extended_brackets(dec, D, 3)
    fib = homotopy_fiber_structure(s, 3)
    assert fib.is_zero()
    assert check_binary_leibniz(s) == []
    assert verify_linfinity(s, 3).ok


def test_refuses_non_homological():
    alg, dec, Q, D = ce_derivation("broken3")
    with pytest.raises(PreconditionError):
        build_extended_brackets(dec, D, 3)
