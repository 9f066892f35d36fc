import itertools
import random
from fractions import Fraction

import pytest

from conftest import ce_derivation, end2_homological
from superbrackets import grassmann as g
from superbrackets.brackets import (
    SymmetricBracketFamily,
    check_transposition_identity,
    derivation_order,
    derived_bracket,
    derived_bracket_family,
    jacobiator,
    jacobiator_basis,
    verify_linfinity,
    verify_main_theorem,
)
from superbrackets.errors import ArgumentError, PreconditionError
from superbrackets.graded import GradedSpace, koszul_sign
from superbrackets.sampling import random_derivation
from superbrackets.superalgebra import (
    CE_PRESETS,
    Decomposition,
    Derivation,
    complete_constants,
    gen_ce_field,
    gen_end_grassmann,
    gen_wn,
    inner_derivation,
    koszul_delta,
    random_element,
    wn_field_op,
    wn_terms,
)


def field_op(n, x):
    op = g.zero_op(n)
    for (mono, i), c in wn_terms(n, x).items():
        op = g.add(op, wn_field_op(n, mono, i), c)
    return op


def constant_part(n, op):
    """Components at 0 of the field represented by op: op(ξ^k) evaluated at ξ = 0."""
    idx = g.monomial_index(n)
    out = {}
    for k in range(n):
        col = [Fraction(int(m == (k,))) for m in g.monomials(n)]
        v = g.apply(op, col)[idx[()]]
        if v:
            out[k] = v
    return out


@pytest.mark.parametrize("preset", ["so3", "broken3", "heis3"])
def test_binary_bracket_of_ce_field_reproduces_constants(preset):
    entries = complete_constants(CE_PRESETS[preset])
    alg, dec, Q, D = ce_derivation(preset)
    Qop = field_op(3, Q)
    consts = {}
    for i, j, k, c in entries:
        consts.setdefault((i, j), {})[k] = c
    for i in range(3):
        for j in range(3):
            ei, ej = alg.space.basis_vector(dec.v_indices[i]), alg.space.basis_vector(dec.v_indices[j])
            val = dec.to_v(derived_bracket(dec, D, [ei, ej]).coeffs)
            # oracle: [[Q, ∂_i], ∂_j](0) by operator composition on Λ_3
            op = g.supercommutator(g.supercommutator(Qop, g.deriv_op(3, i), 1, 1), g.deriv_op(3, j), 0, 1)
            assert val == constant_part(3, op)
            assert val == consts.get((i, j), {})


def test_quadratic_field_has_only_binary_brackets():
    alg, dec, Q, D = ce_derivation("so3")
    fam = derived_bracket_family(dec, D, 3)
    assert fam.nonzero_arities() == [2]
    assert derivation_order(dec, D, 4) == 2


def test_end3_order_and_top_bracket():
    alg, dec, emb = gen_end_grassmann(3)
    D = inner_derivation(alg, koszul_delta(3))
    assert derivation_order(dec, D, 5) == 3
    fam = derived_bracket_family(dec, D, 4)
    assert fam.nonzero_arities() == [1, 2, 3]
    assert fam.tables[4] == {}
    x = [alg.space.basis_vector(emb[(i,)]) for i in range(3)]
    top = derived_bracket(dec, D, x)
    assert list(top.coeffs) == [emb[()]]
    x12 = alg.space.basis_vector(emb[(0, 1)])
    assert derived_bracket(dec, D, [x12, x[2]]) == top


def test_derivation_order_none_when_above_probe():
    alg, dec, emb = gen_end_grassmann(3)
    D = inner_derivation(alg, koszul_delta(3))
    assert derivation_order(dec, D, 2) is None


def _perm_check(dec, D, args_idx):
    alg = dec.algebra
    par = alg.parities
    base = derived_bracket(dec, D, [alg.space.basis_vector(i) for i in args_idx])
    for sigma in itertools.permutations(range(len(args_idx))):
        moved = [args_idx[s] for s in sigma]
        val = derived_bracket(dec, D, [alg.space.basis_vector(i) for i in moved])
        assert val == base * koszul_sign(sigma, [par[i] for i in args_idx])


def test_graded_symmetry_exhaustive_end2():
    alg, dec, X, D = end2_homological()
    V = dec.v_indices
    for k in range(2, 5):
        for t in itertools.combinations_with_replacement(V, k):
            _perm_check(dec, D, t)


def test_family_is_linear_in_d():
    rng = random.Random(4)
    alg, dec = gen_wn(2)
    for _ in range(5):
        D1 = random_derivation(rng, dec, 1)
        D2 = random_derivation(rng, dec, 1)
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        comb = Derivation(alg, D1.map + D2.map.scaled(c))
        f1, f2 = derived_bracket_family(dec, D1, 3), derived_bracket_family(dec, D2, 3)
        fc = derived_bracket_family(dec, comb, 3)
        for k in (1, 2, 3):
            for t in set(f1.tables[k]) | set(f2.tables[k]) | set(fc.tables[k]):
                expect = dict(f1.tables[k].get(t, {}))
                for i, v in f2.tables[k].get(t, {}).items():
                    expect[i] = expect.get(i, 0) + c * v
                assert {i: v for i, v in expect.items() if v} == fc.tables[k].get(t, {})


def test_main_theorem_random_odd_derivations_w2():
    rng = random.Random(8)
    alg, dec = gen_wn(2)
    for _ in range(6):
        D = random_derivation(rng, dec, 1)
        rep = verify_main_theorem(dec, D, 4)
        assert rep.ok, rep.first_failure()


def test_main_theorem_broken_constants_nonzero_jacobiators():
    alg, dec, Q, D = ce_derivation("broken3")
    rep = verify_main_theorem(dec, D, 3)
    assert rep.ok
    assert not rep.jacobiators_vanish()
    assert rep.nonzero_jacobiator_arities() == [3]


def test_preconditions():
    alg, dec, Q, D = ce_derivation("so3")
    v = alg.space.basis_vector(dec.v_indices[0])
    k = alg.space.basis_vector(dec.k_indices[0])
    with pytest.raises(ArgumentError):
        derived_bracket(dec, D, [])
    with pytest.raises(ArgumentError):
        derived_bracket(dec, D, [v, k])
    even = inner_derivation(alg, random_element(alg, random.Random(1), 0, dec.k_indices))
    with pytest.raises(PreconditionError):
        verify_main_theorem(dec, even, 2)
    # ad of a constant field moves K into V
    with pytest.raises(PreconditionError):
        verify_main_theorem(dec, inner_derivation(alg, v), 2)
    bigger = Decomposition(alg, dec.k_indices[3:], dec.v_indices + dec.k_indices[:3], abelian=False)
    with pytest.raises(PreconditionError):
        derived_bracket_family(bigger, D, 2)


def test_transposition_identity_non_abelian():
    rng = random.Random(2)
    alg, dec = gen_wn(2)
    whole = Decomposition(alg, [], range(alg.dim), abelian=False)
    for _ in range(4):
        D = random_derivation(rng, dec, rng.randint(0, 1), preserve_k=False)
        for k in (2, 3):
            args = [alg.space.basis_vector(rng.randrange(alg.dim)) for _ in range(k)]
            for i in range(k - 1):
                assert not check_transposition_identity(whole, D, args, i)


def test_family_bracket_rules():
    sp = GradedSpace(("a", "b"), (0, 1))
    fam = SymmetricBracketFamily(sp, 1, {1: {}, 2: {(0, 1): {1: Fraction(1)}}}, 2)
    assert fam.bracket_basis((1, 0)) == {1: 1}
    assert fam.bracket_basis((1, 1)) == {}
    with pytest.raises(ArgumentError):
        fam.bracket_basis((0, 0, 0))
    assert verify_linfinity(fam, 2).ok


def test_jacobiator_multilinear_matches_basis():
    alg, dec, X, D = end2_homological()
    fam = derived_bracket_family(dec, D, 3)
    V = dec.v_space
    rng = random.Random(6)
    for _ in range(5):
        args = [V.vector({i: rng.randint(-2, 2) for i in range(V.dim) if V.parities[i] == p})
                for p in (rng.randint(0, 1) for _ in range(3))]
        expect = {}
        for combo in itertools.product(*[a.coeffs.items() for a in args]):
            c = 1
            for _, x in combo:
                c *= x
            for k, v in jacobiator_basis(fam, tuple(i for i, _ in combo)).items():
                expect[k] = expect.get(k, 0) + c * v
        assert jacobiator(fam, args).coeffs == {k: v for k, v in expect.items() if v}
