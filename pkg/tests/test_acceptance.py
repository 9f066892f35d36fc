"""One test per acceptance criterion; each records a PASS/FAIL line.

The lines are printed as the tests run and again in the terminal summary
(see conftest.py), so they appear in captured logs too.
"""
import itertools
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

from conftest import ce_derivation, end2_homological
from superbrackets.brackets import (
    check_transposition_identity,
    derivation_order,
    derived_bracket,
    derived_bracket_family,
    verify_main_theorem,
)
from superbrackets.graded import GradedLinearMap, GradedSpace, canonical_tuples, koszul_sign
from superbrackets.homotopy import (
    ChainMap,
    Complex,
    check_cone_cocone_duality,
    cocone,
    cocylinder,
    cone,
    cylinder,
    homology,
    induced_homology_map,
    is_quasi_iso,
    small_cocylinder,
    validate_chain_map,
)
from superbrackets.io import (
    complex_to_json,
    dump_workspace,
    dumps,
    family_to_json,
    field_to_json,
    load_export,
    load_workspace,
)
from superbrackets.linfinity import build_extended_brackets, verify_theorem
from superbrackets.sampling import random_chain_map, random_complex
from superbrackets.superalgebra import (
    CE_PRESETS,
    Decomposition,
    Derivation,
    LieSuperalgebra,
    check_preserves_k,
    complete_constants,
    derivation_commutator,
    derivation_space,
    gen_end_grassmann,
    gen_wn,
    inner_derivation,
    koszul_delta,
    validate_decomposition,
    validate_derivation,
    validate_lie_superalgebra,
)
from superbrackets.vector_fields import field_square, qd, verify_homomorphism

RESULTS = {}


def record(n, ok, title, detail=""):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    RESULTS[n] = line
    print(line)
    return ok


def _combo(rng, basis, alg, parity, bound=2):
    m = GradedLinearMap.zero(alg.space, alg.space, parity)
    for b in basis:
        c = Fraction(rng.randint(-bound, bound), rng.randint(1, 2))
        if c:
            m = m + b.map.scaled(c)
    return Derivation(alg, m)


# ---------------------------------------------------------------------------


def test_c01_jacobiator_identity_w3():
    start = time.time()
    counts = {}
    ok = True
    for preset, should_vanish in (("so3", True), ("broken3", False)):
        alg, dec, Q, D = ce_derivation(preset)
        assert alg.dim == 24
        rep = verify_main_theorem(dec, D, 4)
        counts[preset] = sum(c["checked"] for c in rep.counts().values())
        ok &= rep.ok
        ok &= rep.jacobiators_vanish() == should_vanish
    elapsed = time.time() - start
    ok &= elapsed < 60
    assert record(1, ok, "J^n_D = {..}_{D^2} on W(3), n <= 4; Jacobiators vanish for so3 only",
                  f"{counts['so3']} + {counts['broken3']} tuples, {elapsed:.1f}s")


def test_c02_ce_constants():
    ok = True
    for preset in ("so3", "aff2", "heis3", "broken3"):
        entries = complete_constants(CE_PRESETS[preset])
        alg, dec, Q, D = ce_derivation(preset, 3)
        consts = {}
        for i, j, k, c in entries:
            consts.setdefault((i, j), {})[k] = c
        fam = derived_bracket_family(dec, D, 4)
        for i in range(3):
            for j in range(3):
                args = [alg.space.basis_vector(dec.v_indices[x]) for x in (i, j)]
                ok &= dec.to_v(derived_bracket(dec, D, args).coeffs) == consts.get((i, j), {})
        ok &= fam.nonzero_arities() == [2]
    assert record(2, ok, "binary derived bracket of the CE field = +c_ij^k; other arities vanish")


def test_c03_koszul_operator_end3():
    start = time.time()
    alg, dec, emb = gen_end_grassmann(3)
    D = inner_derivation(alg, koszul_delta(3))
    ok = derivation_order(dec, D, 5) == 3
    fam = derived_bracket_family(dec, D, 4)
    ok &= fam.tables[4] == {} and fam.nonzero_arities() == [1, 2, 3]
    top = derived_bracket(dec, D, [alg.space.basis_vector(emb[(i,)]) for i in range(3)])
    ok &= list(top.coeffs) == [emb[()]] and all(c != 0 for c in top.coeffs.values())
    rep = verify_main_theorem(dec, D, 4)
    ok &= rep.ok and rep.jacobiators_vanish()
    elapsed = time.time() - start
    ok &= elapsed < 30
    assert record(3, ok, "End Λ3 with Δ = ∂1∂2∂3: order 3, constant top bracket, Jacobiators vanish",
                  f"{elapsed:.1f}s")


def test_c04_small_cocylinder_w2():
    alg, dec, Q, D = ce_derivation("aff2", 2)
    sc = small_cocylinder(dec, D)
    d = sc.complex.d
    ok = (d @ d).is_zero()
    for name in ("j", "p", "q", "i"):
        f = getattr(sc, name)
        ok &= validate_chain_map(f.source, f.target, f.map).ok
    ok &= (sc.p @ sc.j).map.to_dense() == sc.i.map.to_dense()
    kdim = sc.k.space.dim
    ok &= (sc.q @ sc.j).map.to_dense() == [[Fraction(int(a == b)) for b in range(kdim)] for a in range(kdim)]
    ind = induced_homology_map(sc.j)
    ok &= ind.is_iso and sum(homology(sc.complex).dims) > 0
    assert record(4, ok, "W(2): L ⊕ ΠV is a complex, j p q chain maps, pj = i, qj = 1, H(j) invertible")


def test_c05_extended_brackets():
    start = time.time()
    ok = True
    alg, dec, Q, D = ce_derivation("aff2", 2)
    _, dec2, _, D2 = end2_homological()
    for d, dd in ((dec, D), (dec2, D2)):
        s = build_extended_brackets(d, dd, 4)
        rep = verify_theorem(s, 4, brute_force=True)
        ok &= rep.ok and not rep.skipped and rep.jacobiators_vanish()
    elapsed = time.time() - start
    ok &= elapsed < 300
    assert record(5, ok, "ΠL ⊕ V brackets on W(2) and End Λ2: Jacobiators n <= 4 vanish, brute force",
                  f"{elapsed:.1f}s")


def test_c06_appendix_constructions():
    rng = random.Random(20260601)
    ok = True
    for _ in range(20):
        X = random_complex(rng, rng.randint(0, 3), rng.randint(0, 3), "x")
        Y = random_complex(rng, rng.randint(0, 3), rng.randint(0, 3), "y")
        f = random_chain_map(rng, X, Y)
        cyl, cc = cylinder(f), cocylinder(f)
        for c in (cyl.complex, cone(f), cc.complex, cocone(f)):
            ok &= (c.d @ c.d).is_zero()
        ok &= is_quasi_iso(cyl.p) and is_quasi_iso(cc.j)
        ok &= check_cone_cocone_duality(f)
    assert record(6, ok, "20 random chain maps: Cyl, Cone, Cocyl, Cocone are complexes; ΠCone f = Cocone(-f)")


def test_c07_homomorphism_w3():
    rng = random.Random(77)
    alg, dec = gen_wn(3)
    spaces = {p: derivation_space(alg, p, dec) for p in (0, 1)}
    ok = True
    for _ in range(10):
        p1, p2 = rng.randint(0, 1), rng.randint(0, 1)
        D1 = _combo(rng, spaces[p1], alg, p1)
        D2 = _combo(rng, spaces[p2], alg, p2)
        ok &= check_preserves_k(D1, dec) and check_preserves_k(D2, dec)
        rep = verify_homomorphism(dec, D1, D2, 4)
        ok &= rep.ok and rep.exact_through >= 3
    for _ in range(3):
        D = _combo(rng, spaces[1], alg, 1)
        ok &= field_square(qd(dec, D, 4)) == qd(dec, Derivation(alg, D.map @ D.map), 4)
    assert record(7, ok, "W(3): [Q_D1, Q_D2] = Q_[D1,D2] through degree 4; (Q_D)^2 = Q_{D^2}")


def _w2_enlarged():
    alg, dec = gen_wn(2)
    names = alg.space.names
    quad = [i for i, n in enumerate(names) if n.startswith("x1x2")]
    rest = [i for i in range(alg.dim) if i not in quad]
    return alg, Decomposition(alg, quad, rest, abelian=False)


def test_c08_transposition_identity():
    rng = random.Random(88)
    alg, big = _w2_enlarged()
    rep = validate_decomposition(big, require_abelian=False)
    ok = rep.ok and not validate_decomposition(big, require_abelian=True).ok
    whole = Decomposition(alg, [], range(alg.dim), abelian=False)
    _, _, _, Dce = ce_derivation("aff2", 2)
    derivs = [Dce] + [_combo(rng, derivation_space(alg, p), alg, p) for p in (0, 1)]
    checked = 0
    for dec in (whole, big):
        vi = dec.v_indices
        for D in derivs:
            for k in (2, 3, 4):
                tuples = itertools.product(vi, repeat=k) if k < 4 else (
                    tuple(rng.choice(vi) for _ in range(4)) for _ in range(150))
                for t in tuples:
                    args = [alg.space.basis_vector(i) for i in t]
                    for i in range(k - 1):
                        ok &= not check_transposition_identity(dec, D, args, i).coeffs
                        checked += 1
    assert record(8, ok, "transposition identity with L = V and with non-abelian V in W(2), arities 2..4",
                  f"{checked} checks")


# ---------------------------------------------------------------------------
# randomized property suite


def _abelian_pool():
    pool = []
    alg, dec = gen_wn(2)
    pool.append(("W2", alg, dec))
    for m in (1, 2):
        alg, dec, _ = gen_end_grassmann(m)
        pool.append((f"End{m}", alg, dec))
    for preset, v in (("aff2", (0,)), ("heis3", (0, 2))):
        entries = complete_constants(CE_PRESETS[preset])
        n = 1 + max(max(i, j, k) for i, j, k, _ in entries)
        sp = GradedSpace(tuple(f"e{i}" for i in range(n)), (0,) * n)
        alg = LieSuperalgebra.from_brackets(sp, entries)
        pool.append((preset, alg, Decomposition(alg, [i for i in range(n) if i not in v], v)))
    return pool


def _distributivity_defects(dec):
    """P[a,b] - P[Pa,b] - P[a,Pb] on basis pairs, with P taken as a matrix."""
    alg = dec.algebra
    P = dec.projector()
    bad = []
    for a in range(alg.dim):
        for b in range(alg.dim):
            lhs = P.apply_coeffs(alg.bracket_basis(a, b))
            for x, y in ((P.columns[a], {b: 1}), ({a: 1}, P.columns[b])):
                for key, c in P.apply_coeffs(alg.bracket_coeffs(x, y)).items():
                    lhs[key] = lhs.get(key, 0) - c
            if any(lhs.values()):
                bad.append((a, b))
    return bad


def _closed(alg, idx, inside):
    return all(r in inside for a in idx for b in idx for r in alg.bracket_basis(a, b))


def _family_combination(f1, f2, c):
    out = {}
    for k in f1.tables:
        t = {key: dict(v) for key, v in f1.tables[k].items()}
        for key, v in f2.tables[k].items():
            row = t.setdefault(key, {})
            for i, x in v.items():
                row[i] = row.get(i, 0) + c * x
        out[k] = {key: {i: x for i, x in v.items() if x} for key, v in t.items()}
        out[k] = {key: v for key, v in out[k].items() if v}
    return out


def test_c09_randomized_properties():
    rng = random.Random(909)
    pool = _abelian_pool()
    spaces = {}
    ok = True
    cases = 0
    for case in range(200):
        name, alg, dec = pool[case % len(pool)]
        parity = rng.randint(0, 1)
        key = (name, parity)
        if key not in spaces:
            spaces[key] = derivation_space(alg, parity, dec)
        if not spaces[key]:
            parity ^= 1
            key = (name, parity)
            spaces.setdefault(key, derivation_space(alg, parity, dec))
        D1 = _combo(rng, spaces[key], alg, parity)
        D2 = _combo(rng, spaces[key], alg, parity)
        ok &= validate_lie_superalgebra(alg).ok and validate_decomposition(dec).ok
        ok &= validate_derivation(D1).ok and check_preserves_k(D1, dec)
        ok &= not _distributivity_defects(dec)
        arity = 3 if dec.v_space.dim > 2 else 4
        f1 = derived_bracket_family(dec, D1, arity)
        # exhaustive permutations on a few tuples of V
        vpar = dec.v_space.parities
        tuples = [t for k in range(2, arity + 1) for t in canonical_tuples(vpar, k)]
        for t in rng.sample(tuples, min(3, len(tuples))):
            base = f1.bracket_basis(t)
            for sigma in itertools.permutations(range(len(t))):
                moved = [dec.v_indices[t[s]] for s in sigma]
                direct = dec.to_v(derived_bracket(dec, D1, [alg.space.basis_vector(i) for i in moved]).coeffs)
                sign = koszul_sign(sigma, [vpar[i] for i in t])
                ok &= direct == {i: sign * c for i, c in base.items()}
        # linearity in D
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        comb = Derivation(alg, D1.map + D2.map.scaled(c))
        f2 = derived_bracket_family(dec, D2, arity)
        fc = derived_bracket_family(dec, comb, arity)
        ok &= _family_combination(f1, f2, c) == {k: fc.tables[k] for k in fc.tables}
        cases += 1
    # distributivity on every valid (closed, abelian V) splitting of W(2) and End Λ1
    splittings = 0
    for alg in (gen_wn(2)[0], gen_end_grassmann(1)[0]):
        for r in range(alg.dim + 1):
            for v in itertools.combinations(range(alg.dim), r):
                k = [i for i in range(alg.dim) if i not in v]
                if not (_closed(alg, k, set(k)) and _closed(alg, v, set())):
                    continue
                dec = Decomposition(alg, k, v)
                ok &= not _distributivity_defects(dec)
                splittings += 1
    assert record(9, ok and cases >= 200, "randomized (L, P, D): validations, symmetry, linearity, distributivity",
                  f"{cases} cases, {splittings} splittings")


# ---------------------------------------------------------------------------


def _cli(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    out = subprocess.run([sys.executable, "-m", "superbrackets.cli", *args],
                         capture_output=True, env=env, check=False)
    return out.returncode, out.stdout


def test_c10_determinism_and_round_trip(tmp_path):
    ok = True
    files = {}
    for name, argv in {"w2": ["wn", "--n", "2"], "e2": ["end-grassmann", "--m", "2"],
                       "so3": ["ce", "--preset", "so3"], "aff2": ["ce", "--preset", "aff2"]}.items():
        p = tmp_path / f"{name}.json"
        code, _ = _cli(["gen", *argv, "-o", str(p)], 0)
        ok &= code == 0
        text = p.read_text()
        ok &= dump_workspace(load_workspace(text)) == text
        files[name] = str(p)
    commands = [["validate", files["w2"]], ["jacobi", files["so3"]], ["brackets", files["e2"]],
                ["homology", files["aff2"]], ["vfield", files["aff2"]], ["cocylinder", files["aff2"]],
                ["jacobi", files["so3"], "--format", "text"]]
    for cmd in commands:
        a, b = _cli(cmd, 1), _cli(cmd, 2)
        ok &= a == b and a[0] == 0
    alg, dec, Q, D = ce_derivation("so3")
    fam = derived_bracket_family(dec, D, 3)
    F = qd(dec, D, 3)
    c = cocone(ChainMap.identity(random_complex(random.Random(3), 2, 2)))
    for obj, enc in ((fam, family_to_json), (F, field_to_json), (c, complex_to_json)):
        text = dumps(enc(obj))
        back = load_export(text)
        ok &= back == obj and dumps(enc(back)) == text
    assert record(10, ok, "CLI reports byte-identical across processes; all formats round-trip")
