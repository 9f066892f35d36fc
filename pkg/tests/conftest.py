import random
import sys

import pytest

from superbrackets.superalgebra import (
    CE_PRESETS,
    complete_constants,
    gen_ce_field,
    gen_end_grassmann,
    gen_wn,
    inner_derivation,
)
from superbrackets import grassmann as g
from superbrackets.superalgebra import end_element


def ce_derivation(preset, n=None):
    entries = complete_constants(CE_PRESETS[preset])
    n = n or 1 + max(max(i, j, k) for i, j, k, _ in entries)
    alg, dec = gen_wn(n)
    Q = gen_ce_field(entries, n)
    return alg, dec, Q, inner_derivation(alg, Q)


def end2_homological():
    """End Λ2 with D = ad(ξ1∂1∂2 + ∂2); the operator squares to zero."""
    alg, dec, _ = gen_end_grassmann(2)
    op = g.add(g.compose(g.mult_op(2, (0,)), g.compose(g.deriv_op(2, 0), g.deriv_op(2, 1))), g.deriv_op(2, 1))
    X = end_element(2, op)
    return alg, dec, X, inner_derivation(alg, X)


@pytest.fixture
def rng():
    return random.Random(20241016)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
