"""JSON file formats: workspace files and exports of bracket tables, fields and complexes.

Rationals are always strings ("p/q" or "n"), indices are 0-based.  Dumps are
canonical: fixed key order, named maps sorted by name, two-space indent and a
trailing newline, so ``dumps(loads(text)) == text`` for canonical text.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .brackets import SymmetricBracketFamily
from .errors import ArgumentError
from .graded import GradedLinearMap, GradedSpace, Vector, format_rational, parse_rational
from .homotopy import Complex
from .superalgebra import Decomposition, Derivation, LieSuperalgebra
from .vector_fields import FormalVectorField

FORMAT_VERSION = "superbrackets-workspace/1"


class FormatError(ArgumentError):
    """Malformed input; ``line`` and ``col`` are 1-based when known."""

    def __init__(self, message: str, path: str = "", line: int | None = None, col: int | None = None):
        self.path = path
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        at = f" ({path})" if path else ""
        super().__init__(f"{message}{at}{where}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _locate(text: str | None, literal: str):
    if text is None:
        return None, None
    needle = json.dumps(literal, ensure_ascii=False)
    pos = text.find(needle)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Reader:
    """Typed field access with JSON-path error messages."""

    def __init__(self, text: str | None):
        self.text = text

    def fail(self, msg, path, literal=None):
        line, col = _locate(self.text, literal) if isinstance(literal, str) else (None, None)
        raise FormatError(msg, path, line, col)

    def get(self, obj, key, path, kind=None, default=...):
        if not isinstance(obj, dict):
            self.fail("expected an object", path)
        if key not in obj:
            if default is not ...:
                return default
            self.fail(f"missing field '{key}'", path)
        val = obj[key]
        if kind is not None and not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
            self.fail(f"field '{key}' has the wrong type", f"{path}.{key}")
        return val

    def rational(self, value, path) -> Fraction:
        if not isinstance(value, str):
            self.fail("rationals must be strings", path)
        try:
            return parse_rational(value)
        except (ValueError, ZeroDivisionError) as exc:
            self.fail(str(exc), path, value)

    def index(self, value, bound, path) -> int:
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < bound:
            self.fail(f"index {value!r} out of range 0..{bound - 1}", path)
        return value

    def parity(self, value, path) -> int:
        if value not in (0, 1) or isinstance(value, bool):
            self.fail("parity must be 0 or 1", path)
        return value


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", "", exc.lineno, exc.colno) from None


# ---------------------------------------------------------------------------
# pieces


def basis_to_json(space: GradedSpace) -> list:
    return [{"name": n, "parity": p} for n, p in zip(space.names, space.parities)]


def _basis_from_json(r: _Reader, data, path) -> GradedSpace:
    if not isinstance(data, list):
        r.fail("basis must be a list", path)
    names, parities = [], []
    for n, item in enumerate(data):
        p = f"{path}[{n}]"
        names.append(r.get(item, "name", p, str))
        parities.append(r.parity(r.get(item, "parity", p), f"{p}.parity"))
    if len(set(names)) != len(names):
        r.fail("basis names must be unique", path)
    return GradedSpace(tuple(names), tuple(parities))


def map_entries_to_json(m: GradedLinearMap) -> list:
    return [{"row": row, "col": col, "value": format_rational(c)} for row, col, c in m.entries()]


def _map_from_json(r: _Reader, data, source, target, parity, path) -> GradedLinearMap:
    if not isinstance(data, list):
        r.fail("entries must be a list", path)
    triples = []
    for n, e in enumerate(data):
        p = f"{path}[{n}]"
        row = r.index(r.get(e, "row", p), target.dim, f"{p}.row")
        col = r.index(r.get(e, "col", p), source.dim, f"{p}.col")
        val = r.rational(r.get(e, "value", p), f"{p}.value")
        if val and target.parities[row] != (source.parities[col] + parity) % 2:
            r.fail(f"entry ({row}, {col}) breaks parity {parity}", p)
        triples.append((row, col, val))
    return GradedLinearMap.from_entries(source, target, parity, triples)


def vector_to_json(v: Vector) -> list:
    return [{"index": i, "value": format_rational(c)} for i, c in sorted(v.coeffs.items())]


def _vector_from_json(r: _Reader, data, space, path) -> Vector:
    if not isinstance(data, list):
        r.fail("a vector is a list of {index, value}", path)
    coeffs: dict = {}
    for n, e in enumerate(data):
        p = f"{path}[{n}]"
        i = r.index(r.get(e, "index", p), space.dim, f"{p}.index")
        coeffs[i] = coeffs.get(i, 0) + r.rational(r.get(e, "value", p), f"{p}.value")
    return Vector(space, coeffs)


def complex_to_json(c: Complex) -> dict:
    return {"format": "complex", "basis": basis_to_json(c.space), "differential": map_entries_to_json(c.d)}


def _complex_from_json(r: _Reader, data, path) -> Complex:
    sp = _basis_from_json(r, r.get(data, "basis", path), f"{path}.basis")
    d = _map_from_json(r, r.get(data, "differential", path), sp, sp, 1, f"{path}.differential")
    try:
        return Complex(sp, d)
    except ArgumentError as exc:
        r.fail(str(exc), path)


# ---------------------------------------------------------------------------
# workspace


@dataclass
class Workspace:
    algebra: LieSuperalgebra
    decomposition: Decomposition | None = None
    derivations: dict = field(default_factory=dict)
    elements: dict = field(default_factory=dict)
    complexes: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


def workspace_to_json(ws: Workspace) -> dict:
    alg = ws.algebra
    dec = ws.decomposition
    return {
        "version": FORMAT_VERSION,
        "basis": basis_to_json(alg.space),
        "brackets": [{"i": i, "j": j, "k": k, "value": format_rational(c)} for i, j, k, c in alg.upper_entries()],
        "decomposition": None if dec is None else {
            "k": list(dec.k_indices), "v": list(dec.v_indices), "abelian": dec.abelian},
        "derivations": {name: {"parity": D.parity, "entries": map_entries_to_json(D.map)}
                        for name, D in sorted(ws.derivations.items())},
        "elements": {name: vector_to_json(v) for name, v in sorted(ws.elements.items())},
        "complexes": {name: complex_to_json(c) for name, c in sorted(ws.complexes.items())},
        "options": {k: ws.options[k] for k in sorted(ws.options)},
    }


def dump_workspace(ws: Workspace) -> str:
    return dumps(workspace_to_json(ws))


def workspace_from_json(data, text: str | None = None) -> Workspace:
    r = _Reader(text)
    version = r.get(data, "version", "$", str)
    if version != FORMAT_VERSION:
        r.fail(f"unsupported version {version!r}", "$.version", version)
    space = _basis_from_json(r, r.get(data, "basis", "$", list), "$.basis")
    entries = []
    for n, e in enumerate(r.get(data, "brackets", "$", list)):
        p = f"$.brackets[{n}]"
        i = r.index(r.get(e, "i", p), space.dim, f"{p}.i")
        j = r.index(r.get(e, "j", p), space.dim, f"{p}.j")
        k = r.index(r.get(e, "k", p), space.dim, f"{p}.k")
        val = r.rational(r.get(e, "value", p), f"{p}.value")
        if val and space.parities[k] != (space.parities[i] + space.parities[j]) % 2:
            r.fail(f"bracket entry ({i}, {j}) -> {k} breaks parity", p)
        entries.append((i, j, k, val))
    algebra = LieSuperalgebra.from_brackets(space, entries)

    dec = None
    dd = r.get(data, "decomposition", "$", default=None)
    if dd is not None:
        ks = r.get(dd, "k", "$.decomposition", list)
        vs = r.get(dd, "v", "$.decomposition", list)
        for n, i in enumerate(ks):
            r.index(i, space.dim, f"$.decomposition.k[{n}]")
        for n, i in enumerate(vs):
            r.index(i, space.dim, f"$.decomposition.v[{n}]")
        abelian = r.get(dd, "abelian", "$.decomposition", bool, default=True)
        try:
            dec = Decomposition(algebra, ks, vs, abelian=abelian)
        except ArgumentError as exc:
            r.fail(str(exc), "$.decomposition")

    derivations = {}
    for name, dv in sorted(r.get(data, "derivations", "$", dict, default={}).items()):
        p = f"$.derivations.{name}"
        parity = r.parity(r.get(dv, "parity", p), f"{p}.parity")
        m = _map_from_json(r, r.get(dv, "entries", p), space, space, parity, f"{p}.entries")
        derivations[name] = Derivation(algebra, m)

    elements = {name: _vector_from_json(r, ev, space, f"$.elements.{name}")
                for name, ev in sorted(r.get(data, "elements", "$", dict, default={}).items())}
    complexes = {name: _complex_from_json(r, cv, f"$.complexes.{name}")
                 for name, cv in sorted(r.get(data, "complexes", "$", dict, default={}).items())}
    options = r.get(data, "options", "$", dict, default={})
    return Workspace(algebra, dec, derivations, elements, complexes, dict(options))


def load_workspace(text: str) -> Workspace:
    return workspace_from_json(_load_json(text), text)


# ---------------------------------------------------------------------------
# exports


def family_to_json(fam: SymmetricBracketFamily) -> dict:
    arities = []
    for k in range(1, fam.max_arity + 1):
        rows = [{"args": list(t), "value": vector_to_json(Vector(fam.space, v))}
                for t, v in sorted(fam.tables.get(k, {}).items()) if v]
        arities.append({"arity": k, "entries": rows})
    return {
        "format": "bracket-table",
        "basis": basis_to_json(fam.space),
        "parity": fam.parity,
        "max_arity": fam.max_arity,
        "vanishes_above": fam.vanishes_above,
        "zero_bracket": vector_to_json(Vector(fam.space, fam.zero_bracket)),
        "arities": arities,
    }


def family_from_json(data, text: str | None = None) -> SymmetricBracketFamily:
    r = _Reader(text)
    sp = _basis_from_json(r, r.get(data, "basis", "$", list), "$.basis")
    parity = r.parity(r.get(data, "parity", "$"), "$.parity")
    max_arity = r.get(data, "max_arity", "$", int)
    tables: dict = {k: {} for k in range(1, max_arity + 1)}
    for n, block in enumerate(r.get(data, "arities", "$", list)):
        p = f"$.arities[{n}]"
        k = r.get(block, "arity", p, int)
        if k not in tables:
            r.fail(f"arity {k} outside 1..{max_arity}", p)
        for m, e in enumerate(r.get(block, "entries", p, list)):
            q = f"{p}.entries[{m}]"
            args = tuple(r.index(i, sp.dim, f"{q}.args") for i in r.get(e, "args", q, list))
            if len(args) != k:
                r.fail("argument tuple has the wrong length", q)
            tables[k][args] = _vector_from_json(r, r.get(e, "value", q), sp, f"{q}.value").coeffs
    zero = _vector_from_json(r, r.get(data, "zero_bracket", "$", list), sp, "$.zero_bracket").coeffs
    try:
        return SymmetricBracketFamily(sp, parity, tables, max_arity, zero,
                                      vanishes_above=r.get(data, "vanishes_above", "$", bool, default=False))
    except ArgumentError as exc:
        r.fail(str(exc), "$")


def field_to_json(X: FormalVectorField) -> dict:
    return {
        "format": "vector-field",
        "basis": basis_to_json(X.space),
        "parity": X.parity,
        "degree_cap": X.degree_cap,
        "truncated": X.truncated,
        "exact_through": X.exact_through,
        "terms": [{"j": j, "lower": list(m), "value": format_rational(c)}
                  for (j, m), c in sorted(X.coefficients.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], kv[0][0]))],
    }


def field_from_json(data, text: str | None = None) -> FormalVectorField:
    r = _Reader(text)
    sp = _basis_from_json(r, r.get(data, "basis", "$", list), "$.basis")
    parity = r.parity(r.get(data, "parity", "$"), "$.parity")
    cap = r.get(data, "degree_cap", "$", int)
    coeffs = {}
    for n, t in enumerate(r.get(data, "terms", "$", list)):
        p = f"$.terms[{n}]"
        j = r.index(r.get(t, "j", p), sp.dim, f"{p}.j")
        m = tuple(r.index(i, sp.dim, f"{p}.lower") for i in r.get(t, "lower", p, list))
        coeffs[(j, m)] = r.rational(r.get(t, "value", p), f"{p}.value")
    try:
        return FormalVectorField(sp, parity, cap, coeffs,
                                 truncated=r.get(data, "truncated", "$", bool, default=False),
                                 exact_through=r.get(data, "exact_through", "$", int, default=None))
    except ArgumentError as exc:
        r.fail(str(exc), "$")


def complex_from_json(data, text: str | None = None) -> Complex:
    return _complex_from_json(_Reader(text), data, "$")


def load_export(text: str) -> Any:
    """Parse any export document, dispatching on its ``format`` field."""
    data = _load_json(text)
    kind = data.get("format") if isinstance(data, dict) else None
    if kind == "bracket-table":
        return family_from_json(data, text)
    if kind == "vector-field":
        return field_from_json(data, text)
    if kind == "complex":
        return complex_from_json(data, text)
    raise FormatError(f"unknown export format {kind!r}", "$.format")
