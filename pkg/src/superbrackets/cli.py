"""Command-line driver: generate workspace files, run validations and theorem suites.

Exit status: 0 all checks pass, 1 a mathematical defect was found, 2 bad
input or usage.  The text report is rendered from the JSON report.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .brackets import derived_bracket_family, jacobiator_basis, v_is_abelian, verify_main_theorem
from .errors import ArgumentError, PreconditionError
from .graded import GradedSpace, format_rational
from .homotopy import Complex, homology, induced_homology_map, small_cocylinder, square_witness
from .io import FormatError, Workspace, dump_workspace, dumps, family_to_json, field_to_json, load_workspace
from .linfinity import build_extended_brackets, check_binary_leibniz, fiber_matches_derived, verify_linfinity
from .superalgebra import (
    CE_PRESETS,
    Derivation,
    check_preserves_k,
    complete_constants,
    gen_ce_field,
    gen_end_grassmann,
    gen_wn,
    inner_derivation,
    koszul_delta,
    validate_decomposition,
    validate_derivation,
    validate_lie_superalgebra,
)
from .vector_fields import is_homological, qd, verify_homomorphism

MAX_ARITY = 6
MAX_CAP = 6
MAX_DIM = 64


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report helpers


def _vec(space: GradedSpace, coeffs: dict) -> dict:
    return {space.names[i]: format_rational(c) for i, c in sorted(coeffs.items())}


def _names(space, idx) -> list:
    return [space.names[i] for i in idx]


def jacobi_report_json(rep, with_values: bool = False) -> dict:
    sp = rep.space
    out = {
        "status": "pass" if rep.ok else "fail",
        "arities": {str(n): c for n, c in rep.counts().items()},
    }
    f = rep.first_failure()
    if f is not None:
        out["first_failure"] = {"args": _names(sp, f.args), "defect": _vec(sp, f.defect)}
    reasons = sorted({reason for skips in rep.skipped.values() for _, reason in skips})
    if reasons:
        out["skip_reasons"] = reasons
    if with_values:
        out["jacobiators_vanish"] = rep.jacobiators_vanish()
        out["nonzero_jacobiator_arities"] = rep.nonzero_jacobiator_arities()
    return out


def _violations_json(report) -> dict:
    out = {"status": "pass" if report.ok else "fail"}
    if not report.ok:
        out["violations"] = [_jsonable(v) for v in report.violations[:5]]
        out["violation_count"] = len(report.violations)
    return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(pad + _scalar_text(obj))
    return "\n".join(lines)


def _scalar_text(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def _overall(checks: list) -> str:
    return "pass" if all(c.get("status") in ("pass", "info") for c in checks) else "fail"


# ---------------------------------------------------------------------------
# loading


def _load(path: str) -> Workspace:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        ws = load_workspace(text)
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except ArgumentError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if ws.algebra.dim > MAX_DIM:
        raise UsageError(f"dim L = {ws.algebra.dim} exceeds the limit {MAX_DIM}")
    return ws


def _limit(value, bound, what):
    if value is None:
        return None
    if not 1 <= value <= bound:
        raise UsageError(f"{what} must be between 1 and {bound}, got {value}")
    return value


def _option(args, ws, name, default, bound):
    val = getattr(args, name)
    if val is None:
        val = ws.options.get(name, default)
    if not isinstance(val, int) or isinstance(val, bool):
        raise UsageError(f"option {name} must be an integer")
    return _limit(val, bound, name.replace("_", "-"))


def _need_dec(ws):
    if ws.decomposition is None:
        raise UsageError("the workspace has no decomposition")
    return ws.decomposition


def _selected(ws, name):
    if name is None:
        return sorted(ws.derivations.items())
    if name not in ws.derivations:
        raise UsageError(f"no derivation named {name!r}")
    return [(name, ws.derivations[name])]


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> dict:
    ws = _load(args.file)
    checks = [{"name": "lie-superalgebra", **_violations_json(validate_lie_superalgebra(ws.algebra))}]
    if ws.decomposition is not None:
        checks.append({"name": "decomposition", **_violations_json(validate_decomposition(ws.decomposition))})
    for name, D in sorted(ws.derivations.items()):
        checks.append({"name": f"derivation {name}", **_violations_json(validate_derivation(D))})
        if ws.decomposition is not None:
            keeps = check_preserves_k(D, ws.decomposition)
            checks.append({"name": f"derivation {name} preserves K", "status": "info", "value": keeps})
    for name, c in sorted(ws.complexes.items()):
        checks.append({"name": f"complex {name}", "status": "pass"})
    return {"command": "validate", "checks": checks}


def cmd_brackets(args) -> dict:
    ws = _load(args.file)
    dec = _need_dec(ws)
    k = _option(args, ws, "max_arity", 3, MAX_ARITY)
    out = []
    for name, D in _selected(ws, args.derivation):
        try:
            fam = derived_bracket_family(dec, D, k)
        except PreconditionError as exc:
            out.append({"derivation": name, "status": "refused", "reason": str(exc)})
            continue
        out.append({"derivation": name, "status": "pass", "nonzero_arities": fam.nonzero_arities(),
                    "table": family_to_json(fam)})
    return {"command": "brackets", "config": {"max_arity": k}, "checks": out}


def cmd_jacobi(args) -> dict:
    ws = _load(args.file)
    dec = _need_dec(ws)
    n = _option(args, ws, "max_n", 4, MAX_ARITY)
    out = []
    for name, D in _selected(ws, args.derivation):
        if D.parity != 1:
            out.append({"derivation": name, "status": "info", "reason": "even derivation: no Jacobiator identity"})
            continue
        try:
            rep = verify_main_theorem(dec, D, n)
        except PreconditionError as exc:
            out.append({"derivation": name, "status": "refused", "reason": str(exc)})
            continue
        out.append({"derivation": name, **jacobi_report_json(rep, with_values=True)})
    return {"command": "jacobi", "config": {"max_n": n}, "checks": out}


def _lemma_json(sc) -> dict:
    hk, hc = homology(sc.k), homology(sc.complex)
    ij = induced_homology_map(sc.j, hk, hc)
    iq = induced_homology_map(sc.q, hc, hk)
    pj = (sc.p @ sc.j).map.to_dense() == sc.i.map.to_dense()
    qj = (sc.q @ sc.j).map.to_dense() == [[Fraction(int(a == b)) for b in range(sc.k.space.dim)]
                                         for a in range(sc.k.space.dim)]
    j_mono = sc.j.map.rank() == sc.k.space.dim
    p_epi = sc.p.map.rank() == sc.l.space.dim
    ok = pj and qj and j_mono and p_epi and ij.is_iso and iq.is_iso
    return {"status": "pass" if ok else "fail", "homology_K": list(hk.dims), "homology_cocylinder": list(hc.dims),
            "p_after_j_is_i": pj, "q_after_j_is_id": qj, "j_mono": j_mono, "p_epi": p_epi,
            "j_quasi_iso": ij.is_iso, "q_quasi_iso": iq.is_iso}


def cmd_cocylinder(args) -> dict:
    ws = _load(args.file)
    dec = _need_dec(ws)
    n = _option(args, ws, "max_n", 3, MAX_ARITY)
    out = []
    for name, D in _selected(ws, args.derivation):
        if D.parity != 1:
            continue
        entry = {"derivation": name}
        try:
            sc = small_cocylinder(dec, D)
            s = build_extended_brackets(dec, D, n)
        except PreconditionError as exc:
            entry.update(status="refused", reason=str(exc))
            out.append(entry)
            continue
        lemma = _lemma_json(sc)
        theorem = jacobi_report_json(verify_linfinity(s, n, brute_force=args.brute_force))
        leib = check_binary_leibniz(s)
        unary = s.unary_map().to_dense() == sc.shifted.d.to_dense()
        fiber = fiber_matches_derived(s, n)
        ok = lemma["status"] == "pass" and theorem["status"] == "pass" and not leib and unary and fiber
        entry.update(status="pass" if ok else "fail", lemma=lemma, theorem=theorem,
                     leibniz_defects=[{"args": list(a), "defect": _jsonable(d)} for a, d in leib[:5]],
                     unary_matches_differential=unary, fiber_matches_derived=fiber)
        out.append(entry)
    return {"command": "cocylinder", "config": {"max_n": n, "brute_force": args.brute_force}, "checks": out}


def _homology_json(c: Complex) -> dict:
    h = homology(c)
    return {"status": "info", "dims": list(c.space.dims), "homology": [h.even, h.odd],
            "representatives": {"even": [_vec(c.space, v.coeffs) for v in h.representatives[0]],
                                "odd": [_vec(c.space, v.coeffs) for v in h.representatives[1]]}}


def cmd_homology(args) -> dict:
    ws = _load(args.file)
    out = []
    for name, c in sorted(ws.complexes.items()):
        out.append({"complex": name, **_homology_json(c)})
    for name, D in sorted(ws.derivations.items()):
        if D.parity == 1 and square_witness(D) is None:
            out.append({"complex": f"L with d = {name}", **_homology_json(Complex(ws.algebra.space, D.map))})
    return {"command": "homology", "checks": out}


def cmd_vfield(args) -> dict:
    ws = _load(args.file)
    dec = _need_dec(ws)
    cap = _option(args, ws, "degree_cap", 3, MAX_CAP)
    if not v_is_abelian(dec):
        raise UsageError("vector fields need an abelian V")
    keep = [(n, D) for n, D in sorted(ws.derivations.items()) if check_preserves_k(D, dec)]
    fields = []
    for name, D in keep:
        X = qd(dec, D, cap)
        entry = {"derivation": name, "status": "info", "field": field_to_json(X)}
        if X.parity == 1:
            flag, _ = is_homological(X)
            entry["homological"] = flag
        fields.append(entry)
    pairs = []
    for n1, D1 in keep:
        for n2, D2 in keep:
            rep = verify_homomorphism(dec, D1, D2, cap)
            item = {"pair": [n1, n2], "status": "pass" if rep.ok else "fail", "exact_through": rep.exact_through}
            if not rep.ok:
                item["defect"] = [{"j": j, "lower": list(m), "value": format_rational(c)}
                                  for (j, m), c in sorted(rep.defect.items())][:10]
            pairs.append(item)
    return {"command": "vfield", "config": {"degree_cap": cap}, "checks": fields + pairs}


def _constants(args, dim_hint=None):
    if args.constants is not None:
        try:
            raw = json.loads(args.constants)
            entries = [(int(i), int(j), int(k), Fraction(v)) for i, j, k, v in raw]
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise UsageError(f"--constants: expected a JSON list of [i, j, k, \"value\"]: {exc}") from None
    else:
        entries = CE_PRESETS[args.preset]
    try:
        return complete_constants(entries)
    except ValueError as exc:
        raise UsageError(f"--constants: {exc}") from None


def cmd_gen(args) -> Workspace:
    if args.kind == "wn":
        _limit(args.n, 5, "--n")
        alg, dec = gen_wn(args.n)
        return Workspace(alg, dec, options={"degree_cap": 3, "max_arity": 3, "max_n": 4})
    if args.kind == "end-grassmann":
        _limit(args.m, 3, "--m")
        alg, dec, _ = gen_end_grassmann(args.m)
        delta = koszul_delta(args.m)
        return Workspace(alg, dec, {"Delta": inner_derivation(alg, delta)}, {"Delta": delta},
                         options={"degree_cap": 3, "max_arity": args.m + 1, "max_n": args.m + 1})
    entries = _constants(args)
    n = 1 + max(max(i, j, k) for i, j, k, _ in entries)
    if args.n is not None:
        if args.n < n:
            raise UsageError(f"--n {args.n} is smaller than the constants need ({n})")
        n = args.n
    _limit(n, 5, "dimension of the Lie algebra")
    alg, dec = gen_wn(n)
    try:
        Q = gen_ce_field(entries, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return Workspace(alg, dec, {"D": inner_derivation(alg, Q)}, {"Q": Q},
                     options={"degree_cap": 3, "max_arity": 3, "max_n": 4})


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superbrackets", description="Higher derived brackets: exact checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, derivation=True):
        sp.add_argument("file")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--timings", action="store_true", help="add wall-clock timings (breaks byte-determinism)")
        if derivation:
            sp.add_argument("--derivation", help="restrict to one named derivation")

    common(sub.add_parser("validate", help="structural validations"), derivation=False)
    s = sub.add_parser("brackets", help="export the derived bracket tables")
    common(s)
    s.add_argument("--max-arity", dest="max_arity", type=int)
    s = sub.add_parser("jacobi", help="Jacobiators of derived brackets against brackets of D^2")
    common(s)
    s.add_argument("--max-n", dest="max_n", type=int)
    s = sub.add_parser("cocylinder", help="small cocylinder and the L-infinity structure on ΠL ⊕ V")
    common(s)
    s.add_argument("--max-n", dest="max_n", type=int)
    s.add_argument("--brute-force", action="store_true", help="also evaluate structurally vanishing Jacobiators")
    common(sub.add_parser("homology", help="homology of the stored complexes"), derivation=False)
    s = sub.add_parser("vfield", help="fields Q_D and the homomorphism check")
    common(s, derivation=False)
    s.add_argument("--cap", dest="degree_cap", type=int)

    g = sub.add_parser("gen", help="write a workspace file")
    g.add_argument("kind", choices=("wn", "end-grassmann", "ce"))
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--preset", choices=sorted(CE_PRESETS), default="so3")
    g.add_argument("--constants", help='JSON list of [i, j, k, "value"] with i < j')
    g.add_argument("-o", "--output")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "brackets": cmd_brackets,
    "jacobi": cmd_jacobi,
    "cocylinder": cmd_cocylinder,
    "homology": cmd_homology,
    "vfield": cmd_vfield,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "gen":
            if args.kind == "wn" and args.n is None:
                raise UsageError("gen wn needs --n")
            if args.kind == "end-grassmann" and args.m is None:
                raise UsageError("gen end-grassmann needs --m")
            text = dump_workspace(cmd_gen(args))
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                stdout.write(text)
            return 0
        t0 = time.perf_counter()
        report = COMMANDS[args.command](args)
        report["status"] = _overall(report["checks"])
        if args.timings:
            report["timings"] = {"seconds": round(time.perf_counter() - t0, 3)}
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    if args.format == "json":
        stdout.write(dumps(report))
    else:
        stdout.write(render_text(report) + "\n")
    return 0 if report["status"] == "pass" else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
