"""Command-line front end: ``confalg check|build-rep|eval|growth``.

Objects are looked up in the definition file given with ``--file`` first and
then among the built-in algebras.  Every command emits a certificate, either
as plain text or (``--json``) as a sorted JSON document.

Exit codes: 0 pass, 1 check failure, 2 input error, 3 precondition error.
"""

from __future__ import annotations

import argparse
import ast
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import builtins as bi
from .confcore import (CheckReport, ConfAlgebra, ConfElement, braced_product, check_axioms, derived_series,
                       find_unit, growth_profile, lambda_product, n_product)
from .constructions import (CentralElement, Pairing, adjoin_unit_rep, canonical_pairing, central_action,
                            check_central_pbw, check_double_conditions, double_rep, solvable_bounds,
                            solvable_faithful_rep, central_pbw_rep)
from .errors import ConfAlgError, FormatError, PreconditionError
from .exactmath import VARS, MultiPoly, parse_poly
from .representations import (ConfRep, HModulePresentation, act, check_rep, check_well_defined, is_faithful,
                              make_rep, regular_rep)

FORMAT_VERSION = "confalg-definitions/1"

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


# -- definition files ------------------------------------------------------------------


def _line_of(text: str, needle: str) -> Optional[int]:
    pos = text.find(json.dumps(needle))
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _where(text: str, key: str) -> str:
    line = _line_of(text, key) if text else None
    return f" (line {line})" if line else ""


@dataclass
class Definitions:
    """Named objects read from a definition file."""

    algebras: Dict[str, ConfAlgebra] = field(default_factory=dict)
    modules: Dict[str, HModulePresentation] = field(default_factory=dict)
    representations: Dict[str, ConfRep] = field(default_factory=dict)
    pairings: Dict[str, dict] = field(default_factory=dict)
    text: str = ""


def _table(entries, what: str, text: str) -> Dict[Tuple[str, str], Dict[str, MultiPoly]]:
    if not isinstance(entries, list):
        raise FormatError(f"{what}: table must be a list of [a, b, target, poly] entries{_where(text, what)}")
    out: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for entry in entries:
        if not (isinstance(entry, list) and len(entry) == 4 and all(isinstance(s, str) for s in entry)):
            raise FormatError(f"{what}: bad table entry {entry!r}{_where(text, what)}")
        a, b, c, p = entry
        try:
            q = parse_poly(p)
        except FormatError as exc:
            raise FormatError(f"{what}: {exc}{_where(text, p)}") from None
        row = out.setdefault((a, b), {})
        row[c] = row.get(c, MultiPoly.const(0)) + q
    return out


def _guard(what: str, text: str, fn):
    try:
        return fn()
    except ConfAlgError as exc:
        if "(line " in str(exc):
            raise
        msg = f"{what}: {exc}{_where(text, what)}"
        if isinstance(exc, PreconditionError):
            raise type(exc)(msg, witness=exc.witness) from None
        raise type(exc)(msg) from None


def load_definitions(text: str) -> Definitions:
    """Parse a JSON definition file; errors carry the line of the offending object."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("definition file must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version tag {doc.get('version')!r}; expected {FORMAT_VERSION!r}")
    defs = Definitions(text=text)
    for name, entry in sorted(doc.get("algebras", {}).items()):
        defs.algebras[name] = _guard(name, text, lambda: ConfAlgebra(
            entry["kind"], tuple(entry["basis"]), _table(entry.get("table", []), name, text), name=name))
    for name, entry in sorted(doc.get("modules", {}).items()):
        defs.modules[name] = _guard(name, text, lambda: _module(entry))
    for name, entry in sorted(doc.get("representations", {}).items()):
        defs.representations[name] = _guard(name, text, lambda: _representation(defs, name, entry, text))
    for name, entry in sorted(doc.get("pairings", {}).items()):
        defs.pairings[name] = _guard(name, text, lambda: _pairing(defs, name, entry, text))
    return defs


def _module(entry) -> HModulePresentation:
    gens = entry["generators"]
    rels = entry.get("relations", {})
    return HModulePresentation(tuple(gens), tuple(parse_poly(rels[g]) if g in rels else MultiPoly.const(0)
                                                  for g in gens))


def _lookup(table: dict, name: str, kind: str, text: str):
    if name not in table:
        raise FormatError(f"unknown {kind} {name!r}{_where(text, name)}")
    return table[name]


def _algebra_ref(defs: Definitions, name: str) -> ConfAlgebra:
    if name in defs.algebras:
        return defs.algebras[name]
    reg = bi.builtin_algebras()
    if name in reg:
        return reg[name]()
    raise FormatError(f"unknown algebra {name!r}{_where(defs.text, name)}")


def _representation(defs: Definitions, name: str, entry, text: str) -> ConfRep:
    C = _algebra_ref(defs, entry["algebra"])
    module = entry["module"]
    M = _lookup(defs.modules, module, "module", text) if isinstance(module, str) else _module(module)
    action = _table(entry.get("action", []), name, text)
    if entry.get("side", "left") != "left":
        raise FormatError(f"{name}: stored representations are left actions (store a right action over C^op)")
    return make_rep(C, M, action, notes=tuple(entry.get("notes", ())))


def _pairing(defs: Definitions, name: str, entry, text: str) -> dict:
    L = _algebra_ref(defs, entry["algebra"])
    V = _lookup(defs.representations, entry["V"], "representation", text)
    M = _lookup(defs.representations, entry["M"], "representation", text)
    P = Pairing(_table(entry.get("table", []), name, text))
    P.validate(L, V, M)
    return {"algebra": L, "V": V, "M": M, "pairing": P}


def _entries(table) -> List[List[str]]:
    return [[a, b, c, str(p)] for (a, b), row in sorted(table.items()) for c, p in sorted(row.items())]


def algebra_to_json(C: ConfAlgebra) -> dict:
    return {"kind": C.kind, "basis": list(C.basis), "table": _entries(C.table)}


def module_to_json(M: HModulePresentation) -> dict:
    out = {"generators": list(M.generators)}
    rels = {g: str(h) for g, h in zip(M.generators, M.relations) if h}
    if rels:
        out["relations"] = rels
    return out


def rep_to_definitions(R: ConfRep, name: str, algebra_name: Optional[str] = None) -> dict:
    """A complete definition file holding ``R`` (and its algebra) under ``name``."""
    alg = algebra_name or R.algebra.name or "algebra"
    return {
        "version": FORMAT_VERSION,
        "algebras": {alg: algebra_to_json(R.algebra)},
        "modules": {f"{name}.module": module_to_json(R.module)},
        "representations": {name: {"algebra": alg, "module": f"{name}.module", "action": _entries(R.action),
                                   "notes": list(R.notes)}},
    }


# -- expressions ------------------------------------------------------------------------


def parse_element(text: str, symbols: Sequence[str]) -> ConfElement:
    """Parse ``2*D*x + y`` style text; ``symbols`` shadow polynomial variables of the same name."""
    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise FormatError(f"cannot parse element {text!r}: {exc.msg}") from None
    val = _eval_element(tree.body, set(symbols), text)
    if isinstance(val, MultiPoly):
        if val:
            raise FormatError(f"{text!r} has no basis symbol")
        return ConfElement()
    return val


def _eval_element(node, symbols, text):
    if isinstance(node, ast.Name):
        if node.id in symbols:
            return ConfElement.of(node.id)
        if node.id in VARS:
            return MultiPoly.var(node.id)
        raise FormatError(f"unknown symbol {node.id!r} in {text!r}")
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return MultiPoly.const(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_element(node.operand, symbols, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a = _eval_element(node.left, symbols, text)
        b = _eval_element(node.right, symbols, text)
        pa, pb = isinstance(a, MultiPoly), isinstance(b, MultiPoly)
        if isinstance(node.op, (ast.Add, ast.Sub)) and pa == pb:
            return a + b if isinstance(node.op, ast.Add) else a - b
        if isinstance(node.op, ast.Mult) and (pa or pb):
            return a * b
        if isinstance(node.op, ast.Div) and pb and b.is_constant() and b:
            inv = 1 / Fraction(b.constant_term())
            return a * MultiPoly.const(inv)
        if isinstance(node.op, ast.Pow) and pa and pb and b.is_constant():
            return a ** int(b.constant_term())
    raise FormatError(f"unsupported construct in element {text!r}")


def _split_call(expr: str) -> Tuple[str, List[str]]:
    expr = expr.strip()
    head, sep, rest = expr.partition("(")
    if not sep or not rest.endswith(")"):
        raise FormatError(f"expected fn(args...), got {expr!r}")
    args, depth, cur = [], 0, ""
    for ch in rest[:-1]:
        if ch == "," and depth == 0:
            args.append(cur.strip())
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        if depth < 0:
            raise FormatError(f"unbalanced parentheses in {expr!r}")
        cur += ch
    if depth:
        raise FormatError(f"unbalanced parentheses in {expr!r}")
    if cur.strip():
        args.append(cur.strip())
    return head.strip(), args


def _int_arg(s: str, what: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {s!r}") from None
    if n < 0:
        raise FormatError(f"{what} must be non-negative, got {n}")
    return n


def _arity(fn: str, args, *counts):
    if len(args) not in counts:
        raise FormatError(f"{fn} takes {' or '.join(map(str, counts))} arguments, got {len(args)}")


def evaluate(defs: Definitions, obj: str, expr: str) -> str:
    """Evaluate one expression of the ``eval`` grammar against object ``obj``; returns canonical text."""
    fn, args = _split_call(expr)
    if obj == "weyl":
        return _evaluate_weyl(fn, args)
    if fn == "act":
        _arity(fn, args, 3)
        R = _rep_ref(defs, args[0], obj)
        a = parse_element(args[1], R.algebra.basis)
        v = parse_element(args[2], R.module.generators)
        return str(act(R, a, v))
    if fn == "central":
        _arity(fn, args, 4, 5)
        if len(args) == 5:
            obj, args = args[0], args[1:]
        L = _algebra_ref(defs, obj)
        x = parse_element(args[0], L.basis)
        n, m = _int_arg(args[1], "n"), _int_arg(args[2], "m")
        b = parse_element(args[3], L.basis)
        return str(central_action(L, x, n, CentralElement.from_tensor(m, b)))
    C = _algebra_ref(defs, obj)
    if fn == "lprod":
        _arity(fn, args, 2)
        return str(lambda_product(C, parse_element(args[0], C.basis), parse_element(args[1], C.basis)))
    if fn in ("nprod", "braced"):
        _arity(fn, args, 3)
        a, b = parse_element(args[0], C.basis), parse_element(args[1], C.basis)
        op = n_product if fn == "nprod" else braced_product
        return str(op(C, a, b, _int_arg(args[2], "n")))
    raise FormatError(f"unknown function {fn!r}; expected lprod, nprod, braced, act or central")


def _evaluate_weyl(fn: str, args) -> str:
    # Cend_1: elements are polynomials in D and x
    def el(s):
        p = parse_poly(s)
        if not p.involves_only(["D", "x"]):
            raise FormatError(f"Cend_1 elements are polynomials in D and x, got {s!r}")
        return bi.weyl_element(p)

    if fn == "lprod":
        _arity(fn, args, 2)
        return str(bi.cend_product(el(args[0]), el(args[1]))[0, 0])
    if fn in ("nprod", "braced"):
        _arity(fn, args, 3)
        op = bi.cend_n_product if fn == "nprod" else bi.cend_braced_n
        return str(op(el(args[0]), el(args[1]), _int_arg(args[2], "n"))[0, 0])
    if fn == "act":
        _arity(fn, args, 2, 3)
        a, v = args[-2], parse_poly(args[-1])
        if not v.involves_only(["D"]):
            raise FormatError(f"vectors of H are polynomials in D, got {args[-1]!r}")
        return str(bi.cend_act(el(a), [v])[0])
    raise FormatError(f"unknown function {fn!r} for weyl; expected lprod, nprod, braced or act")


def _rep_ref(defs: Definitions, name: str, obj: str) -> ConfRep:
    if name in defs.representations:
        return defs.representations[name]
    if name == "regular":
        return regular_rep(_algebra_ref(defs, obj))
    raise FormatError(f"unknown representation {name!r}{_where(defs.text, name)}")


# -- certificates ------------------------------------------------------------------------


def _digest(args: argparse.Namespace, text: str) -> str:
    keys = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "json", "file", "out")}
    blob = json.dumps({"args": keys, "definitions": text}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _report_dict(r: CheckReport) -> dict:
    return json.loads(json.dumps(r.to_dict(), default=str))


def _emit(cert: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(cert, sort_keys=True, indent=2) + "\n")
        return
    out.write(f"{cert['command']} {cert['object']}: {cert['status']}\n")
    for r in cert.get("results", []):
        out.write(f"  {r['check']}: {'pass' if r['passed'] else 'FAIL'}\n")
        for w in r["witnesses"]:
            out.write(f"    witness: {json.dumps(w, sort_keys=True, default=str)}\n")
        for n in r["notes"]:
            out.write(f"    note: {n}\n")
    for key in ("value", "ranks", "rank", "faithful", "kernel_witness", "bounds", "error", "witness", "written"):
        if key in cert:
            out.write(f"  {key}: {cert[key] if not isinstance(cert[key], (dict, list)) else json.dumps(cert[key])}\n")
    if "representation" in cert and not cert.get("written"):
        out.write(json.dumps(cert["representation"], sort_keys=True, indent=2) + "\n")


# -- subcommands -------------------------------------------------------------------------


def _parse_bounds(entry: str):
    entry = entry.strip()
    if "=" not in entry:
        return _int_arg(entry, "N")
    out = {}
    for part in entry.split(","):
        sym, eq, val = part.partition("=")
        if not eq:
            raise FormatError(f"bad bound {part!r}; expected sym=int")
        out[sym.strip()] = _int_arg(val.strip(), f"N({sym.strip()})")
    return out


def _units_report(C: ConfAlgebra, bound: Optional[int]) -> CheckReport:
    # a search report: an absent unit is "none-within-bound", never a failure
    notes = []
    for side in ("left", "right"):
        e = find_unit(C, side, bound)
        notes.append(f"{side} unit: {e if e is not None else 'none-within-bound'}")
    return CheckReport("units", True, [], notes + [f"degree bound: {bound if bound is not None else C.max_d_degree() + 2}"])


def _solvable_report(C: ConfAlgebra) -> CheckReport:
    series, ok = derived_series(C)
    return CheckReport("solvable", ok, [] if ok else [{"terminal_rank": series[-1].module_rank}],
                       [f"derived series ranks: {[S.module_rank for S in series]}"])


def cmd_check(args, defs: Definitions) -> Tuple[dict, int]:
    results: List[CheckReport] = []
    if args.object in defs.representations:
        R = defs.representations[args.object]
        results += [check_rep(R), check_well_defined(R)]
    else:
        C = _algebra_ref(defs, args.object)
        chosen = args.axioms or args.units or args.solvable or args.central_pbw is not None
        if args.axioms or not chosen:
            results.append(check_axioms(C))
        if args.units:
            results.append(_units_report(C, args.degree_bound))
        if args.solvable:
            results.append(_solvable_report(C))
        if args.central_pbw is not None:
            results.append(check_central_pbw(C, _parse_bounds(args.central_pbw)))
    ok = all(r.passed for r in results)
    cert = {"status": "pass" if ok else "fail", "results": [_report_dict(r) for r in results]}
    return cert, EXIT_PASS if ok else EXIT_FAIL


def cmd_build_rep(args, defs: Definitions) -> Tuple[dict, int]:
    method = args.method
    if method == "double" and args.pairing:
        entry = _lookup(defs.pairings, args.pairing, "pairing", defs.text)
        L, V, M, P = entry["algebra"], entry["V"], entry["M"], entry["pairing"]
        report = check_double_conditions(L, V, M, P)
        if not report.passed:
            raise PreconditionError("double construction: conditions on the pairing fail", witness=report.witnesses)
        R = double_rep(L, V, M, P, verify=False)
    else:
        C = _algebra_ref(defs, args.object)
        if method == "adjoin-unit":
            R = adjoin_unit_rep(C, args.Mprime)
        elif method == "double":
            V, M, P = canonical_pairing(C)
            report = check_double_conditions(C, V, M, P)
            if not report.passed:
                raise PreconditionError("double construction: canonical pairing violates the module conditions",
                                        witness=report.witnesses)
            R = double_rep(C, V, M, P, verify=False)
        elif method == "central-pbw":
            if args.N is None:
                raise FormatError("--method central-pbw needs --N")
            R = central_pbw_rep(C, _parse_bounds(args.N))
        else:
            R = solvable_faithful_rep(C, args.K if args.K is not None else 1)
    report = check_rep(R)
    faithful, wit = is_faithful(R)
    name = args.name or f"{args.object}.{method}"
    defs_out = rep_to_definitions(R, name, args.object if args.object not in defs.representations else None)
    cert = {
        "status": "pass" if report.passed else "fail",
        "results": [_report_dict(report)],
        "rank": R.rank,
        "free": R.module.is_free(),
        "faithful": faithful,
        "notes": list(R.notes),
        "representation": defs_out,
    }
    if wit is not None:
        cert["kernel_witness"] = str(wit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(defs_out, sort_keys=True, indent=2) + "\n")
        cert["written"] = args.out
    return cert, EXIT_PASS if report.passed else EXIT_FAIL


def cmd_eval(args, defs: Definitions) -> Tuple[dict, int]:
    return {"status": "pass", "value": evaluate(defs, args.object, args.expression)}, EXIT_PASS


def cmd_growth(args, defs: Definitions) -> Tuple[dict, int]:
    if args.object == "weyl":
        gens = args.generators.split(",") if args.generators else ["x"]
        ranks = growth_profile(bi.CendAmbient(1), [parse_poly(g) for g in gens], args.n)
    else:
        C = _algebra_ref(defs, args.object)
        gens = args.generators.split(",") if args.generators else list(C.basis)
        ranks = growth_profile(C, [parse_element(g, C.basis) for g in gens], args.n)
    return {"status": "pass", "ranks": ranks, "generators": gens}, EXIT_PASS


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", help="JSON definition file")
    common.add_argument("--json", action="store_true", help="emit the certificate as JSON")
    common.add_argument("--degree-bound", type=int, default=None, help="degree bound for unit searches")

    p = argparse.ArgumentParser(prog="confalg", description="Exact checks and constructions for conformal algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run axiom, unit, solvability or invariance checks")
    c.add_argument("object")
    c.add_argument("--axioms", action="store_true")
    c.add_argument("--units", action="store_true")
    c.add_argument("--solvable", action="store_true")
    c.add_argument("--central-pbw", metavar="N", help="locality bounds: an integer or sym=int,...")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("build-rep", parents=[common], help="construct a faithful representation")
    b.add_argument("object")
    b.add_argument("--method", required=True, choices=["adjoin-unit", "double", "central-pbw", "solvable"])
    b.add_argument("--K", type=int, default=None, help="floor for the solvable locality bounds")
    b.add_argument("--N", default=None, help="locality bounds for central-pbw: an integer or sym=int,...")
    b.add_argument("--Mprime", type=int, default=None, help="truncation for adjoin-unit")
    b.add_argument("--pairing", default=None, help="named pairing from --file for the double method")
    b.add_argument("--name", default=None, help="name of the emitted representation")
    b.add_argument("--out", default=None, help="write the representation definition file here")
    b.set_defaults(func=cmd_build_rep)

    e = sub.add_parser("eval", parents=[common], help="evaluate lprod/nprod/braced/act/central")
    e.add_argument("object")
    e.add_argument("expression")
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("growth", parents=[common], help="ranks of V(1..n) for a generating set")
    g.add_argument("object")
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--generators", default=None, help="comma-separated generators (default: the basis)")
    g.set_defaults(func=cmd_growth)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    args = build_parser().parse_args(argv)
    text = ""
    cert = {"command": args.command, "object": args.object}
    start = time.perf_counter()
    try:
        if args.file:
            with open(args.file) as fh:
                text = fh.read()
            defs = load_definitions(text)
        else:
            defs = Definitions()
        result, code = args.func(args, defs)
        cert.update(result)
    except PreconditionError as exc:
        cert.update(status="precondition-error", error=str(exc), witness=json.loads(json.dumps(exc.witness, default=str)))
        code = EXIT_PRECONDITION
    except (ConfAlgError, OSError, KeyError, TypeError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) or isinstance(exc, ConfAlgError) else f"missing field {exc}"
        cert.update(status="input-error", error=msg)
        code = EXIT_INPUT
    cert["inputs_digest"] = _digest(args, text)
    cert["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    _emit(cert, args.json, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
