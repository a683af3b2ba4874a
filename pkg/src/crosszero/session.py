"""System files and saved sessions.

A system file declares variables and lists equations and nonzero
conditions, one per line:

    # free-form comment
    var u1
    var u2
    eq u1^2 - 2*u2
    ineq u1

Declarations are strict: every variable used in an eq or ineq line must
have been declared on an earlier var line, and nothing may be declared
twice.  A saved session is a JSON snapshot of a whole workbench (the
case tree, queued work, factor results, and the families found) that
loads back byte-for-byte equivalent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cases import Binding, CaseNode, Equation, InequalitySet, SolutionFamily, SolverError
from .factor import Factorization
from .poly import Poly, PolyParseError, format_poly, parse_poly
from .solver import SolveOptions, TraceLog, Workbench

SESSION_FORMAT = "case-workbench-session"
SESSION_VERSION = 1


class SystemFormatError(Exception):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class System:
    var_ids: tuple[int, ...]
    equations: tuple[Poly, ...]
    inequalities: tuple[Poly, ...]

    def var_count(self) -> int:
        return len(self.var_ids)


def parse_system(text: str) -> System:
    declared: list[int] = []
    seen: set[int] = set()
    eqs: list[Poly] = []
    ineqs: list[Poly] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("var "):
            name = line[4:].strip()
            if not name.startswith("u") or not name[1:].isdigit():
                raise SystemFormatError(line_no, f"bad variable name {name!r}")
            vid = int(name[1:])
            if vid <= 0:
                raise SystemFormatError(line_no, "variable numbers start at 1")
            if vid in seen:
                raise SystemFormatError(line_no, f"u{vid} declared twice")
            seen.add(vid)
            declared.append(vid)
            continue
        if line.startswith("eq ") or line.startswith("ineq "):
            keyword, _, body = line.partition(" ")
            try:
                p = parse_poly(body.strip())
            except PolyParseError as e:
                raise SystemFormatError(line_no, f"bad polynomial: {e}") from e
            undeclared = sorted(p.vars() - seen)
            if undeclared:
                names = ", ".join(f"u{v}" for v in undeclared)
                raise SystemFormatError(line_no, f"undeclared variable(s) {names}")
            if keyword == "eq":
                eqs.append(p)
            else:
                if p.is_zero():
                    raise SystemFormatError(line_no, "zero cannot be asserted nonzero")
                ineqs.append(p)
            continue
        raise SystemFormatError(line_no, f"expected var/eq/ineq, got {line.split()[0]!r}")
    return System(tuple(declared), tuple(eqs), tuple(ineqs))


def format_system(system: System) -> str:
    lines = [f"var u{v}" for v in system.var_ids]
    lines += [f"eq {format_poly(p)}" for p in system.equations]
    lines += [f"ineq {format_poly(p)}" for p in system.inequalities]
    return "\n".join(lines) + "\n"


def workbench_for(system: System, options: SolveOptions | None = None, trace: TraceLog | None = None) -> Workbench:
    return Workbench(
        system.equations,
        system.inequalities,
        declared_vars=system.var_ids,
        options=options,
        trace=trace,
    )


# -- session snapshots ---------------------------------------------------------


def _dump_factorization(f: Factorization | None):
    if f is None:
        return None
    return {
        "content": str(f.content),
        "factors": [[format_poly(p), m] for p, m in f.factors],
        "status": f.status,
    }


def _load_factorization(data) -> Factorization | None:
    if data is None:
        return None
    return Factorization(
        Fraction(data["content"]),
        tuple((parse_poly(t), int(m)) for t, m in data["factors"]),
        data["status"],
    )


def _dump_case(node: CaseNode) -> dict:
    return {
        "parent": node.parent,
        "assumption": None
        if node.assumption is None
        else [format_poly(node.assumption[0]), node.assumption[1]],
        "equations": [[format_poly(eq.poly), _dump_factorization(eq.factorization)] for eq in node.equations],
        "nonzero": [format_poly(p) for p in node.ineq.sorted_nonzero()],
        "or_groups": [sorted(format_poly(p) for p in g) for g in node.ineq.or_groups],
        "bindings": [[b.var, format_poly(b.num), format_poly(b.den)] for b in node.bindings],
        "todo": [[code, format_poly(p)] for code, p in node.todo],
        "status": node.status,
        "explore": node.explore,
        "note": node.note,
    }


def _load_case(cid: str, data: dict) -> CaseNode:
    assumption = data["assumption"]
    return CaseNode(
        id=cid,
        parent=data["parent"],
        assumption=None if assumption is None else (parse_poly(assumption[0]), assumption[1]),
        equations=tuple(Equation(parse_poly(t), _load_factorization(f)) for t, f in data["equations"]),
        ineq=InequalitySet(
            frozenset(parse_poly(t) for t in data["nonzero"]),
            tuple(frozenset(parse_poly(t) for t in g) for g in data["or_groups"]),
        ),
        bindings=tuple(Binding(int(v), parse_poly(n), parse_poly(d)) for v, n, d in data["bindings"]),
        todo=tuple((code, parse_poly(t)) for code, t in data["todo"]),
        status=data["status"],
        explore=data["explore"],
        note=data["note"],
    )


def _dump_family(f: SolutionFamily) -> dict:
    return {
        "id": f.id,
        "case": f.case_id,
        "free": list(f.free_params),
        "bindings": [[v, format_poly(n), format_poly(d)] for v, n, d in f.bindings],
        "chain": [[b.var, format_poly(b.num), format_poly(b.den)] for b in f.chain],
        "inequalities": [format_poly(p) for p in f.inequalities],
        "total_vars": f.total_vars,
    }


def _load_family(data: dict) -> SolutionFamily:
    return SolutionFamily(
        id=data["id"],
        case_id=data["case"],
        free_params=tuple(int(v) for v in data["free"]),
        bindings=tuple((int(v), parse_poly(n), parse_poly(d)) for v, n, d in data["bindings"]),
        chain=tuple(Binding(int(v), parse_poly(n), parse_poly(d)) for v, n, d in data["chain"]),
        inequalities=tuple(parse_poly(t) for t in data["inequalities"]),
        total_vars=int(data["total_vars"]),
    )


def save_session(wb: Workbench) -> dict:
    return {
        "format": SESSION_FORMAT,
        "version": SESSION_VERSION,
        "system": {
            "vars": sorted(wb.tree.all_vars),
            "eq": [format_poly(p) for p in wb.tree.originals],
            "ineq": [format_poly(p) for p in wb.tree.original_ineqs],
        },
        "options": {
            "plist": list(wb.options.plist),
            "max_terms": wb.options.max_terms,
            "max_cases": wb.options.max_cases,
            "stop_after_families": wb.options.stop_after_families,
            "explore_nonzero": wb.options.explore_nonzero,
        },
        "family_counter": wb._family_counter,
        "cases": {cid: _dump_case(node) for cid, node in sorted(wb.tree.nodes.items())},
        "children": {cid: kids for cid, kids in sorted(wb.tree.children.items())},
        "families": [_dump_family(f) for f in wb.families],
    }


def save_session_text(wb: Workbench) -> str:
    return json.dumps(save_session(wb), indent=1, sort_keys=True) + "\n"


def load_session(data: dict, trace: TraceLog | None = None) -> Workbench:
    if not isinstance(data, dict) or data.get("format") != SESSION_FORMAT:
        raise SolverError("not a saved session")
    if data.get("version") != SESSION_VERSION:
        raise SolverError(f"unsupported session version {data.get('version')!r}")
    opts = data["options"]
    options = SolveOptions(
        plist=tuple(opts["plist"]),
        max_terms=int(opts["max_terms"]),
        max_cases=int(opts["max_cases"]),
        stop_after_families=None if opts["stop_after_families"] is None else int(opts["stop_after_families"]),
        explore_nonzero=bool(opts["explore_nonzero"]),
    )
    sysdata = data["system"]
    wb = Workbench(
        [parse_poly(t) for t in sysdata["eq"]],
        [parse_poly(t) for t in sysdata["ineq"]],
        declared_vars=[int(v) for v in sysdata["vars"]],
        options=options,
        trace=TraceLog(),
    )
    wb.tree.nodes = {cid: _load_case(cid, rec) for cid, rec in data["cases"].items()}
    wb.tree.children = {cid: list(kids) for cid, kids in data["children"].items()}
    wb.families = [_load_family(rec) for rec in data["families"]]
    wb._family_keys = {f.key() for f in wb.families}
    wb._family_counter = int(data["family_counter"])
    wb.trace = trace or TraceLog()
    return wb


def load_session_text(text: str, trace: TraceLog | None = None) -> Workbench:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SolverError(f"bad session file: {e}") from e
    return load_session(data, trace)
