"""Command line front end.

Subcommands: generate (random unique puzzles), solve (batch system
runs), unique (assignment counting), render (puzzle formats and
checking), repl (interactive steering), serve (HTTP service).

Exit codes: 0 success, 1 usage error, 2 input parse error,
3 budget or limit exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .cases import SolverError
from .generate import (
    GenConfig,
    GenerateError,
    generate,
    provenance_to_json,
)
from .puzzle import PuzzleFormatError, parse_puzzle, render_puzzle
from .session import (
    SystemFormatError,
    load_session_text,
    parse_system,
    save_session_text,
    workbench_for,
)
from .solver import AWAITING, SolveOptions, TraceLog, Workbench
from .unique import check_assignment, count_assignments

USAGE_EXIT = 1
PARSE_EXIT = 2
BUDGET_EXIT = 3

ENV_MAX_TERMS = "CROSSZERO_MAX_TERMS"
ENV_MAX_CASES = "CROSSZERO_MAX_CASES"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        return fallback


def _solve_options(args, stop_after=None) -> SolveOptions:
    return SolveOptions(
        plist=SolveOptions.parse_plist(args.plist) if args.plist else SolveOptions().plist,
        max_terms=args.max_terms,
        max_cases=args.max_cases,
        stop_after_families=stop_after,
        explore_nonzero=getattr(args, "explore_nonzero", False),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crosszero", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_limits(p):
        p.add_argument("--plist", help="module list, e.g. '1,89,20' or '(1 89 20 77 47 21 90)'")
        p.add_argument("--max-terms", type=int, default=_env_int(ENV_MAX_TERMS, 200_000))
        p.add_argument("--max-cases", type=int, default=_env_int(ENV_MAX_CASES, 10_000))

    g = sub.add_parser("generate", help="generate a puzzle with a unique solution")
    g.add_argument("--size", type=int, default=5)
    g.add_argument("--times", type=int, default=1)
    g.add_argument("--div", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--attempts", type=int, default=20)
    g.add_argument("--param-bound", type=int, default=9)
    g.add_argument("--diag-mode", choices=("all", "main"))
    g.add_argument("--plist")
    g.add_argument("--out", help="write the puzzle text here instead of stdout")
    g.add_argument("--provenance", help="write the provenance JSON here")
    g.add_argument("--json", action="store_true", help="emit the puzzle as JSON")
    g.add_argument("--report-dir", help="write figure and delimited reports here")

    s = sub.add_parser("solve", help="batch-solve a polynomial system file")
    s.add_argument("system", help="system file, or - for stdin")
    add_limits(s)
    s.add_argument("--stop-after", type=int, help="stop after this many families")
    s.add_argument("--explore-nonzero", action="store_true")
    s.add_argument("--save", help="save the finished session here")
    s.add_argument("--trace", help="write the full step trace here")
    s.add_argument("--report-dir", help="write figure and delimited reports here")

    u = sub.add_parser("unique", help="count the digit assignments of a puzzle")
    u.add_argument("puzzle")
    u.add_argument("--cap", type=int, help="stop once the count exceeds this")
    u.add_argument("--no-assignments", action="store_true")

    r = sub.add_parser("render", help="re-render a puzzle, optionally checking an assignment")
    r.add_argument("puzzle")
    r.add_argument("--format", choices=("ascii", "json"), default="ascii")
    r.add_argument("--check", help="assignment like a=1,b=2,... to audit")
    r.add_argument("--figure", help="draw the grid to this PNG file")

    p = sub.add_parser("repl", help="interactive steering on a system or saved session")
    p.add_argument("system", nargs="?", help="system file (omit when using --load)")
    add_limits(p)
    p.add_argument("--load", help="resume a saved session file")
    p.add_argument("--explore-nonzero", action="store_true")

    v = sub.add_parser("serve", help="run the steering HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8642)

    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def cmd_generate(args) -> int:
    cfg = GenConfig(
        size=args.size,
        n_times=args.times,
        n_div=args.div,
        seed=args.seed,
        param_bound=args.param_bound,
        max_attempts=args.attempts,
        diag_mode=args.diag_mode,
        plist=SolveOptions.parse_plist(args.plist) if args.plist else SolveOptions().plist,
    )
    try:
        result = generate(cfg)
    except GenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key, value in sorted(exc.stats.items()):
            print(f"  {key}: {value}", file=sys.stderr)
        return BUDGET_EXIT
    text = render_puzzle(result.puzzle, "json" if args.json else "ascii")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    print(f"# unique after {result.attempts} attempt(s)", file=sys.stderr)
    if args.provenance:
        Path(args.provenance).write_text(provenance_to_json(result.provenance))
        print(f"wrote {args.provenance}")
    if args.report_dir:
        from .report import write_puzzle_figure

        outdir = Path(args.report_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_puzzle_figure(result.puzzle, outdir / "puzzle.png")
        (outdir / "provenance.json").write_text(provenance_to_json(result.provenance))
        with (outdir / "assignment.csv").open("w") as fh:
            fh.write("letter,digit\n")
            for letter, digit in sorted(result.assignment.items()):
                fh.write(f"{letter},{digit}\n")
        print(f"wrote reports to {outdir}")
    return 0


def _print_solve_summary(wb: Workbench) -> None:
    counts: dict[str, int] = {}
    for cid in wb.tree.nodes:
        status = wb.tree.node(cid).status
        counts[status] = counts.get(status, 0) + 1
    summary = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"cases: total={wb.tree.case_count()} {summary}")
    print(f"families: {len(wb.families)}")
    for fam in wb.families:
        params = ",".join(f"u{v}" for v in sorted(fam.free_params))
        terms = sum(n.term_count + d.term_count for _, n, d in fam.bindings)
        print(
            f"family {fam.id} case={fam.case_id} free={len(fam.free_params)}"
            f" binding-terms={terms} params={params or '-'}"
        )
    for cid in sorted(wb.tree.nodes, key=lambda s: tuple(int(p) for p in s.split("."))):
        node = wb.tree.node(cid)
        terms = [eq.poly.term_count for eq in node.equations]
        print(
            f"case {cid} {node.status} equations={len(node.equations)}"
            f" terms={sum(terms)} max-terms={max(terms, default=0)}"
        )


def cmd_solve(args) -> int:
    lines: list[str] = []
    trace = TraceLog(lines.append) if args.trace else None
    try:
        system = parse_system(_read(args.system))
    except (OSError, SystemFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    try:
        options = _solve_options(args, stop_after=args.stop_after)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    wb = workbench_for(system, options, trace)
    wb.run()
    _print_solve_summary(wb)
    if args.trace:
        Path(args.trace).write_text("\n".join(lines) + "\n")
        print(f"wrote {args.trace}")
    if args.save:
        Path(args.save).write_text(save_session_text(wb))
        print(f"wrote {args.save}")
    if args.report_dir:
        from .report import write_solve_report

        written = write_solve_report(wb, args.report_dir)
        print(f"wrote reports to {Path(args.report_dir)} ({len(written)} files)")
    return 0


def cmd_unique(args) -> int:
    try:
        puzzle = parse_puzzle(_read(args.puzzle))
    except (OSError, PuzzleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    started = time.monotonic()
    result = count_assignments(puzzle, cap=args.cap)
    elapsed = time.monotonic() - started
    more = "more than " if result.capped else ""
    print(f"count: {more}{result.count if not result.capped else result.count - 1}")
    print(f"nodes: {result.nodes}")
    print(f"time: {elapsed:.2f}s")
    if not args.no_assignments:
        for assignment in result.assignments:
            body = " ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            print(f"assignment: {body}")
    return 0


def _parse_assignment(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for chunk in text.replace(",", " ").split():
        if "=" not in chunk:
            raise PuzzleFormatError(f"bad assignment entry {chunk!r}")
        letter, _, digit = chunk.partition("=")
        if len(letter) != 1 or not digit.lstrip("-").isdigit():
            raise PuzzleFormatError(f"bad assignment entry {chunk!r}")
        out[letter] = int(digit)
    return out


def cmd_render(args) -> int:
    try:
        puzzle = parse_puzzle(_read(args.puzzle))
    except (OSError, PuzzleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    sys.stdout.write(render_puzzle(puzzle, args.format))
    if args.figure:
        from .report import write_puzzle_figure

        write_puzzle_figure(puzzle, args.figure)
        print(f"wrote {args.figure}")
    if args.check:
        try:
            assignment = _parse_assignment(args.check)
        except PuzzleFormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return PARSE_EXIT
        report = check_assignment(puzzle, assignment)
        for problem in report.problems:
            print(f"problem: {problem}")
        for line in report.lines:
            residual = "" if line.residual is None else f" residual={line.residual}"
            print(f"line {line.label}: {line.status}{residual}")
        print(f"verdict: {'solved' if report.ok else 'not solved'}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


class Repl:
    """Interactive steering loop.

    Commands: list, inspect CASE, candidates [CASE], apply CASE MODULE
    [CANDIDATE], resume, tree, families, save FILE, load FILE, help,
    quit.  A bare module number applies that module to the first
    waiting case and resumes the automatic run."""

    def __init__(self, wb: Workbench, out=None):
        self.out = out or sys.stdout
        self.wb = wb
        self.wb.trace.sink = self._emit

    def _emit(self, line: str) -> None:
        print(line, file=self.out)

    def say(self, text: str) -> None:
        print(text, file=self.out)

    def current_case(self) -> str | None:
        for cid in self.wb.tree.nodes:
            if self.wb.tree.node(cid).status == AWAITING:
                return cid
        return None

    def do_line(self, raw: str) -> bool:
        """Execute one command line; returns False to quit."""
        parts = raw.strip().split()
        if not parts:
            return True
        cmd, rest = parts[0], parts[1:]
        try:
            if cmd in ("quit", "exit"):
                return False
            if cmd == "help":
                self.say(self.__doc__.split("Commands: ")[1].replace("\n    ", "\n"))
            elif cmd == "list":
                for cid in self.wb.tree.nodes:
                    node = self.wb.tree.node(cid)
                    self.say(f"  {cid} {node.status} equations={len(node.equations)}")
            elif cmd == "tree":
                summary = self.wb.tree_summary()
                self.say(
                    f"  cases={summary['cases']} families={len(summary['families'])} "
                    + " ".join(f"{k}={v}" for k, v in sorted(summary["statuses"].items()))
                )
            elif cmd == "families":
                for fam in self.wb.families:
                    params = ",".join(f"u{v}" for v in sorted(fam.free_params))
                    self.say(f"  {fam.id} case={fam.case_id} free={len(fam.free_params)} params={params or '-'}")
            elif cmd == "inspect":
                self._inspect(rest[0] if rest else self.current_case())
            elif cmd == "candidates":
                self._candidates(rest[0] if rest else self.current_case())
            elif cmd == "apply":
                if len(rest) < 2:
                    self.say("usage: apply CASE MODULE [CANDIDATE]")
                else:
                    self._apply(rest[0], rest[1], int(rest[2]) if len(rest) > 2 else None)
            elif cmd in ("resume", "run"):
                self.wb.run()
            elif cmd == "save":
                Path(rest[0]).write_text(save_session_text(self.wb))
                self.say(f"  saved {rest[0]}")
            elif cmd == "load":
                self.wb = load_session_text(Path(rest[0]).read_text(), TraceLog(self._emit))
                self.say(f"  loaded {rest[0]}")
            elif cmd.isdigit():
                case = self.current_case()
                if case is None:
                    self.say("  no case is waiting")
                else:
                    if self._apply(case, cmd, None):
                        self.wb.run()
            else:
                self.say(f"  unknown command {cmd!r} (try help)")
        except (SolverError, OSError, IndexError, ValueError) as exc:
            self.say(f"  error: {exc}")
        return True

    def _inspect(self, cid: str | None) -> None:
        if cid is None:
            self.say("  no case is waiting; name one")
            return
        detail = self.wb.case_detail(cid)
        self.say(f"  case {cid} {detail['status']} note={detail['note'] or '-'}")
        for eq in detail["equations"]:
            self.say(
                f"    eq {eq['terms']} terms, degree {eq['degree']},"
                f" vars {','.join(eq['vars']) or '-'}"
            )
        if detail["bindings"]:
            self.say(f"    bindings: {len(detail['bindings'])}")
        if detail["nonzero"]:
            self.say(f"    nonzero: {', '.join(detail['nonzero'])}")

    def _candidates(self, cid: str | None) -> None:
        if cid is None:
            self.say("  no case is waiting; name one")
            return
        cands = self.wb.candidates(cid)
        if not cands:
            self.say("  no split candidates")
        for k, cand in enumerate(cands):
            self.say(
                f"  [{k}] equation {cand.eq_index + 1} along u{cand.var}:"
                f" low {cand.low.term_count} terms, linear {cand.lin.term_count} terms,"
                f" {len(cand.uppers)} upper coefficient(s)"
            )

    def _apply(self, cid: str, module: str, cand_index: int | None) -> bool:
        if cand_index is not None:
            cands = self.wb.candidates(cid)
            if not 0 <= cand_index < len(cands):
                self.say(f"  no candidate {cand_index}")
                return False
            out = self.wb.apply_split(cid, cands[cand_index], once=module == "91")
        else:
            out = self.wb.apply_module(cid, module)
        if not out.applied:
            self.say(f"  not applicable: {out.note}")
        return out.applied

    def loop(self, stream=None) -> None:
        stream = stream or sys.stdin
        for raw in stream:
            if not self.do_line(raw):
                break


def cmd_repl(args) -> int:
    try:
        if args.load:
            wb = load_session_text(Path(args.load).read_text())
        elif args.system:
            options = _solve_options(args)
            wb = workbench_for(parse_system(_read(args.system)), options)
        else:
            print("error: give a system file or --load", file=sys.stderr)
            return USAGE_EXIT
    except (OSError, SystemFormatError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    repl = Repl(wb)
    repl.loop()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "generate": cmd_generate,
        "solve": cmd_solve,
        "unique": cmd_unique,
        "render": cmd_render,
        "repl": cmd_repl,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
