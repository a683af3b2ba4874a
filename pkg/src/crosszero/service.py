"""HTTP service for steering solver sessions and auditing puzzles.

Sessions are in-memory.  Every mutation appends lines to an ordered
event log (the solver's own step trace), and the log length is the
session's snapshot version: readers get consistent versioned snapshots,
writers must present the version they read and lose with 409 when a
concurrent step got there first.  A background auto-run yields between
module applications, so reads and pause requests stay responsive, and
all numbers on the wire are exact integer or numerator/denominator
strings, never floats.
"""

from __future__ import annotations

import itertools
import threading
import time
from datetime import datetime, timezone
from fractions import Fraction

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, StreamingResponse

from .cases import SolverError
from .fixtures import DEMO_PUZZLE_TEXT
from .generate import GenConfig, GenerateError, generate
from .grid import GridError, grid_to_system, var_grid
from .puzzle import Puzzle, PuzzleFormatError, parse_puzzle, render_puzzle
from .session import (
    SystemFormatError,
    load_session_text,
    parse_system,
    save_session_text,
)
from .solver import RunAbort, SolveOptions, Workbench
from .unique import check_assignment


class SessionState:
    """One live workbench plus its append-only event log.

    The snapshot version is the event count.  An auto-run happens on a
    background thread that owns the session lock but hands it back at
    every module boundary, so reads stay responsive; pausing aborts the
    thread at the next boundary and a later resume re-walks the tree
    from the root, which is exactly what the REPL's resume does."""

    def __init__(self, sid: str, wb: Workbench, options: SolveOptions, puzzle: Puzzle | None = None):
        self.id = sid
        self.created_at = datetime.now(timezone.utc).isoformat()
        self.wb = wb
        self.options = options
        self.puzzle = puzzle
        self.lock = threading.Lock()
        self.event_cond = threading.Condition()
        self.events: list[str] = list(wb.trace.lines)
        self.runner: threading.Thread | None = None
        self.abort_flag = threading.Event()
        self.paused = False
        wb.trace.sink = self._publish

    def _publish(self, line: str) -> None:
        with self.event_cond:
            self.events.append(line)
            self.event_cond.notify_all()

    @property
    def version(self) -> int:
        return len(self.events)

    def running(self) -> bool:
        return self.runner is not None and self.runner.is_alive()

    def may_mutate(self) -> bool:
        return not self.running()

    def start_run(self) -> bool:
        """Start (or resume) the background run; False if one is going."""
        if self.running():
            return False
        self.abort_flag.clear()
        self.paused = False
        self.runner = threading.Thread(target=self._run, daemon=True)
        self.runner.start()
        return True

    def _run(self) -> None:
        def boundary() -> None:
            if self.abort_flag.is_set():
                raise RunAbort
            self.lock.release()
            try:
                time.sleep(0)
            finally:
                self.lock.acquire()
            if self.abort_flag.is_set():
                raise RunAbort

        with self.lock:
            try:
                result = self.wb.run(boundary=boundary)
                self.paused = result.aborted
            finally:
                with self.event_cond:
                    self.event_cond.notify_all()

    def pause(self) -> bool:
        """Stop the auto-run at its next module boundary; False if idle."""
        if not self.running():
            return False
        self.abort_flag.set()
        self.runner.join(timeout=60)
        return True

    def shutdown(self) -> None:
        self.abort_flag.set()
        if self.runner is not None:
            self.runner.join(timeout=10)
        with self.event_cond:
            self.event_cond.notify_all()


def _exact(value: Fraction) -> str:
    return str(value)


def _session_handle(state: SessionState) -> dict:
    with state.lock:
        summary = state.wb.tree_summary()
    return {
        "id": state.id,
        "created_at": state.created_at,
        "version": state.version,
        "running": state.running(),
        "paused": state.paused,
        "options": {
            "plist": list(state.options.plist),
            "max_terms": state.options.max_terms,
            "max_cases": state.options.max_cases,
            "stop_after_families": state.options.stop_after_families,
            "explore_nonzero": state.options.explore_nonzero,
        },
        "cases": summary["cases"],
        "statuses": summary["statuses"],
        "families": summary["families"],
        "has_puzzle": state.puzzle is not None,
    }


def _candidate_row(state: SessionState, case_id: str, index: int, cand) -> dict:
    eq = state.wb.tree.node(case_id).equations[cand.eq_index]
    return {
        "index": index,
        "equation": cand.eq_index + 1,
        "var": f"u{cand.var}",
        "degree": cand.degree,
        "score": {
            "eq_vars": len(eq.vars),
            "eq_terms": eq.term_count,
            "degree": cand.degree,
            "lin_terms": cand.lin.term_count,
            "low_terms": cand.low.term_count,
            "pair_vars": len(cand.low.vars() | cand.lin.vars()),
        },
        "uppers": len(cand.uppers),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="case workbench service")
    # Browser cockpits are served as static files from wherever is handy,
    # so the API answers cross-origin requests.  Sessions carry no
    # credentials; the service is a local steering tool.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, SessionState] = {}
    puzzles: dict[str, Puzzle] = {}
    session_ids = itertools.count(1)
    puzzle_ids = itertools.count(1)
    create_lock = threading.Lock()

    def get_state(sid: str) -> SessionState:
        state = sessions.get(sid)
        if state is None:
            raise HTTPException(404, f"no session {sid}")
        return state

    def get_puzzle(pid: str) -> Puzzle:
        puzzle = puzzles.get(pid)
        if puzzle is None:
            raise HTTPException(404, f"no puzzle {pid}")
        return puzzle

    def parse_options(payload: dict) -> SolveOptions:
        raw = payload.get("options") or {}
        base = SolveOptions()
        try:
            raw_plist = raw.get("plist")
            if raw_plist is None:
                plist = base.plist
            elif isinstance(raw_plist, str):
                plist = SolveOptions.parse_plist(raw_plist)
            else:
                plist = SolveOptions.parse_plist(" ".join(str(m) for m in raw_plist))
            saf = raw.get("stop_after_families")
            return SolveOptions(
                plist=plist,
                max_terms=int(raw.get("max_terms", base.max_terms)),
                max_cases=int(raw.get("max_cases", base.max_cases)),
                stop_after_families=None if saf is None else int(saf),
                explore_nonzero=bool(raw.get("explore_nonzero", False)),
            )
        except (SolverError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad options: {exc}")

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request) -> dict:
        payload = await request.json()
        if not isinstance(payload, dict):
            raise HTTPException(422, "expected a JSON object")
        options = parse_options(payload)
        puzzle = None
        try:
            if "session" in payload:
                wb = load_session_text(payload["session"])
                options = wb.options
            elif "system" in payload:
                system = parse_system(payload["system"])
                wb = Workbench(
                    system.equations,
                    system.inequalities,
                    declared_vars=system.var_ids,
                    options=options,
                )
            elif "puzzle" in payload or "grid" in payload:
                if "puzzle" in payload:
                    puzzle = parse_puzzle(payload["puzzle"])
                    pg = puzzle.grid
                    grid = var_grid(puzzle.n, pg.row_ops, pg.col_ops, pg.diag_ops)
                    diag_mode = puzzle.diag_mode
                else:
                    g = payload["grid"]
                    grid = var_grid(int(g["size"]), g["row_ops"], g["col_ops"], g["diag_ops"])
                    diag_mode = g.get("diagonals", "all" if int(g["size"]) >= 6 else "main")
                gsys = grid_to_system(grid, diag_mode)
                wb = Workbench(
                    gsys.equations,
                    gsys.inequalities,
                    declared_vars=gsys.var_ids,
                    options=options,
                )
            else:
                raise HTTPException(422, "payload needs one of: system, puzzle, grid, session")
        except (SystemFormatError, PuzzleFormatError, GridError, SolverError, KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad payload: {exc}")
        with create_lock:
            sid = f"s{next(session_ids)}"
            state = SessionState(sid, wb, options, puzzle)
            sessions[sid] = state
        if payload.get("autorun"):
            state.start_run()
        return _session_handle(state)

    @app.get("/sessions")
    def list_sessions() -> dict:
        return {"sessions": [_session_handle(s) for s in sessions.values()]}

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        return _session_handle(get_state(sid))

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str) -> dict:
        state = get_state(sid)
        state.shutdown()
        del sessions[sid]
        return {"deleted": sid}

    @app.get("/sessions/{sid}/tree")
    def get_tree(sid: str) -> dict:
        state = get_state(sid)
        with state.lock:
            wb = state.wb
            cases = []
            for cid in wb.tree.nodes:
                node = wb.tree.node(cid)
                terms = [eq.poly.term_count for eq in node.equations]
                cases.append(
                    {
                        "id": cid,
                        "parent": node.parent,
                        "status": node.status,
                        "explore": node.explore,
                        "note": node.note,
                        "assumption": None
                        if node.assumption is None
                        else {"poly": str(node.assumption[0]), "relation": node.assumption[1]},
                        "equations": len(node.equations),
                        "terms": sum(terms),
                        "max_terms": max(terms, default=0),
                        "children": list(wb.tree.children.get(cid, [])),
                    }
                )
            families = [wb.family_detail(f) for f in wb.families]
            summary = wb.tree_summary()
            version = state.version
        return {"version": version, "summary": summary, "cases": cases, "families": families}

    @app.get("/sessions/{sid}/cases/{case_id}")
    def get_case(sid: str, case_id: str) -> dict:
        state = get_state(sid)
        with state.lock:
            try:
                detail = state.wb.case_detail(case_id)
                cands = state.wb.candidates(case_id)
            except (SolverError, KeyError) as exc:
                raise HTTPException(404, f"no case {case_id}: {exc}")
            detail["candidates"] = [
                _candidate_row(state, case_id, k, c) for k, c in enumerate(cands)
            ]
            detail["version"] = state.version
        return detail

    @app.post("/sessions/{sid}/steps")
    async def apply_step(sid: str, request: Request) -> dict:
        payload = await request.json()
        state = get_state(sid)
        case_id = payload.get("case")
        module = str(payload.get("module", ""))
        candidate = payload.get("candidate")
        want_version = payload.get("version")
        if not state.may_mutate():
            raise HTTPException(409, "auto-run in progress; pause it first")
        with state.lock:
            if want_version is not None and int(want_version) != state.version:
                raise HTTPException(409, f"version conflict: step was built against {want_version}, session is at {state.version}")
            try:
                if candidate is not None:
                    cands = state.wb.candidates(case_id)
                    if not 0 <= int(candidate) < len(cands):
                        raise HTTPException(422, f"no candidate {candidate}")
                    outcome = state.wb.apply_split(case_id, cands[int(candidate)], once=module == "91")
                else:
                    outcome = state.wb.apply_module(case_id, module)
            except SolverError as exc:
                raise HTTPException(422, str(exc))
            if not outcome.applied:
                raise HTTPException(422, f"not applicable: {outcome.note}")
            return {
                "applied": True,
                "module": outcome.module,
                "note": outcome.note,
                "children": list(outcome.children),
                "version": state.version,
            }

    @app.post("/sessions/{sid}/run", status_code=202)
    def start_run(sid: str) -> dict:
        state = get_state(sid)
        if not state.start_run():
            raise HTTPException(409, "already running")
        return {"running": True, "version": state.version}

    @app.post("/sessions/{sid}/pause")
    def pause_run(sid: str) -> dict:
        state = get_state(sid)
        state.pause()
        return {"running": state.running(), "paused": state.paused, "version": state.version}

    @app.get("/sessions/{sid}/events")
    def get_events(sid: str, start: int = 0, wait: float = 0.0) -> dict:
        state = get_state(sid)
        with state.event_cond:
            if wait > 0 and len(state.events) <= start:
                state.event_cond.wait(timeout=min(wait, 30.0))
            events = list(state.events[start:])
        return {
            "from": start,
            "next": start + len(events),
            "events": events,
            "running": state.running(),
        }

    @app.get("/sessions/{sid}/events/stream")
    def stream_events(sid: str, start: int = 0):
        state = get_state(sid)

        def feed():
            cursor = start
            while True:
                with state.event_cond:
                    while len(state.events) <= cursor:
                        if not state.running():
                            return
                        state.event_cond.wait(timeout=1.0)
                    chunk = state.events[cursor : cursor + 64]
                for line in chunk:
                    yield f"id: {cursor}\ndata: {line}\n\n"
                    cursor += 1

        return StreamingResponse(feed(), media_type="text/event-stream")

    @app.get("/sessions/{sid}/save")
    def save(sid: str) -> PlainTextResponse:
        state = get_state(sid)
        with state.lock:
            text = save_session_text(state.wb)
        return PlainTextResponse(text, media_type="application/json")

    # -- puzzles ----------------------------------------------------------------

    def register_puzzle(puzzle: Puzzle, pid: str | None = None) -> str:
        with create_lock:
            if pid is None:
                pid = f"p{next(puzzle_ids)}"
            puzzles[pid] = puzzle
        return pid

    def puzzle_body(pid: str, puzzle: Puzzle) -> dict:
        return {
            "id": pid,
            "size": puzzle.n,
            "letters": list(puzzle.letters),
            "leading_zero": puzzle.leading_zero,
            "diagonals": puzzle.diag_mode,
            "text": render_puzzle(puzzle),
            "cells": [[str(c) for c in row] for row in puzzle.grid.cells],
            "row_ops": [list(r) for r in puzzle.grid.row_ops],
            "col_ops": [list(r) for r in puzzle.grid.col_ops],
            "diag_ops": [list(r) for r in puzzle.grid.diag_ops],
        }

    @app.post("/puzzles", status_code=201)
    async def add_puzzle(request: Request) -> dict:
        payload = await request.json()
        try:
            puzzle = parse_puzzle(payload["puzzle"])
        except (KeyError, TypeError) as exc:
            raise HTTPException(422, f"payload needs a puzzle text: {exc}")
        except PuzzleFormatError as exc:
            raise HTTPException(422, f"bad puzzle: {exc}")
        pid = register_puzzle(puzzle)
        return puzzle_body(pid, puzzle)

    @app.get("/puzzles/demo")
    def demo_puzzle() -> dict:
        if "demo" not in puzzles:
            register_puzzle(parse_puzzle(DEMO_PUZZLE_TEXT), "demo")
        return puzzle_body("demo", puzzles["demo"])

    @app.get("/puzzles/{pid}")
    def read_puzzle(pid: str) -> dict:
        return puzzle_body(pid, get_puzzle(pid))

    @app.post("/puzzles/random", status_code=201)
    async def random_puzzle(request: Request) -> dict:
        payload = await request.json()
        try:
            cfg = GenConfig(
                size=int(payload.get("size", 5)),
                n_times=int(payload.get("times", 1)),
                n_div=int(payload.get("div", 1)),
                seed=int(payload.get("seed", 0)),
                max_attempts=int(payload.get("attempts", 20)),
                param_bound=int(payload.get("param_bound", 9)),
                diag_mode=payload.get("diagonals"),
            )
        except (TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad config: {exc}")
        try:
            result = generate(cfg)
        except GenerateError as exc:
            raise HTTPException(422, f"{exc} ({exc.stats})")
        pid = register_puzzle(result.puzzle)
        body = puzzle_body(pid, result.puzzle)
        body["attempts"] = result.attempts
        return body

    @app.post("/puzzles/{pid}/check")
    async def check_puzzle(pid: str, request: Request) -> dict:
        puzzle = get_puzzle(pid)
        payload = await request.json()
        raw = payload.get("assignment")
        if not isinstance(raw, dict):
            raise HTTPException(422, "payload needs an assignment object")
        assignment: dict[str, int] = {}
        for letter, digit in raw.items():
            if digit is None:
                continue
            try:
                assignment[str(letter)] = int(digit)
            except (TypeError, ValueError):
                raise HTTPException(422, f"digit for {letter!r} must be an integer")
        values = [d for d in assignment.values()]
        if len(set(values)) != len(values):
            raise HTTPException(400, "assignment is not injective: two letters share a digit")
        report = check_assignment(puzzle, assignment)
        return {
            "ok": report.ok,
            "problems": list(report.problems),
            "lines": [
                {
                    "label": c.label,
                    "status": c.status,
                    "residual": None if c.residual is None else _exact(c.residual),
                }
                for c in report.lines
            ],
        }

    return app
