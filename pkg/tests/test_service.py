"""HTTP service: session lifecycle, steering, events, puzzle auditing."""

import io
import json
import time

import pytest
from fastapi.testclient import TestClient

from crosszero.cli import Repl
from crosszero.fixtures import DEMO_ASSIGNMENT, DEMO_PUZZLE_TEXT
from crosszero.service import create_app
from crosszero.session import load_session_text, parse_system, workbench_for
from crosszero.solver import SolveOptions

TOY_SYSTEM = "var u1\nvar u2\neq u1 + u2\neq u1 - u2\n"
STUCK_SYSTEM = (
    "var u1\nvar u2\nvar u3\nvar u4\nvar u5\n"
    "eq u1^2*u2^2 - u1^2*u3^2 + u5^2*u1 + u4^2\n"
)
STUCK_PLIST = ["1", "89", "20", "21", "38"]
RESUME_PLIST = ["1", "89", "20", "21", "77", "47", "38"]


@pytest.fixture()
def client():
    app = create_app()
    with TestClient(app) as c:
        yield c


def wait_idle(client, sid, budget=30.0):
    deadline = time.monotonic() + budget
    while time.monotonic() < deadline:
        handle = client.get(f"/sessions/{sid}").json()
        if not handle["running"]:
            return handle
        time.sleep(0.01)
    raise AssertionError("session never went idle")


def make_session(client, system, plist=None, autorun=False):
    payload = {"system": system, "autorun": autorun}
    if plist is not None:
        payload["options"] = {"plist": plist}
    resp = client.post("/sessions", json=payload)
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestSessionLifecycle:
    def test_create_solves_toy_on_autorun(self, client):
        handle = make_session(client, TOY_SYSTEM, autorun=True)
        assert handle["id"] == "s1"
        assert handle["created_at"]
        done = wait_idle(client, handle["id"])
        assert done["families"] == ["F1"]
        assert done["statuses"] == {"solved": 1}
        assert done["options"]["plist"][0] == "1"

    def test_list_get_delete(self, client):
        a = make_session(client, TOY_SYSTEM)
        b = make_session(client, TOY_SYSTEM)
        ids = [s["id"] for s in client.get("/sessions").json()["sessions"]]
        assert ids == [a["id"], b["id"]]
        assert client.get(f"/sessions/{a['id']}").status_code == 200
        assert client.delete(f"/sessions/{a['id']}").json() == {"deleted": a["id"]}
        assert client.get(f"/sessions/{a['id']}").status_code == 404
        assert client.delete(f"/sessions/{a['id']}").status_code == 404

    def test_malformed_system_is_422_with_location(self, client):
        resp = client.post("/sessions", json={"system": "var u1\neq u1 +\n"})
        assert resp.status_code == 422
        assert "line 2" in resp.json()["detail"]

    def test_bad_options_rejected(self, client):
        resp = client.post(
            "/sessions", json={"system": TOY_SYSTEM, "options": {"plist": "55"}}
        )
        assert resp.status_code == 422

    def test_empty_payload_rejected(self, client):
        resp = client.post("/sessions", json={})
        assert resp.status_code == 422

    def test_create_from_puzzle_payload(self, client):
        resp = client.post("/sessions", json={"puzzle": DEMO_PUZZLE_TEXT})
        assert resp.status_code == 201
        body = resp.json()
        assert body["has_puzzle"] is True
        tree = client.get(f"/sessions/{body['id']}/tree").json()
        root = tree["cases"][0]
        assert root["equations"] == 36

    def test_create_from_grid_payload(self, client):
        resp = client.post(
            "/sessions",
            json={
                "grid": {
                    "size": 2,
                    "row_ops": [["-"], ["-"]],
                    "col_ops": [["-", "-"]],
                    "diag_ops": [["+"]],
                }
            },
        )
        assert resp.status_code == 201
        tree = client.get(f"/sessions/{resp.json()['id']}/tree").json()
        assert tree["cases"][0]["equations"] == 6

    def test_create_from_saved_session(self, client):
        wb = workbench_for(parse_system(TOY_SYSTEM))
        wb.run()
        first = make_session(client, TOY_SYSTEM, autorun=True)
        wait_idle(client, first["id"])
        saved = client.get(f"/sessions/{first['id']}/save").text
        resp = client.post("/sessions", json={"session": saved})
        assert resp.status_code == 201
        assert resp.json()["families"] == ["F1"]


class TestTreeAndCaseViews:
    def test_solved_toy_tree(self, client):
        handle = make_session(client, TOY_SYSTEM, autorun=True)
        wait_idle(client, handle["id"])
        tree = client.get(f"/sessions/{handle['id']}/tree").json()
        assert tree["summary"]["cases"] == 1
        assert tree["summary"]["families"] == ["F1"]
        (case,) = tree["cases"]
        assert case["status"] == "solved"
        assert case["children"] == []
        (fam,) = tree["families"]
        assert fam["id"] == "F1"
        assert fam["bindings"] == [
            {"var": "u1", "num": "0", "den": "1"},
            {"var": "u2", "num": "0", "den": "1"},
        ]

    def test_stuck_case_detail_lists_ranked_candidates(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        wait_idle(client, handle["id"])
        detail = client.get(f"/sessions/{handle['id']}/cases/1").json()
        assert detail["status"] == "awaiting-interaction"
        eq = detail["equations"][0]
        assert eq["terms"] == 4
        assert eq["degree"] == 4
        assert eq["vars"] == ["u1", "u2", "u3", "u4", "u5"]
        cands = detail["candidates"]
        assert cands, "stuck case must offer split candidates"
        assert cands[0]["index"] == 0
        wb = workbench_for(parse_system(STUCK_SYSTEM), SolveOptions(plist=tuple(STUCK_PLIST)))
        wb.run()
        expect = wb.candidates("1")
        assert [c["var"] for c in cands] == [f"u{c.var}" for c in expect]
        assert cands[0]["score"]["eq_terms"] == 4

    def test_unknown_ids_are_404(self, client):
        handle = make_session(client, TOY_SYSTEM)
        assert client.get("/sessions/zz/tree").status_code == 404
        assert client.get(f"/sessions/{handle['id']}/cases/9.9").status_code == 404


class TestApplyStep:
    def test_apply_split_then_resume_solves(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=RESUME_PLIST, autorun=True)
        idle = wait_idle(client, handle["id"])
        assert idle["statuses"] == {"awaiting-interaction": 1}
        resp = client.post(
            f"/sessions/{handle['id']}/steps",
            json={"case": "1", "module": "90", "version": idle["version"]},
        )
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["applied"] is True
        assert body["module"] == "90"
        assert body["version"] > idle["version"]
        assert client.post(f"/sessions/{handle['id']}/run").status_code == 202
        done = wait_idle(client, handle["id"])
        assert done["families"], "resumed run should find families"

    def test_apply_candidate_index(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        idle = wait_idle(client, handle["id"])
        detail = client.get(f"/sessions/{handle['id']}/cases/1").json()
        resp = client.post(
            f"/sessions/{handle['id']}/steps",
            json={"case": "1", "module": "90", "candidate": 0, "version": idle["version"]},
        )
        assert resp.status_code == 200
        assert "split along" in resp.json()["note"]
        assert f"u{detail['candidates'][0]['var'][1:]}" == detail["candidates"][0]["var"]

    def test_version_conflict_is_409(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        idle = wait_idle(client, handle["id"])
        first = client.post(
            f"/sessions/{handle['id']}/steps",
            json={"case": "1", "module": "90", "version": idle["version"]},
        )
        assert first.status_code == 200
        second = client.post(
            f"/sessions/{handle['id']}/steps",
            json={"case": "1", "module": "90", "version": idle["version"]},
        )
        assert second.status_code == 409
        assert "version conflict" in second.json()["detail"]

    def test_inapplicable_module_is_explained(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        wait_idle(client, handle["id"])
        resp = client.post(
            f"/sessions/{handle['id']}/steps", json={"case": "1", "module": "20"}
        )
        assert resp.status_code == 422
        assert "not applicable" in resp.json()["detail"]

    def test_unknown_module_and_candidate(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        wait_idle(client, handle["id"])
        resp = client.post(
            f"/sessions/{handle['id']}/steps", json={"case": "1", "module": "55"}
        )
        assert resp.status_code == 422
        resp = client.post(
            f"/sessions/{handle['id']}/steps",
            json={"case": "1", "module": "90", "candidate": 99},
        )
        assert resp.status_code == 422


class TestRunAndPause:
    def test_run_twice_conflicts_or_finishes(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST)
        assert client.post(f"/sessions/{handle['id']}/run").status_code == 202
        second = client.post(f"/sessions/{handle['id']}/run")
        assert second.status_code in (202, 409)
        wait_idle(client, handle["id"])

    def test_pause_is_idempotent_and_resumable(self, client):
        handle = make_session(client, TOY_SYSTEM)
        resp = client.post(f"/sessions/{handle['id']}/pause")
        assert resp.json()["running"] is False
        assert client.post(f"/sessions/{handle['id']}/run").status_code == 202
        done = wait_idle(client, handle["id"])
        assert done["families"] == ["F1"]


class TestEvents:
    def test_events_end_with_solution_and_run(self, client):
        handle = make_session(client, TOY_SYSTEM, autorun=True)
        wait_idle(client, handle["id"])
        body = client.get(f"/sessions/{handle['id']}/events").json()
        kinds = [line.split()[0] for line in body["events"]]
        assert "solution" in kinds
        assert kinds[-1] == "run"
        assert body["next"] == len(body["events"])

    def test_resume_from_version_skips_earlier_events(self, client):
        handle = make_session(client, TOY_SYSTEM, autorun=True)
        wait_idle(client, handle["id"])
        all_events = client.get(f"/sessions/{handle['id']}/events").json()
        cut = 2
        tail = client.get(f"/sessions/{handle['id']}/events", params={"start": cut}).json()
        assert tail["from"] == cut
        assert tail["events"] == all_events["events"][cut:]

    def test_snapshot_history_is_append_only(self, client):
        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        idle = wait_idle(client, handle["id"])
        before = client.get(f"/sessions/{handle['id']}/events").json()["events"]
        client.post(f"/sessions/{handle['id']}/steps", json={"case": "1", "module": "90"})
        after = client.get(f"/sessions/{handle['id']}/events").json()["events"]
        assert after[: len(before)] == before
        assert len(after) == len(before) + 1

    def test_sse_stream_replays_in_order(self, client):
        handle = make_session(client, TOY_SYSTEM, autorun=True)
        wait_idle(client, handle["id"])
        want = client.get(f"/sessions/{handle['id']}/events").json()["events"]
        with client.stream("GET", f"/sessions/{handle['id']}/events/stream") as resp:
            assert resp.headers["content-type"].startswith("text/event-stream")
            raw = "".join(chunk for chunk in resp.iter_text())
        frames = [f for f in raw.split("\n\n") if f]
        got = []
        for k, frame in enumerate(frames):
            head, data = frame.split("\n", 1)
            assert head == f"id: {k}"
            got.append(data.removeprefix("data: "))
        assert got == want

    def test_limit_event_surfaces(self, client):
        resp = client.post(
            "/sessions",
            json={
                "system": "var u1\nvar u2\nvar u3\neq u1*u2 + u3^2\n",
                "options": {"max_cases": 2},
                "autorun": True,
            },
        )
        assert resp.status_code == 201
        sid = resp.json()["id"]
        handle = wait_idle(client, sid)
        events = client.get(f"/sessions/{sid}/events").json()["events"]
        assert any(line.startswith("limit ") for line in events)
        assert handle["statuses"].get("resource-limit") == 1


class TestReplParity:
    def test_apply_and_resume_traces_match(self, client):
        opts = SolveOptions(plist=tuple(STUCK_PLIST))
        wb = workbench_for(parse_system(STUCK_SYSTEM), opts)
        wb.run()
        repl = Repl(wb, out=io.StringIO())
        repl.loop(io.StringIO("90\nquit\n"))
        want = list(wb.trace.lines)

        handle = make_session(client, STUCK_SYSTEM, plist=STUCK_PLIST, autorun=True)
        wait_idle(client, handle["id"])
        assert client.post(
            f"/sessions/{handle['id']}/steps", json={"case": "1", "module": "90"}
        ).status_code == 200
        assert client.post(f"/sessions/{handle['id']}/run").status_code == 202
        wait_idle(client, handle["id"])
        got = client.get(f"/sessions/{handle['id']}/events").json()["events"]
        assert got == want


class TestPuzzleEndpoints:
    def test_demo_puzzle_round_trip(self, client):
        body = client.get("/puzzles/demo").json()
        assert body["id"] == "demo"
        assert body["size"] == 7
        assert body["letters"] == list("abcdefghij")
        assert body["text"] == DEMO_PUZZLE_TEXT
        again = client.get("/puzzles/demo").json()
        assert again == body

    def test_posted_puzzle_readable(self, client):
        resp = client.post("/puzzles", json={"puzzle": "size 1\nconvention leading-zero=on\na\n"})
        assert resp.status_code == 201
        pid = resp.json()["id"]
        assert client.get(f"/puzzles/{pid}").json()["size"] == 1
        assert client.get("/puzzles/nope").status_code == 404

    def test_bad_puzzle_rejected(self, client):
        resp = client.post("/puzzles", json={"puzzle": "size 2\nbroken\n"})
        assert resp.status_code == 422

    def test_demo_check_all_zero(self, client):
        client.get("/puzzles/demo")
        resp = client.post("/puzzles/demo/check", json={"assignment": DEMO_ASSIGNMENT})
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] is True
        assert body["problems"] == []
        assert len(body["lines"]) == 36
        assert all(c["status"] == "zero" for c in body["lines"])
        assert all(c["residual"] == "0" for c in body["lines"])

    def test_perturbed_assignment_flags_lines(self, client):
        client.get("/puzzles/demo")
        wrong = dict(DEMO_ASSIGNMENT)
        wrong["a"], wrong["b"] = wrong["b"], wrong["a"]
        body = client.post("/puzzles/demo/check", json={"assignment": wrong}).json()
        assert body["ok"] is False
        assert any(c["status"] != "zero" for c in body["lines"])

    def test_non_injective_rejected(self, client):
        client.get("/puzzles/demo")
        bad = dict(DEMO_ASSIGNMENT)
        bad["a"] = bad["b"]
        resp = client.post("/puzzles/demo/check", json={"assignment": bad})
        assert resp.status_code == 400
        assert "not injective" in resp.json()["detail"]

    def test_partial_assignment_pends(self, client):
        client.get("/puzzles/demo")
        partial = {"a": 1, "b": 7}
        body = client.post("/puzzles/demo/check", json={"assignment": partial}).json()
        assert body["ok"] is False
        assert all(c["status"] == "pending" for c in body["lines"])

    def test_exact_residual_strings(self, client):
        pid = client.post(
            "/puzzles", json={"puzzle": "size 1\nconvention leading-zero=on\na/b\n"}
        ).json()["id"]
        body = client.post(
            f"/puzzles/{pid}/check", json={"assignment": {"a": 1, "b": 2}}
        ).json()
        assert body["lines"][0]["residual"] == "1/2"
        assert body["lines"][1]["residual"] == "1/2"

    def test_random_puzzle_endpoint(self, client):
        resp = client.post(
            "/puzzles/random",
            json={"size": 5, "times": 1, "div": 1, "seed": 0, "attempts": 10},
        )
        assert resp.status_code == 201
        body = resp.json()
        assert body["size"] == 5
        assert body["attempts"] >= 1
        assert client.get(f"/puzzles/{body['id']}").json()["text"] == body["text"]

    def test_random_puzzle_budget_error(self, client):
        resp = client.post("/puzzles/random", json={"attempts": 0, "seed": 1})
        assert resp.status_code == 422
