/** End-to-end checks against a live service process.
 *
 * The two headline guarantees: the step trace produced by driving the
 * dashboard (apply module 90, resume the run) is byte-for-byte the trace
 * the terminal REPL produces for the same session, and the puzzle player
 * goes all green exactly for the bundled puzzle's unique assignment while
 * flagging every single-digit perturbation of it.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { PlayBoard } from "../src/board.js";
import { classifyStepFailure, moduleStepRequest } from "../src/candidates.js";
import { EventFollower } from "../src/events.js";
import { renderPuzzleText } from "../src/render.js";
import { TreeModel, structuralViewOfSnapshot } from "../src/tree.js";
import type { SessionHandle } from "../src/types.js";
import { startService, pythonOracle, type ServiceHandle } from "./helpers/service.js";

const STUCK_SYSTEM =
  "var u1\nvar u2\nvar u3\nvar u4\nvar u5\n" +
  "eq u1^2*u2^2 - u1^2*u3^2 + u5^2*u1 + u4^2\n";
const STUCK_PLIST = ["1", "89", "20", "21", "38"];
const RESUME_PLIST = ["1", "89", "20", "21", "77", "47", "38"];

const DEMO_ASSIGNMENT: Record<string, number> = {
  a: 1, b: 7, c: 4, d: 6, e: 2, f: 5, g: 0, h: 3, i: 8, j: 9,
};

const REPL_ORACLE = `
import io, json, sys
from crosszero.cli import Repl
from crosszero.session import parse_system, workbench_for
from crosszero.solver import SolveOptions

system = ${JSON.stringify(STUCK_SYSTEM)}
opts = SolveOptions(plist=(${STUCK_PLIST.map((m) => JSON.stringify(m)).join(", ")},))
wb = workbench_for(parse_system(system), opts)
wb.run()
repl = Repl(wb, out=io.StringIO())
repl.loop(io.StringIO("90\\nquit\\n"))
sys.stdout.write(json.dumps(wb.trace.lines))
`;

let service: ServiceHandle;
let api: ApiClient;

beforeAll(async () => {
  service = await startService();
  api = new ApiClient(service.baseUrl);
});

afterAll(() => {
  service?.stop();
});

async function waitIdle(sid: string, budgetMs = 60_000): Promise<SessionHandle> {
  const deadline = Date.now() + budgetMs;
  for (;;) {
    const handle = await api.getSession(sid);
    if (!handle.running) {
      return handle;
    }
    if (Date.now() > deadline) {
      throw new Error(`session ${sid} never went idle`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

describe("dashboard steering parity", () => {
  it("clicking apply-90 then resume reproduces the REPL trace byte for byte", async () => {
    const want = JSON.parse(pythonOracle(REPL_ORACLE)) as string[];
    expect(want.length).toBeGreaterThan(2);

    const handle = await api.createSession({
      system: STUCK_SYSTEM,
      options: { plist: STUCK_PLIST },
      autorun: true,
    });
    await waitIdle(handle.id);

    // The dashboard's apply button sends the selected module for the
    // selected case, then the resume button starts the background run.
    const detail = await api.getCase(handle.id, "1");
    expect(detail.status).toBe("awaiting-interaction");
    const step = await api.applyStep(handle.id, moduleStepRequest("1", "90", detail.version));
    expect(step.applied).toBe(true);
    await api.run(handle.id);
    await waitIdle(handle.id);

    const got: string[] = [];
    const follower = new EventFollower(api, handle.id, {
      onLine: (line) => got.push(line),
    });
    await follower.run();
    expect(got).toEqual(want);
  });

  it("a stale snapshot version loses the race with a clear banner", async () => {
    const handle = await api.createSession({
      system: STUCK_SYSTEM,
      options: { plist: STUCK_PLIST },
      autorun: true,
    });
    const idle = await waitIdle(handle.id);
    const first = await api.applyStep(handle.id, moduleStepRequest("1", "90", idle.version));
    expect(first.version).toBeGreaterThan(idle.version);
    try {
      await api.applyStep(handle.id, moduleStepRequest("1", "90", idle.version));
      expect.unreachable("second step should conflict");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      const failure = classifyStepFailure(err);
      expect(failure.kind).toBe("lost-race");
      expect(failure.message).toContain("another step won");
    }
  });

  it("the service refuses inapplicable steps with a reason the banner shows verbatim", async () => {
    const handle = await api.createSession({
      system: "var u1\nvar u2\neq u1 + u2\neq u1 - u2\n",
      autorun: true,
    });
    await waitIdle(handle.id);
    try {
      await api.applyStep(handle.id, { case: "1", module: "90" });
      expect.unreachable("module 90 has nothing to split on a solved case");
    } catch (err) {
      const failure = classifyStepFailure(err);
      expect(["not-applicable", "error"]).toContain(failure.kind);
      expect(failure.message.length).toBeGreaterThan(0);
    }
  });
});

describe("event stream resume", () => {
  it("following events from a mid-run snapshot ends in the fresh-fetch tree", async () => {
    const handle = await api.createSession({
      system: STUCK_SYSTEM,
      options: { plist: RESUME_PLIST },
      autorun: true,
    });
    await waitIdle(handle.id);

    // Snapshot mid-session, then steer and resume: the model follows the
    // stream from the snapshot version, never refetching the tree.
    const snapshot = await api.getTree(handle.id);
    const model = TreeModel.fromSnapshot(snapshot);
    await api.applyStep(handle.id, { case: "1", module: "90", version: snapshot.version });
    await api.run(handle.id);
    await waitIdle(handle.id);

    const follower = new EventFollower(
      api,
      handle.id,
      { onLine: (line) => model.applyEventLine(line) },
      model.snapshotVersion,
    );
    await follower.run();

    const fresh = await api.getTree(handle.id);
    expect(model.structuralView()).toEqual(structuralViewOfSnapshot(fresh));
    expect(model.version).toBe(fresh.version);
    expect(model.families).toEqual(fresh.summary.families);
  });

  it("replaying from scratch equals the fresh fetch and duplicates nothing", async () => {
    const handle = await api.createSession({
      system: STUCK_SYSTEM,
      options: { plist: RESUME_PLIST },
      autorun: true,
    });
    await waitIdle(handle.id);
    await api.applyStep(handle.id, { case: "1", module: "90" });
    await api.run(handle.id);
    await waitIdle(handle.id);

    const model = TreeModel.initial();
    const seen = new Set<string>();
    const follower = new EventFollower(api, handle.id, {
      onLine: (line, cursor) => {
        expect(seen.has(`${cursor}`)).toBe(false);
        seen.add(`${cursor}`);
        model.applyEventLine(line);
      },
    });
    await follower.run();

    const fresh = await api.getTree(handle.id);
    expect(model.structuralView()).toEqual(structuralViewOfSnapshot(fresh));
    const ids = [...model.nodes.keys()];
    expect(new Set(ids).size).toBe(ids.length);
  });
});

describe("puzzle player", () => {
  it("renders the demo grid text exactly as the service does", async () => {
    const body = await api.demoPuzzle();
    expect(renderPuzzleText(body)).toBe(body.text);
  });

  it("shows all lines green exactly for the unique assignment", async () => {
    const body = await api.demoPuzzle();
    const board = new PlayBoard(body);
    for (const [letter, digit] of Object.entries(DEMO_ASSIGNMENT)) {
      expect(board.trySet(letter, digit)).toEqual({ ok: true });
    }
    const report = await api.checkPuzzle(body.id, board.assignmentPayload());
    board.setReport(report);
    expect(report.ok).toBe(true);
    expect(report.lines).toHaveLength(36);
    expect(report.lines.every((line) => line.status === "zero")).toBe(true);
    expect(report.lines.every((line) => line.residual === "0")).toBe(true);
    expect(board.isSolved()).toBe(true);
  });

  it("flags every single-digit perturbation of the unique assignment", async () => {
    const body = await api.demoPuzzle();
    for (const letter of Object.keys(DEMO_ASSIGNMENT)) {
      const perturbed: Record<string, number | null> = { ...DEMO_ASSIGNMENT };
      perturbed[letter] = (DEMO_ASSIGNMENT[letter]! + 1) % 10;
      // The board itself blocks this input: the digit belongs to another
      // letter.  Force it through the wire anyway; the service must also
      // refuse or report a broken line.
      const board = new PlayBoard(body);
      for (const [other, digit] of Object.entries(DEMO_ASSIGNMENT)) {
        if (other !== letter) board.trySet(other, digit);
      }
      const result = board.trySet(letter, perturbed[letter]!);
      expect(result.ok).toBe(false);
      try {
        const report = await api.checkPuzzle(body.id, perturbed);
        expect(report.lines.some((line) => line.status !== "zero")).toBe(true);
        expect(report.ok).toBe(false);
      } catch (err) {
        expect(err).toBeInstanceOf(ApiError);
        expect((err as ApiError).status).toBe(400);
        expect((err as ApiError).detail).toContain("not injective");
      }
    }
  });

  it("flags injective but wrong assignments through the line lamps", async () => {
    const body = await api.demoPuzzle();
    const swapped: Record<string, number | null> = { ...DEMO_ASSIGNMENT };
    swapped["a"] = DEMO_ASSIGNMENT["b"]!;
    swapped["b"] = DEMO_ASSIGNMENT["a"]!;
    const report = await api.checkPuzzle(body.id, swapped);
    expect(report.ok).toBe(false);
    expect(report.lines.some((line) => line.status === "nonzero" || line.status === "divzero")).toBe(true);
  });

  it("reports pending lines for a partial assignment", async () => {
    const body = await api.demoPuzzle();
    const board = new PlayBoard(body);
    board.trySet("a", 1);
    const report = await api.checkPuzzle(body.id, board.assignmentPayload());
    expect(report.ok).toBe(false);
    expect(report.lines.some((line) => line.status === "pending")).toBe(true);
  });
});
