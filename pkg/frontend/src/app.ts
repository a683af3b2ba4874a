/** App shell: wires the panels to the service.
 *
 * State lives in small view models (TreeModel, PlayBoard); this file only
 * moves DOM events to API calls and re-renders the affected panel.  The
 * dashboard follows the session's event stream with a resumable cursor,
 * so a dropped connection or a tab switch never duplicates tree nodes.
 */

import { ApiClient, ApiError } from "./api.js";
import { PlayBoard } from "./board.js";
import { classifyStepFailure } from "./candidates.js";
import { EventFollower } from "./events.js";
import { renderPuzzleText } from "./render.js";
import { TreeModel } from "./tree.js";
import type { CaseDetail, PuzzleBody, SessionHandle } from "./types.js";
import {
  renderCandidates,
  renderCaseDetail,
  renderFamilies,
  renderLineLamps,
  renderPalette,
  renderPuzzleGrid,
  renderSessionList,
  renderSummary,
  renderTreeOutline,
} from "./views.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

class Dashboard {
  model = TreeModel.initial();
  handle: SessionHandle | null = null;
  sid: string | null = null;
  selectedCase: string | null = null;
  detail: CaseDetail | null = null;
  follower: EventFollower | null = null;
  banner = "";

  constructor(private readonly api: () => ApiClient) {}

  async open(sid: string): Promise<void> {
    this.follower?.stop();
    this.sid = sid;
    this.selectedCase = null;
    this.detail = null;
    this.banner = "";
    await this.refresh();
    this.follow();
  }

  /** Fresh snapshot; the follower then resumes from the snapshot version. */
  async refresh(): Promise<void> {
    if (this.sid === null) return;
    const api = this.api();
    this.handle = await api.getSession(this.sid);
    const tree = await api.getTree(this.sid);
    this.model = TreeModel.fromSnapshot(tree);
    this.model.running = this.handle.running;
    this.render();
  }

  private follow(): void {
    if (this.sid === null) return;
    const sid = this.sid;
    this.follower?.stop();
    const follower = new EventFollower(
      this.api(),
      sid,
      {
        onLine: (line) => {
          this.model.applyEventLine(line);
          this.renderTreePanels();
          appendLog(line);
        },
        onIdle: () => {
          void this.onIdle();
        },
        keepAlive: true,
        wait: 20,
      },
      this.model.snapshotVersion,
    );
    this.follower = follower;
    void follower.run();
  }

  private async onIdle(): Promise<void> {
    if (this.sid === null) return;
    const handle = await this.api().getSession(this.sid);
    const wasRunning = this.handle?.running ?? false;
    this.handle = handle;
    this.model.running = handle.running;
    if (wasRunning && !handle.running) {
      // Run just finished: pull exact statistics for the whole tree.
      await this.refresh();
      return;
    }
    this.renderTreePanels();
  }

  async selectCase(caseId: string): Promise<void> {
    if (this.sid === null) return;
    this.selectedCase = caseId;
    try {
      this.detail = await this.api().getCase(this.sid, caseId);
      this.banner = "";
    } catch (err) {
      this.detail = null;
      this.banner = err instanceof ApiError ? err.detail : String(err);
    }
    this.render();
  }

  async applyCandidate(caseId: string, module: string, candidate: number | null): Promise<void> {
    if (this.sid === null) return;
    const version = this.detail?.version ?? this.model.version;
    const request =
      candidate === null
        ? { case: caseId, module, version }
        : { case: caseId, module, candidate, version };
    try {
      const outcome = await this.api().applyStep(this.sid, request);
      this.banner = `applied ${outcome.module}: ${outcome.note}`;
    } catch (err) {
      const failure = classifyStepFailure(err);
      this.banner = failure.kind === "lost-race" ? failure.message : `${failure.kind}: ${failure.message}`;
    }
    await this.selectCase(caseId);
  }

  async runSession(): Promise<void> {
    if (this.sid === null) return;
    try {
      await this.api().run(this.sid);
      this.banner = "run started";
    } catch (err) {
      this.banner = err instanceof ApiError ? err.detail : String(err);
    }
    this.handle = await this.api().getSession(this.sid);
    this.model.running = this.handle.running;
    this.render();
  }

  async pauseSession(): Promise<void> {
    if (this.sid === null) return;
    await this.api().pause(this.sid);
    this.handle = await this.api().getSession(this.sid);
    this.model.running = this.handle.running;
    this.render();
  }

  renderTreePanels(): void {
    el("tree-summary").innerHTML = renderSummary(this.model, this.handle);
    el("tree-outline").innerHTML = renderTreeOutline(this.model, this.selectedCase);
    el("families").innerHTML = renderFamilies(this.model.familyDetails);
  }

  render(): void {
    this.renderTreePanels();
    el("step-banner").textContent = this.banner;
    if (this.detail === null) {
      el("case-detail").innerHTML = `<p class="empty">select a case to inspect it</p>`;
      el("candidates").innerHTML = "";
    } else {
      el("case-detail").innerHTML = renderCaseDetail(this.detail);
      el("candidates").innerHTML = renderCandidates(this.detail);
    }
  }
}

class Player {
  puzzle: PuzzleBody | null = null;
  board: PlayBoard | null = null;
  selectedLetter: string | null = null;
  message = "";
  private checkSeq = 0;

  constructor(private readonly api: () => ApiClient) {}

  async load(pid: string): Promise<void> {
    const api = this.api();
    this.puzzle = pid === "demo" ? await api.demoPuzzle() : await api.getPuzzle(pid);
    this.board = new PlayBoard(this.puzzle);
    this.selectedLetter = null;
    this.message = "";
    el<HTMLPreElement>("puzzle-text").textContent = renderPuzzleText(this.puzzle);
    this.render();
  }

  pickLetter(letter: string): void {
    this.selectedLetter = letter;
    this.render();
  }

  async pickDigit(digit: number | null): Promise<void> {
    if (this.board === null || this.selectedLetter === null) {
      this.message = "pick a letter first";
      this.render();
      return;
    }
    if (digit === null) {
      this.board.clear(this.selectedLetter);
      this.message = "";
    } else {
      const result = this.board.trySet(this.selectedLetter, digit);
      if (!result.ok) {
        this.message = `digit ${digit} is already held by ${result.conflict}`;
        this.render();
        return;
      }
      this.message = "";
    }
    this.render();
    await this.check();
  }

  /** Audit on every change; stale responses are dropped by sequence. */
  async check(): Promise<void> {
    if (this.puzzle === null || this.board === null) return;
    const seq = ++this.checkSeq;
    try {
      const report = await this.api().checkPuzzle(this.puzzle.id, this.board.assignmentPayload());
      if (seq !== this.checkSeq) return;
      this.board.setReport(report);
      this.message = this.board.isSolved() ? "solved: every line is exactly zero" : "";
    } catch (err) {
      if (seq !== this.checkSeq) return;
      this.message = err instanceof ApiError ? err.detail : String(err);
    }
    this.render();
  }

  render(): void {
    if (this.puzzle === null || this.board === null) return;
    el("puzzle-grid").innerHTML = renderPuzzleGrid(this.puzzle, this.board);
    el("palette").innerHTML = renderPalette(this.board, this.selectedLetter);
    el("lamps").innerHTML = renderLineLamps(this.board.lineStatuses());
    el("player-message").textContent = this.message;
  }
}

function appendLog(line: string): void {
  const log = el<HTMLPreElement>("event-log");
  log.textContent += line + "\n";
  log.scrollTop = log.scrollHeight;
}

function main(): void {
  const baseInput = el<HTMLInputElement>("base-url");
  baseInput.value = window.location.origin;
  const api = (): ApiClient => new ApiClient(baseInput.value);

  const dashboard = new Dashboard(api);
  const player = new Player(api);

  const refreshSessions = async (): Promise<void> => {
    const { sessions } = await api().listSessions();
    el("session-list").innerHTML = renderSessionList(sessions, dashboard.sid);
  };

  el("create-session").addEventListener("click", () => {
    void (async () => {
      const text = el<HTMLTextAreaElement>("system-text").value;
      const plist = el<HTMLInputElement>("plist").value.trim();
      const autorun = el<HTMLInputElement>("autorun").checked;
      const isPuzzle = text.trimStart().startsWith("size");
      try {
        const payload = {
          ...(isPuzzle ? { puzzle: text } : { system: text }),
          ...(plist === "" ? {} : { options: { plist } }),
          autorun,
        };
        const handle = await api().createSession(payload);
        await refreshSessions();
        await dashboard.open(handle.id);
        el("create-error").textContent = "";
      } catch (err) {
        el("create-error").textContent = err instanceof ApiError ? err.detail : String(err);
      }
    })();
  });

  el("refresh-sessions").addEventListener("click", () => void refreshSessions());
  el("session-list").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).closest("[data-session]");
    if (row instanceof HTMLElement && row.dataset["session"] !== undefined) {
      void dashboard.open(row.dataset["session"]).then(refreshSessions);
    }
  });

  el("tree-outline").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).closest("[data-case]");
    if (row instanceof HTMLElement && row.dataset["case"] !== undefined) {
      void dashboard.selectCase(row.dataset["case"]);
    }
  });

  el("candidates").addEventListener("click", (ev) => {
    const button = (ev.target as HTMLElement).closest("button[data-apply]");
    if (button instanceof HTMLElement) {
      const module = button.dataset["apply"] ?? "90";
      const caseId = button.dataset["case"] ?? "";
      const raw = button.dataset["candidate"];
      void dashboard.applyCandidate(caseId, module, raw === undefined ? null : Number.parseInt(raw, 10));
    }
  });

  el("apply-module").addEventListener("click", () => {
    const moduleCode = el<HTMLInputElement>("module-code").value.trim();
    if (dashboard.selectedCase !== null && moduleCode !== "") {
      void dashboard.applyCandidate(dashboard.selectedCase, moduleCode, null);
    }
  });

  el("run-session").addEventListener("click", () => void dashboard.runSession());
  el("pause-session").addEventListener("click", () => void dashboard.pauseSession());
  el("refresh-tree").addEventListener("click", () => void dashboard.refresh());

  el("load-demo").addEventListener("click", () => void player.load("demo"));
  el("load-puzzle").addEventListener("click", () => {
    const pid = el<HTMLInputElement>("puzzle-id").value.trim();
    if (pid !== "") {
      void player.load(pid);
    }
  });

  el("palette").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const letterButton = target.closest("[data-pick-letter]");
    if (letterButton instanceof HTMLElement && letterButton.dataset["pickLetter"] !== undefined) {
      player.pickLetter(letterButton.dataset["pickLetter"]);
      return;
    }
    const digitButton = target.closest("[data-pick-digit]");
    if (digitButton instanceof HTMLElement && digitButton.dataset["pickDigit"] !== undefined) {
      void player.pickDigit(Number.parseInt(digitButton.dataset["pickDigit"], 10));
      return;
    }
    if (target.closest("[data-clear-letter]") !== null) {
      void player.pickDigit(null);
    }
  });

  el("puzzle-grid").addEventListener("click", (ev) => {
    const cell = (ev.target as HTMLElement).closest("[data-letter]");
    if (cell instanceof HTMLElement && cell.dataset["letter"] !== undefined) {
      player.pickLetter(cell.dataset["letter"]);
    }
  });

  void refreshSessions();
}

document.addEventListener("DOMContentLoaded", main);
