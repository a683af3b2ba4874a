/** Thin typed client for the steering service.
 *
 * All algebra stays on the server; this layer only moves JSON.  The fetch
 * implementation is injectable so tests can point the client at a spawned
 * service (or a stub) without touching globals.
 */

import type {
  CaseDetail,
  CheckReport,
  CreateSessionRequest,
  EventBatch,
  PauseResponse,
  PuzzleBody,
  RandomPuzzleRequest,
  RunResponse,
  SessionHandle,
  StepRequest,
  StepResponse,
  TreeResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

async function errorDetail(resp: Response): Promise<string> {
  const text = await resp.text();
  try {
    const body: unknown = JSON.parse(text);
    if (body && typeof body === "object" && "detail" in body) {
      const detail = (body as { detail: unknown }).detail;
      return typeof detail === "string" ? detail : JSON.stringify(detail);
    }
  } catch {
    // not JSON; fall through to the raw text
  }
  return text;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return (await resp.json()) as T;
  }

  // -- sessions --------------------------------------------------------------

  createSession(payload: CreateSessionRequest): Promise<SessionHandle> {
    return this.request("POST", "/sessions", payload);
  }

  listSessions(): Promise<{ sessions: SessionHandle[] }> {
    return this.request("GET", "/sessions");
  }

  getSession(sid: string): Promise<SessionHandle> {
    return this.request("GET", `/sessions/${sid}`);
  }

  deleteSession(sid: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/sessions/${sid}`);
  }

  getTree(sid: string): Promise<TreeResponse> {
    return this.request("GET", `/sessions/${sid}/tree`);
  }

  getCase(sid: string, caseId: string): Promise<CaseDetail> {
    return this.request("GET", `/sessions/${sid}/cases/${caseId}`);
  }

  applyStep(sid: string, step: StepRequest): Promise<StepResponse> {
    return this.request("POST", `/sessions/${sid}/steps`, step);
  }

  run(sid: string): Promise<RunResponse> {
    return this.request("POST", `/sessions/${sid}/run`);
  }

  pause(sid: string): Promise<PauseResponse> {
    return this.request("POST", `/sessions/${sid}/pause`);
  }

  getEvents(sid: string, start = 0, wait = 0): Promise<EventBatch> {
    const tail = wait > 0 ? `&wait=${wait}` : "";
    return this.request("GET", `/sessions/${sid}/events?start=${start}${tail}`);
  }

  async saveSession(sid: string): Promise<string> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sid}/save`, { method: "GET" });
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return resp.text();
  }

  // -- puzzles ---------------------------------------------------------------

  demoPuzzle(): Promise<PuzzleBody> {
    return this.request("GET", "/puzzles/demo");
  }

  getPuzzle(pid: string): Promise<PuzzleBody> {
    return this.request("GET", `/puzzles/${pid}`);
  }

  addPuzzle(text: string): Promise<PuzzleBody> {
    return this.request("POST", "/puzzles", { puzzle: text });
  }

  randomPuzzle(config: RandomPuzzleRequest): Promise<PuzzleBody> {
    return this.request("POST", "/puzzles/random", config);
  }

  checkPuzzle(pid: string, assignment: Record<string, number | null>): Promise<CheckReport> {
    return this.request("POST", `/puzzles/${pid}/check`, { assignment });
  }
}
