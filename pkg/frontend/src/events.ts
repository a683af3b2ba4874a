/** Event-stream plumbing: an SSE frame parser and a long-poll follower.
 *
 * The service offers the same append-only log twice: as server-sent events
 * (`/events/stream`) and as a long-poll batch endpoint (`/events`).  Both
 * address lines by cursor, so a consumer that remembers the next cursor can
 * reconnect after any interruption without missing or duplicating lines.
 */

import type { ApiClient } from "./api.js";

export interface SseFrame {
  id: number | null;
  data: string;
}

export interface SseParseResult {
  frames: SseFrame[];
  rest: string;
}

/** Incremental SSE parser: feed it a buffer, keep `rest` for the next read.
 *
 * Handles frames split across chunk boundaries.  Only `id:` and `data:`
 * fields are used; the stream emits exactly one of each per frame.
 */
export function parseSseBuffer(buffer: string): SseParseResult {
  const frames: SseFrame[] = [];
  let rest = buffer;
  for (;;) {
    const gap = rest.indexOf("\n\n");
    if (gap < 0) {
      break;
    }
    const raw = rest.slice(0, gap);
    rest = rest.slice(gap + 2);
    let id: number | null = null;
    const data: string[] = [];
    for (const fieldLine of raw.split("\n")) {
      if (fieldLine.startsWith("id:")) {
        const parsed = Number.parseInt(fieldLine.slice(3).trim(), 10);
        id = Number.isNaN(parsed) ? null : parsed;
      } else if (fieldLine.startsWith("data:")) {
        data.push(fieldLine.slice(5).replace(/^ /, ""));
      }
    }
    if (data.length > 0 || id !== null) {
      frames.push({ id, data: data.join("\n") });
    }
  }
  return { frames, rest };
}

/** Cursor to resume from after the last seen frame. */
export function nextCursor(frames: SseFrame[], fallback: number): number {
  let cursor = fallback;
  for (const frame of frames) {
    if (frame.id !== null && frame.id + 1 > cursor) {
      cursor = frame.id + 1;
    }
  }
  return cursor;
}

export interface FollowerOptions {
  /** Called once per event line, in log order. */
  onLine: (line: string, cursor: number) => void;
  /** Called when the log is drained and the session is idle. */
  onIdle?: () => void;
  /** Long-poll wait in seconds (server caps at 30). */
  wait?: number;
  /** Keep polling after the session goes idle (dashboard mode). */
  keepAlive?: boolean;
  /** Delay between retries after a transport error, in ms. */
  retryDelayMs?: number;
}

/** Long-poll follower over the batch endpoint with resume-from-cursor.
 *
 * `run()` resolves once the session is idle and the log is drained (unless
 * `keepAlive` keeps it watching).  `stop()` makes the loop exit after the
 * in-flight poll.  A new follower can resume from `cursor` at any time;
 * replaying never duplicates lines because the cursor only moves forward.
 */
export class EventFollower {
  cursor: number;
  private stopped = false;

  constructor(
    private readonly api: ApiClient,
    private readonly sid: string,
    private readonly options: FollowerOptions,
    startCursor = 0,
  ) {
    this.cursor = startCursor;
  }

  stop(): void {
    this.stopped = true;
  }

  async run(): Promise<void> {
    const wait = this.options.wait ?? 20;
    while (!this.stopped) {
      let batch;
      try {
        batch = await this.api.getEvents(this.sid, this.cursor, wait);
      } catch {
        if (this.stopped) {
          return;
        }
        await sleep(this.options.retryDelayMs ?? 500);
        continue;
      }
      if (batch.from !== this.cursor) {
        // Server answered a different window; re-poll from our cursor.
        continue;
      }
      for (const line of batch.events) {
        this.options.onLine(line, this.cursor);
        this.cursor += 1;
      }
      // The log was read up to our cursor and no run is going, so the
      // stream is drained; nothing more can arrive without a new step.
      if (!batch.running) {
        this.options.onIdle?.();
        if (!this.options.keepAlive) {
          return;
        }
        await sleep(this.options.retryDelayMs ?? 500);
      }
    }
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
