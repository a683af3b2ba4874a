/** Play-board state for the puzzle player.
 *
 * Holds the partial letter-to-digit assignment and the latest line report.
 * Injectivity is enforced at input time: assigning a digit that another
 * letter already holds is rejected before anything reaches the service.
 * Residual classification always comes from the service; the board only
 * stores what it was told.
 */

import type { CheckLine, CheckReport, PuzzleBody } from "./types.js";

export type SetResult = { ok: true } | { ok: false; conflict: string };

export class PlayBoard {
  readonly letters: string[];
  private readonly digits = new Map<string, number>();
  report: CheckReport | null = null;

  constructor(puzzle: PuzzleBody) {
    this.letters = [...puzzle.letters];
  }

  digitOf(letter: string): number | null {
    return this.digits.get(letter) ?? null;
  }

  /** Letter currently holding a digit, if any. */
  holderOf(digit: number): string | null {
    for (const [letter, held] of this.digits) {
      if (held === digit) {
        return letter;
      }
    }
    return null;
  }

  trySet(letter: string, digit: number): SetResult {
    if (!this.letters.includes(letter)) {
      return { ok: false, conflict: letter };
    }
    if (!Number.isInteger(digit) || digit < 0 || digit > 9) {
      return { ok: false, conflict: letter };
    }
    const holder = this.holderOf(digit);
    if (holder !== null && holder !== letter) {
      return { ok: false, conflict: holder };
    }
    this.digits.set(letter, digit);
    return { ok: true };
  }

  clear(letter: string): void {
    this.digits.delete(letter);
  }

  clearAll(): void {
    this.digits.clear();
  }

  /** Wire payload: unset letters are sent as nulls, which the service skips. */
  assignmentPayload(): Record<string, number | null> {
    const out: Record<string, number | null> = {};
    for (const letter of this.letters) {
      out[letter] = this.digitOf(letter);
    }
    return out;
  }

  setReport(report: CheckReport): void {
    this.report = report;
  }

  lineStatuses(): CheckLine[] {
    return this.report === null ? [] : this.report.lines;
  }

  /** True when the service reported every line as exactly zero. */
  isSolved(): boolean {
    return (
      this.report !== null &&
      this.report.ok &&
      this.report.lines.length > 0 &&
      this.report.lines.every((line) => line.status === "zero")
    );
  }

  complete(): boolean {
    return this.letters.every((letter) => this.digitOf(letter) !== null);
  }
}
