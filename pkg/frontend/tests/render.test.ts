/** The client-side ascii rendering must match the service's `text` field
 * byte for byte; the fixtures hold real service responses.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { renderPuzzleText } from "../src/render.js";
import type { PuzzleBody } from "../src/types.js";

function puzzle(name: string): PuzzleBody {
  const raw = readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
  return JSON.parse(raw) as PuzzleBody;
}

describe("renderPuzzleText", () => {
  it("matches the service text for the bundled demo puzzle", () => {
    const body = puzzle("demo_puzzle.json");
    expect(renderPuzzleText(body)).toBe(body.text);
  });

  it("matches the service text for a minimal one-cell puzzle", () => {
    const body = puzzle("tiny_puzzle.json");
    expect(renderPuzzleText(body)).toBe(body.text);
  });

  it("starts with the three header lines", () => {
    const body = puzzle("demo_puzzle.json");
    const lines = renderPuzzleText(body).split("\n");
    expect(lines[0]).toBe(`size ${body.size}`);
    expect(lines[1]).toBe(`convention leading-zero=${body.leading_zero ? "on" : "off"}`);
    expect(lines[2]).toBe(`diagonals ${body.diagonals}`);
    expect(lines).toHaveLength(3 + (2 * body.size - 1) + 1);
  });

  it("fails loudly on a malformed body instead of rendering garbage", () => {
    const body = puzzle("demo_puzzle.json");
    const broken = { ...body, cells: body.cells.slice(1) };
    expect(() => renderPuzzleText(broken)).toThrow(/no cell/);
  });
});
