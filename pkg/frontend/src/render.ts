/** Text rendering of a puzzle body.
 *
 * `renderPuzzleText` mirrors the service's own ascii renderer byte for
 * byte: three header lines, then cell rows interleaved with operator rows.
 * The snapshot test pins it against the `text` field the service sends, so
 * any drift between the two renderers fails loudly.
 */

import type { PuzzleBody } from "./types.js";

export function renderPuzzleText(puzzle: PuzzleBody): string {
  const n = puzzle.size;
  const out: string[] = [
    `size ${n}`,
    `convention leading-zero=${puzzle.leading_zero ? "on" : "off"}`,
    `diagonals ${puzzle.diagonals}`,
  ];
  for (let i = 0; i < n; i++) {
    const row: string[] = [cell(puzzle, i, 0)];
    for (let j = 0; j < n - 1; j++) {
      row.push(op(puzzle.row_ops, i, j));
      row.push(cell(puzzle, i, j + 1));
    }
    out.push(row.join(" "));
    if (i < n - 1) {
      const ops: string[] = [op(puzzle.col_ops, i, 0)];
      for (let j = 0; j < n - 1; j++) {
        ops.push(op(puzzle.diag_ops, i, j));
        ops.push(op(puzzle.col_ops, i, j + 1));
      }
      out.push(ops.join(" "));
    }
  }
  return out.join("\n") + "\n";
}

function cell(puzzle: PuzzleBody, i: number, j: number): string {
  const value = puzzle.cells[i]?.[j];
  if (value === undefined) {
    throw new Error(`puzzle body has no cell (${i}, ${j})`);
  }
  return value;
}

function op(rows: string[][], i: number, j: number): string {
  const value = rows[i]?.[j];
  if (value === undefined) {
    throw new Error(`puzzle body has no operator (${i}, ${j})`);
  }
  return value;
}
