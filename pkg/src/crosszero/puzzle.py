"""Letter puzzles over operator grids.

A puzzle replaces every cell of an operator grid by a letter
expression `[-]LETTERS[/LETTERS]`: an optional minus sign, a numeral
written with letters (one letter per decimal digit, most significant
first), and an optional denominator numeral.  A solution assigns a
distinct digit to every letter so that each line of the grid evaluates
to zero.

Text format: the first line is `size n`, the second
`convention leading-zero=<on|off>`, optionally followed by
`diagonals <all|main>`, then the 2n-1 interleaved grid rows with
single spaces between entries.  `#` starts a comment.  The JSON form
mirrors the same data.

Under the leading-zero convention (on by default) a numeral of two or
more letters may not start with the digit zero, while a single letter
may hold any digit; denominators must be nonzero as a whole.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Iterable, Mapping

from .cases import InstantiateError, SolutionFamily
from .grid import OPS, Line, OperatorGrid, lines_of

ALPHABET = "abcdefghij"

_CELL_RE = re.compile(r"^(-?)([a-z]+)(?:/([a-z]+))?$")


class PuzzleFormatError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(message + where)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class CellExpr:
    sign: int
    num: str
    den: str | None = None

    def __str__(self) -> str:
        text = ("-" if self.sign < 0 else "") + self.num
        if self.den is not None:
            text += "/" + self.den
        return text

    def letters(self) -> set[str]:
        return set(self.num) | set(self.den or "")

    def value(self, digits: Mapping[str, int]) -> Fraction:
        """Exact value under a letter to digit assignment; raises
        ZeroDivisionError when the denominator numeral is zero."""
        num = numeral_value(self.num, digits)
        if self.den is None:
            return Fraction(self.sign * num)
        den = numeral_value(self.den, digits)
        if den == 0:
            raise ZeroDivisionError(f"denominator {self.den!r} is zero")
        return Fraction(self.sign * num, den)


def numeral_value(s: str, digits: Mapping[str, int]) -> int:
    value = 0
    for ch in s:
        value = value * 10 + digits[ch]
    return value


def parse_cell(token: str) -> CellExpr:
    m = _CELL_RE.match(token)
    if not m:
        raise PuzzleFormatError(f"bad cell {token!r}")
    sign = -1 if m.group(1) else 1
    return CellExpr(sign, m.group(2), m.group(3))


@dataclass(frozen=True)
class Puzzle:
    grid: OperatorGrid
    leading_zero: bool = True
    diag_mode: str = "all"

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def letters(self) -> tuple[str, ...]:
        found: set[str] = set()
        for row in self.grid.cells:
            for cell in row:
                found |= cell.letters()
        return tuple(sorted(found))

    def lines(self) -> list[Line]:
        return lines_of(self.grid, self.diag_mode)

    def cell(self, pos: tuple[int, int]) -> CellExpr:
        return self.grid.cells[pos[0]][pos[1]]

    def multi_letter_numerals(self) -> list[str]:
        """All numerals of two or more letters, leading letter first."""
        out = []
        for row in self.grid.cells:
            for cell in row:
                if len(cell.num) > 1:
                    out.append(cell.num)
                if cell.den is not None and len(cell.den) > 1:
                    out.append(cell.den)
        return out


def parse_puzzle(text: str) -> Puzzle:
    if text.lstrip().startswith("{"):
        return puzzle_from_json(text)
    rows: list[tuple[int, str]] = []
    for line_no, raw in enumerate(text.split("\n"), start=1):
        hash_at = raw.find("#")
        if hash_at >= 0:
            raw = raw[:hash_at]
        if raw.strip():
            rows.append((line_no, raw.rstrip()))
    if not rows:
        raise PuzzleFormatError("empty puzzle")

    def header(expect: str) -> tuple[int, list[str]]:
        if not rows:
            raise PuzzleFormatError(f"missing {expect} header")
        line_no, line = rows.pop(0)
        parts = line.split()
        if parts[0] != expect:
            raise PuzzleFormatError(f"expected {expect} header, got {parts[0]!r}", line_no)
        return line_no, parts

    line_no, parts = header("size")
    if len(parts) != 2 or not parts[1].isdigit():
        raise PuzzleFormatError("size header needs one integer", line_no)
    n = int(parts[1])
    if n < 1:
        raise PuzzleFormatError("size must be at least 1", line_no)

    line_no, parts = header("convention")
    if len(parts) != 2 or parts[1] not in ("leading-zero=on", "leading-zero=off"):
        raise PuzzleFormatError("convention header needs leading-zero=<on|off>", line_no)
    leading_zero = parts[1].endswith("on")

    diag_mode = "all" if n >= 6 else "main"
    if rows and rows[0][1].split()[0] == "diagonals":
        line_no, line = rows.pop(0)
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("all", "main"):
            raise PuzzleFormatError("diagonals header needs all or main", line_no)
        diag_mode = parts[1]

    want = 2 * n - 1
    if len(rows) != want:
        raise PuzzleFormatError(f"expected {want} grid rows, found {len(rows)}")

    def tokens_of(line_no: int, line: str) -> list[tuple[int, str]]:
        out = []
        col = 1
        for token in line.split(" "):
            if token == "":
                raise PuzzleFormatError("extra space", line_no, col)
            out.append((col, token))
            col += len(token) + 1
        if len(out) != want:
            raise PuzzleFormatError(f"expected {want} entries, found {len(out)}", line_no)
        return out

    def op_at(line_no: int, col: int, token: str) -> str:
        if token not in OPS:
            raise PuzzleFormatError(f"bad operator {token!r}", line_no, col)
        return token

    cells: list[list[CellExpr]] = []
    row_ops: list[list[str]] = []
    col_ops: list[list[str]] = []
    diag_ops: list[list[str]] = []
    for k, (line_no, line) in enumerate(rows):
        entries = tokens_of(line_no, line)
        if k % 2 == 0:
            cell_row: list[CellExpr] = []
            op_row: list[str] = []
            for pos, (col, token) in enumerate(entries):
                if pos % 2 == 0:
                    try:
                        cell_row.append(parse_cell(token))
                    except PuzzleFormatError as exc:
                        raise PuzzleFormatError(str(exc), line_no, col) from None
                else:
                    op_row.append(op_at(line_no, col, token))
            cells.append(cell_row)
            row_ops.append(op_row)
        else:
            col_row: list[str] = []
            diag_row: list[str] = []
            for pos, (col, token) in enumerate(entries):
                target = col_row if pos % 2 == 0 else diag_row
                target.append(op_at(line_no, col, token))
            col_ops.append(col_row)
            diag_ops.append(diag_row)

    grid = OperatorGrid(
        n,
        tuple(tuple(r) for r in cells),
        tuple(tuple(r) for r in row_ops),
        tuple(tuple(r) for r in col_ops),
        tuple(tuple(r) for r in diag_ops),
    )
    puzzle = Puzzle(grid, leading_zero, diag_mode)
    if len(puzzle.letters) > 10:
        raise PuzzleFormatError(f"{len(puzzle.letters)} distinct letters cannot map to 10 digits")
    return puzzle


def render_puzzle(puzzle: Puzzle, fmt: str = "ascii") -> str:
    if fmt == "json":
        return puzzle_to_json(puzzle)
    if fmt != "ascii":
        raise PuzzleFormatError(f"unknown format {fmt!r}")
    g = puzzle.grid
    out = [
        f"size {g.n}",
        f"convention leading-zero={'on' if puzzle.leading_zero else 'off'}",
        f"diagonals {puzzle.diag_mode}",
    ]
    for i in range(g.n):
        parts = [str(g.cells[i][0])]
        for j in range(g.n - 1):
            parts.append(g.row_ops[i][j])
            parts.append(str(g.cells[i][j + 1]))
        out.append(" ".join(parts))
        if i < g.n - 1:
            parts = [g.col_ops[i][0]]
            for j in range(g.n - 1):
                parts.append(g.diag_ops[i][j])
                parts.append(g.col_ops[i][j + 1])
            out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def puzzle_to_json(puzzle: Puzzle) -> str:
    g = puzzle.grid
    blob = {
        "size": g.n,
        "convention": {"leading-zero": puzzle.leading_zero},
        "diagonals": puzzle.diag_mode,
        "cells": [[str(c) for c in row] for row in g.cells],
        "row_ops": [list(r) for r in g.row_ops],
        "col_ops": [list(r) for r in g.col_ops],
        "diag_ops": [list(r) for r in g.diag_ops],
    }
    return json.dumps(blob, indent=2) + "\n"


def puzzle_from_json(text: str) -> Puzzle:
    try:
        blob = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PuzzleFormatError(f"bad JSON: {exc}") from None
    try:
        n = int(blob["size"])
        leading_zero = bool(blob["convention"]["leading-zero"])
        diag_mode = blob.get("diagonals", "all" if n >= 6 else "main")
        cells = tuple(tuple(parse_cell(c) for c in row) for row in blob["cells"])
        grid = OperatorGrid(
            n,
            cells,
            tuple(tuple(r) for r in blob["row_ops"]),
            tuple(tuple(r) for r in blob["col_ops"]),
            tuple(tuple(r) for r in blob["diag_ops"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PuzzleFormatError(f"bad JSON puzzle: {exc}") from None
    puzzle = Puzzle(grid, leading_zero, diag_mode)
    if len(puzzle.letters) > 10:
        raise PuzzleFormatError(f"{len(puzzle.letters)} distinct letters cannot map to 10 digits")
    return puzzle


def digit_letters(seed: int) -> dict[int, str]:
    """Seeded bijection from digits 0..9 to the letters a..j."""
    letters = list(ALPHABET)
    Random(seed).shuffle(letters)
    return dict(enumerate(letters))


def instantiate(family: SolutionFamily, params: Mapping[int, Fraction | int], bound: int = 10**6) -> dict[int, Fraction]:
    """Concrete cell values from a solution family.

    Raises InstantiateError (retry with other parameters) when a bound
    denominator vanishes, a nonzero side condition fails, or any value
    outgrows the magnitude bound."""
    values = family.evaluate(params)
    for v, val in sorted(values.items()):
        if abs(val.numerator) > bound or val.denominator > bound:
            raise InstantiateError(f"u{v} = {val} exceeds the magnitude bound {bound}")
    return values


def encode_letters(
    grid: OperatorGrid,
    values: Mapping[int, Fraction],
    seed: int,
    leading_zero: bool = True,
    diag_mode: str = "all",
) -> tuple[Puzzle, dict[str, int]]:
    """Letter puzzle from concrete cell values, plus the intended
    letter to digit assignment.

    The grid's cells must be variable numbers covered by `values`.
    Signs are explicit, numerals are decimal digit strings, and a
    denominator appears only when a value is not an integer (already in
    lowest terms)."""
    letter_of = digit_letters(seed)

    def numeral(k: int) -> str:
        return "".join(letter_of[int(d)] for d in str(k))

    def enc(cell: object) -> CellExpr:
        val = Fraction(values[cell])
        sign = -1 if val < 0 else 1
        num = numeral(abs(val.numerator))
        den = numeral(val.denominator) if val.denominator != 1 else None
        return CellExpr(sign, num, den)

    puzzle = Puzzle(grid.map_cells(enc), leading_zero, diag_mode)
    used = set(puzzle.letters)
    assignment = {letter: digit for digit, letter in letter_of.items() if letter in used}
    return puzzle, assignment
