"""Operator grids and their line conditions.

An n by n grid of cells is interleaved with operators into a
(2n-1) x (2n-1) matrix: cells sit at even/even positions, operators
between horizontal neighbours at even/odd, between vertical neighbours
at odd/even, and the odd/odd positions hold the diagonal operators.
One stored diagonal operator serves both diagonal steps that cross at
its position: the step (r,c) -> (r+1,c+1) and the step
(r,c+1) -> (r+1,c) both read diag_ops[r][c].

Every line (row, column, or diagonal) evaluates with * and / binding
tighter than + and -, equal precedence associating left to right, and
must equal zero.  Clearing denominators turns each line into one
polynomial equation; every cell that ever divides is recorded as a
nonzero side condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, Iterable, Mapping, Sequence

from .poly import Poly

OPS = ("+", "-", "*", "/")

Pos = tuple[int, int]


class GridError(Exception):
    pass


def _check_ops(rows: Sequence[Sequence[str]], want_rows: int, want_cols: int, what: str) -> None:
    if len(rows) != want_rows or any(len(r) != want_cols for r in rows):
        raise GridError(f"{what} must be {want_rows} x {want_cols}")
    for r in rows:
        for op in r:
            if op not in OPS:
                raise GridError(f"bad operator {op!r} in {what}")


@dataclass(frozen=True)
class OperatorGrid:
    """Cells may be variable numbers (ints) or any cell payload such as
    the letter expressions of a puzzle."""

    n: int
    cells: tuple[tuple[object, ...], ...]
    row_ops: tuple[tuple[str, ...], ...]
    col_ops: tuple[tuple[str, ...], ...]
    diag_ops: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        n = self.n
        if n < 1:
            raise GridError("grid size must be at least 1")
        if len(self.cells) != n or any(len(r) != n for r in self.cells):
            raise GridError(f"cells must be {n} x {n}")
        _check_ops(self.row_ops, n, n - 1, "row_ops")
        _check_ops(self.col_ops, n - 1, n, "col_ops")
        _check_ops(self.diag_ops, n - 1, n - 1, "diag_ops")

    def op_count(self, op: str) -> int:
        groups = (self.row_ops, self.col_ops, self.diag_ops)
        return sum(row.count(op) for g in groups for row in g)

    def map_cells(self, f: Callable[[object], object]) -> "OperatorGrid":
        return OperatorGrid(
            self.n,
            tuple(tuple(f(c) for c in row) for row in self.cells),
            self.row_ops,
            self.col_ops,
            self.diag_ops,
        )


def var_grid(n: int, row_ops, col_ops, diag_ops) -> OperatorGrid:
    """Grid whose cells are the variables u1..u(n*n), row-major."""
    cells = tuple(tuple(i * n + j + 1 for j in range(n)) for i in range(n))
    return OperatorGrid(n, cells, _t(row_ops), _t(col_ops), _t(diag_ops))


def _t(rows) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(r) for r in rows)


def cell_var(n: int, pos: Pos) -> int:
    return pos[0] * n + pos[1] + 1


@dataclass(frozen=True)
class Line:
    kind: str  # row | col | diag-dr | diag-dl
    label: str
    cells: tuple[Pos, ...]
    ops: tuple[str, ...]


def lines_of(grid: OperatorGrid, diag_mode: str = "all") -> list[Line]:
    """All line conditions of the grid.

    diag_mode "all": every down-right and down-left diagonal with at
    least two cells (2*(2n-3) of them); "main": only the two main
    diagonals (none for a 1 x 1 grid)."""
    if diag_mode not in ("all", "main"):
        raise GridError(f"bad diagonal mode {diag_mode!r}")
    n = grid.n
    out: list[Line] = []
    for i in range(n):
        cells = tuple((i, j) for j in range(n))
        out.append(Line("row", f"row{i + 1}", cells, tuple(grid.row_ops[i])))
    for j in range(n):
        cells = tuple((i, j) for i in range(n))
        out.append(Line("col", f"col{j + 1}", cells, tuple(grid.col_ops[i][j] for i in range(n - 1))))

    def dr_line(delta: int) -> Line:
        # cells with i - j = delta, top to bottom
        i0 = max(delta, 0)
        j0 = i0 - delta
        length = n - abs(delta)
        cells = tuple((i0 + t, j0 + t) for t in range(length))
        ops = tuple(grid.diag_ops[i][j] for (i, j) in cells[:-1])
        return Line("diag-dr", f"dr{delta + n - 1}", cells, ops)

    def dl_line(s: int) -> Line:
        # cells with i + j = s, top to bottom
        i0 = max(0, s - n + 1)
        length = min(n - 1, s) - i0 + 1
        cells = tuple((i0 + t, s - i0 - t) for t in range(length))
        ops = tuple(grid.diag_ops[i][j - 1] for (i, j) in cells[:-1])
        return Line("diag-dl", f"dl{s}", cells, ops)

    if diag_mode == "all":
        for delta in range(-(n - 2), n - 1):
            out.append(dr_line(delta))
        for s in range(1, 2 * n - 2):
            out.append(dl_line(s))
    elif n >= 2:
        out.append(dr_line(0))
        out.append(dl_line(n - 1))
    return out


def line_terms(line: Line) -> list[tuple[int, list[Pos], list[Pos]]]:
    """Split a line into +/- separated terms of multiplied and divided
    cells: a list of (sign, numerator cells, denominator cells)."""
    terms: list[tuple[int, list[Pos], list[Pos]]] = []
    sign = 1
    num: list[Pos] = [line.cells[0]]
    den: list[Pos] = []
    for op, cell in zip(line.ops, line.cells[1:]):
        if op in ("+", "-"):
            terms.append((sign, num, den))
            sign = 1 if op == "+" else -1
            num, den = [cell], []
        elif op == "*":
            num.append(cell)
        else:
            den.append(cell)
    terms.append((sign, num, den))
    return terms


def eval_line(line: Line, values: Mapping[Pos, Fraction | int]) -> Fraction:
    """Exact value of the line; raises ZeroDivisionError when a divisor
    cell is zero."""
    total = Fraction(0)
    for sign, num, den in line_terms(line):
        val = Fraction(sign)
        for pos in num:
            val *= Fraction(values[pos])
        for pos in den:
            d = Fraction(values[pos])
            if d == 0:
                raise ZeroDivisionError(f"cell {pos} divides and is zero")
            val /= d
        total += val
    return total


def line_poly(line: Line, n: int) -> tuple[Poly, list[int]]:
    """The cleared polynomial of one line over cell variables, plus the
    divisor variables in order of first appearance.

    Each term sign*N/D contributes sign * N * (product of the other
    terms' denominators), which is the line value times the product of
    all denominators."""
    terms = line_terms(line)
    divisors: list[int] = []
    seen: set[int] = set()
    den_polys: list[Poly] = []
    for _, _, den in terms:
        d = Poly.one()
        for pos in den:
            v = cell_var(n, pos)
            d = d * Poly.var(v)
            if v not in seen:
                seen.add(v)
                divisors.append(v)
        den_polys.append(d)
    total = Poly.zero()
    for i, (sign, num, _) in enumerate(terms):
        t = Poly.const(sign)
        for pos in num:
            t = t * Poly.var(cell_var(n, pos))
        for j, d in enumerate(den_polys):
            if j != i:
                t = t * d
        total = total + t
    return total, divisors


@dataclass(frozen=True)
class GridSystem:
    n: int
    diag_mode: str
    lines: tuple[Line, ...]
    equations: tuple[Poly, ...]
    inequalities: tuple[Poly, ...]
    var_ids: tuple[int, ...]


def grid_to_system(grid: OperatorGrid, diag_mode: str = "all") -> GridSystem:
    """One polynomial equation per line, denominators cleared; the
    inequalities are exactly the divisor cell variables."""
    lines = lines_of(grid, diag_mode)
    equations: list[Poly] = []
    divisors: list[int] = []
    seen: set[int] = set()
    for line in lines:
        p, divs = line_poly(line, grid.n)
        equations.append(p)
        for v in divs:
            if v not in seen:
                seen.add(v)
                divisors.append(v)
    return GridSystem(
        n=grid.n,
        diag_mode=diag_mode,
        lines=tuple(lines),
        equations=tuple(equations),
        inequalities=tuple(Poly.var(v) for v in sorted(divisors)),
        var_ids=tuple(range(1, grid.n * grid.n + 1)),
    )


def operator_slots(n: int) -> int:
    return 2 * n * (n - 1) + (n - 1) * (n - 1)


def random_grid(n: int, n_times: int, n_div: int, seed: int) -> OperatorGrid:
    """Random operator layout with exactly the requested counts of *
    and /, placed uniformly over all operator slots; every other slot
    gets + or - uniformly.  Deterministic for a given seed."""
    total = operator_slots(n)
    if n_times < 0 or n_div < 0 or n_times + n_div > total:
        raise GridError(f"cannot place {n_times} * and {n_div} / into {total} slots")
    rng = Random(seed)
    special = rng.sample(range(total), n_times + n_div)
    symbol = {}
    for k, slot in enumerate(special):
        symbol[slot] = "*" if k < n_times else "/"

    flat: list[str] = []
    for slot in range(total):
        flat.append(symbol.get(slot, None) or rng.choice("+-"))

    row_ops = [[flat[i * (n - 1) + j] for j in range(n - 1)] for i in range(n)]
    base = n * (n - 1)
    col_ops = [[flat[base + i * n + j] for j in range(n)] for i in range(n - 1)]
    base += (n - 1) * n
    diag_ops = [[flat[base + i * (n - 1) + j] for j in range(n - 1)] for i in range(n - 1)]
    return var_grid(n, row_ops, col_ops, diag_ops)
