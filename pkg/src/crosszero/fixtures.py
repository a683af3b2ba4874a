"""Bundled demonstration fixtures.

OPSET is a 7 x 7 operator layout with three * and two / whose cleared
system is the standard large worked example; DEMO_PUZZLE_TEXT is a
letter puzzle over the same operator layout with a unique digit
assignment.
"""

from __future__ import annotations

from .grid import OperatorGrid, var_grid

_ROW_OPS = (
    ("+", "+", "-", "-", "*", "-"),
    ("-", "+", "+", "-", "-", "-"),
    ("+", "+", "-", "-", "-", "+"),
    ("+", "-", "+", "+", "-", "-"),
    ("-", "-", "+", "+", "-", "*"),
    ("+", "-", "-", "-", "+", "+"),
    ("+", "+", "-", "-", "-", "+"),
)

# Interleaved operator rows: even positions are column operators, odd
# positions are diagonal operators.
_OP_ROWS = (
    ("-", "-", "/", "-", "-", "-", "-", "-", "+", "+", "-", "+", "+"),
    ("-", "+", "-", "-", "-", "+", "-", "-", "-", "+", "-", "-", "+"),
    ("+", "+", "-", "-", "-", "+", "*", "+", "+", "-", "+", "-", "+"),
    ("-", "-", "-", "-", "+", "+", "-", "+", "+", "-", "-", "+", "+"),
    ("+", "+", "+", "-", "-", "+", "+", "-", "/", "-", "+", "+", "-"),
    ("+", "-", "+", "-", "-", "-", "-", "-", "-", "+", "-", "-", "+"),
)

_COL_OPS = tuple(tuple(row[j] for j in range(0, 13, 2)) for row in _OP_ROWS)
_DIAG_OPS = tuple(tuple(row[j] for j in range(1, 13, 2)) for row in _OP_ROWS)

OPSET: OperatorGrid = var_grid(7, _ROW_OPS, _COL_OPS, _DIAG_OPS)

_CELL_ROWS = (
    ("cgj/af", "-ii/j", "-edhd/ahf", "i", "f", "e", "-fca/eb"),
    ("-ii/j", "h", "i", "aa", "c", "hi/j", "-e"),
    ("hgca/ahf", "i", "f", "a/f", "cbjj/ahf", "j", "ih/j"),
    ("i", "cfih/ahf", "eij/ahf", "-hhed/eb", "ihab/ebg", "-hfca/fc", "ah"),
    ("-cbai/ahf", "dfeb/ahf", "bjei/ahf", "caeh/fc", "eadc/cf", "-cbcb/ahf", "a/e"),
    ("agja/eb", "achf/eb", "bja/ahf", "eejb/ebg", "agie/cf", "-hgc/cf", "-iba/ai"),
    ("-aheah/ahf", "agja/eb", "ja/f", "-dehi/ahf", "fdh/jg", "-iba/ai", "-ahef/eb"),
)


def _interleave(cells: tuple[str, ...], ops: tuple[str, ...]) -> str:
    parts = [cells[0]]
    for op, cell in zip(ops, cells[1:]):
        parts.append(op)
        parts.append(cell)
    return " ".join(parts)


def _puzzle_text() -> str:
    lines = ["size 7", "convention leading-zero=on", "diagonals all"]
    for i in range(7):
        lines.append(_interleave(_CELL_ROWS[i], _ROW_OPS[i]))
        if i < 6:
            lines.append(" ".join(_OP_ROWS[i]))
    return "\n".join(lines) + "\n"


DEMO_PUZZLE_TEXT: str = _puzzle_text()

# The single digit assignment solving DEMO_PUZZLE_TEXT.
DEMO_ASSIGNMENT: dict[str, int] = {
    "a": 1, "b": 7, "c": 4, "d": 6, "e": 2,
    "f": 5, "g": 0, "h": 3, "i": 8, "j": 9,
}
