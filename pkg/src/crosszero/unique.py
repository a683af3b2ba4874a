"""Counting digit assignments that solve a letter puzzle.

The search assigns distinct digits to letters one letter at a time,
most constrained letters first, and prunes a branch as soon as it can:
when a digit zero would lead a multi letter numeral (under the
leading-zero convention), when a completed denominator or divisor
numeral is zero, and when any line whose letters are all assigned does
not evaluate to zero.  Arithmetic is exact throughout, so the reported
count is exact (up to the optional cap) and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .grid import Line, line_terms
from .puzzle import CellExpr, Puzzle, numeral_value

Assignment = dict[str, int]


class UniqueError(Exception):
    pass


@dataclass(frozen=True)
class CountResult:
    count: int
    assignments: tuple[Assignment, ...]
    nodes: int
    capped: bool


@dataclass(frozen=True)
class LineCheck:
    label: str
    status: str  # zero | nonzero | divzero | pending
    residual: Fraction | None


@dataclass(frozen=True)
class AssignmentReport:
    ok: bool
    lines: tuple[LineCheck, ...]
    problems: tuple[str, ...]


def participation_order(puzzle: Puzzle) -> tuple[str, ...]:
    """Letters by descending number of lines they take part in, ties
    alphabetical."""
    lines = puzzle.lines()
    seen: dict[str, int] = {letter: 0 for letter in puzzle.letters}
    for line in lines:
        mention: set[str] = set()
        for pos in line.cells:
            mention |= puzzle.cell(pos).letters()
        for letter in mention:
            seen[letter] += 1
    return tuple(sorted(seen, key=lambda ch: (-seen[ch], ch)))


def _line_letters(puzzle: Puzzle, line: Line) -> set[str]:
    out: set[str] = set()
    for pos in line.cells:
        out |= puzzle.cell(pos).letters()
    return out


def _nonzero_numerals(puzzle: Puzzle) -> set[str]:
    """Numerals that must not evaluate to zero: every denominator, and
    the numerator of every cell that some line divides by."""
    need: set[str] = set()
    for row in puzzle.grid.cells:
        for cell in row:
            if cell.den is not None:
                need.add(cell.den)
    for line in puzzle.lines():
        for _, _, den_cells in line_terms(line):
            for pos in den_cells:
                need.add(puzzle.cell(pos).num)
    return need


def _leading_letters(puzzle: Puzzle) -> set[str]:
    return {numeral[0] for numeral in puzzle.multi_letter_numerals()}


class _Stop(Exception):
    pass


def count_assignments(
    puzzle: Puzzle,
    cap: int | None = None,
    order: Sequence[str] | None = None,
) -> CountResult:
    """Exact number of valid digit assignments, the assignments
    themselves, and the number of search nodes visited.

    Runs to completion unless the running count exceeds `cap`, in which
    case the result is flagged `capped` and the count means "more than
    cap".  The count does not depend on the letter order used."""
    letters = tuple(order) if order is not None else participation_order(puzzle)
    if sorted(letters) != sorted(puzzle.letters):
        raise UniqueError("letter order must cover exactly the puzzle letters")
    index = {ch: k for k, ch in enumerate(letters)}

    def ready_at(chars: Iterable[str]) -> int:
        return max(index[ch] for ch in chars)

    lines = puzzle.lines()
    lines_at: list[list[Line]] = [[] for _ in letters]
    for line in lines:
        lines_at[ready_at(_line_letters(puzzle, line))].append(line)
    numerals_at: list[list[str]] = [[] for _ in letters]
    for numeral in sorted(_nonzero_numerals(puzzle)):
        numerals_at[ready_at(numeral)].append(numeral)
    leading = _leading_letters(puzzle) if puzzle.leading_zero else set()

    compiled = {id(line): _compile_line(puzzle, line) for line in lines}
    digits: Assignment = {}
    used = [False] * 10
    state = {"count": 0, "nodes": 0, "capped": False}
    found: list[Assignment] = []

    def admissible(k: int) -> bool:
        for numeral in numerals_at[k]:
            if numeral_value(numeral, digits) == 0:
                return False
        for line in lines_at[k]:
            if compiled[id(line)](digits) != 0:
                return False
        return True

    def walk(k: int) -> None:
        if k == len(letters):
            state["count"] += 1
            if cap is None or state["count"] <= cap:
                found.append(dict(digits))
            if cap is not None and state["count"] > cap:
                state["capped"] = True
                raise _Stop
            return
        letter = letters[k]
        for d in range(10):
            if used[d]:
                continue
            state["nodes"] += 1
            if d == 0 and letter in leading:
                continue
            digits[letter] = d
            used[d] = True
            if admissible(k):
                walk(k + 1)
            del digits[letter]
            used[d] = False

    try:
        if letters:
            walk(0)
        else:
            state["count"] = 1
            found.append({})
    except _Stop:
        pass
    return CountResult(state["count"], tuple(found), state["nodes"], state["capped"])


def _compile_line(puzzle: Puzzle, line: Line):
    """Exact evaluator for one line over a complete-for-this-line digit
    assignment.  Divisor numerals are already guaranteed nonzero by the
    numeral pruning, so plain Fraction arithmetic is safe."""
    terms = []
    for sign, num_cells, den_cells in line_terms(line):
        terms.append(
            (
                sign,
                [puzzle.cell(pos) for pos in num_cells],
                [puzzle.cell(pos) for pos in den_cells],
            )
        )

    def evaluate(digits: Mapping[str, int]) -> Fraction:
        total = Fraction(0)
        for sign, nums, dens in terms:
            val = Fraction(sign)
            for cell in nums:
                val *= cell.value(digits)
            for cell in dens:
                val /= cell.value(digits)
            total += val
        return total

    return evaluate


def check_assignment(puzzle: Puzzle, digits: Mapping[str, int]) -> AssignmentReport:
    """Per line residuals of a (possibly partial) digit assignment.

    A line over unassigned letters reports `pending`; a line that hits
    a zero denominator or zero divisor reports `divzero` and other
    lines still report normally.  The assignment is `ok` when it is
    complete, injective, respects the conventions, and every line is
    exactly zero."""
    problems: list[str] = []
    for letter, d in sorted(digits.items()):
        if letter not in puzzle.letters:
            problems.append(f"unknown letter {letter!r}")
        if not isinstance(d, int) or not 0 <= d <= 9:
            problems.append(f"{letter} must hold a digit, got {d!r}")
    known = {ch: d for ch, d in digits.items() if ch in puzzle.letters and isinstance(d, int) and 0 <= d <= 9}
    by_digit: dict[int, list[str]] = {}
    for letter, d in sorted(known.items()):
        by_digit.setdefault(d, []).append(letter)
    for d, group in sorted(by_digit.items()):
        if len(group) > 1:
            problems.append(f"letters {', '.join(group)} share digit {d}")
    missing = [ch for ch in puzzle.letters if ch not in known]
    if missing:
        problems.append(f"unassigned letters: {', '.join(missing)}")
    if puzzle.leading_zero:
        for numeral in sorted(set(puzzle.multi_letter_numerals())):
            if known.get(numeral[0]) == 0:
                problems.append(f"numeral {numeral} starts with digit zero")

    checks: list[LineCheck] = []
    for line in puzzle.lines():
        if any(ch not in known for ch in _line_letters(puzzle, line)):
            checks.append(LineCheck(line.label, "pending", None))
            continue
        try:
            residual = Fraction(0)
            for sign, num_cells, den_cells in line_terms(line):
                val = Fraction(sign)
                for pos in num_cells:
                    val *= puzzle.cell(pos).value(known)
                for pos in den_cells:
                    divisor = puzzle.cell(pos).value(known)
                    if divisor == 0:
                        raise ZeroDivisionError(f"cell {pos} divides and is zero")
                    val /= divisor
                residual += val
        except ZeroDivisionError:
            checks.append(LineCheck(line.label, "divzero", None))
            continue
        checks.append(LineCheck(line.label, "zero" if residual == 0 else "nonzero", residual))

    ok = not problems and all(c.status == "zero" for c in checks)
    return AssignmentReport(ok, tuple(checks), tuple(problems))
