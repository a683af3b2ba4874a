"""Letter puzzle parsing, rendering, and encoding."""

from fractions import Fraction

import pytest

from crosszero.cases import InstantiateError
from crosszero.fixtures import DEMO_PUZZLE_TEXT, OPSET
from crosszero.grid import random_grid, var_grid
from crosszero.puzzle import (
    CellExpr,
    Puzzle,
    PuzzleFormatError,
    digit_letters,
    encode_letters,
    instantiate,
    parse_cell,
    parse_puzzle,
    puzzle_from_json,
    puzzle_to_json,
    render_puzzle,
)

TINY = "size 1\nconvention leading-zero=on\na\n"


def tiny_two(cell="a", op="-"):
    text = "\n".join(
        [
            "size 2",
            "convention leading-zero=on",
            "diagonals all",
            f"{cell} {op} {cell}",
            f"{op} {op} {op}",
            f"{cell} {op} {cell}",
        ]
    )
    return parse_puzzle(text + "\n")


class TestCells:
    def test_parse_forms(self):
        assert parse_cell("ab") == CellExpr(1, "ab")
        assert parse_cell("-ii/j") == CellExpr(-1, "ii", "j")
        assert str(parse_cell("-ii/j")) == "-ii/j"

    def test_bad_cells(self):
        for bad in ("", "-", "a/", "/b", "a/b/c", "A", "a b", "3a"):
            with pytest.raises(PuzzleFormatError):
                parse_cell(bad)

    def test_value(self):
        digits = {"a": 1, "b": 3, "c": 2}
        assert CellExpr(1, "ab").value(digits) == 13
        assert CellExpr(-1, "ab", "c").value(digits) == Fraction(-13, 2)
        with pytest.raises(ZeroDivisionError):
            CellExpr(1, "a", "b").value({"a": 1, "b": 0})


class TestParse:
    def test_demo_fixture_parses(self):
        p = parse_puzzle(DEMO_PUZZLE_TEXT)
        assert p.n == 7
        assert p.leading_zero is True
        assert p.diag_mode == "all"
        assert p.letters == tuple("abcdefghij")
        assert p.grid.row_ops == OPSET.row_ops
        assert p.grid.col_ops == OPSET.col_ops
        assert p.grid.diag_ops == OPSET.diag_ops
        assert str(p.cell((0, 0))) == "cgj/af"
        assert str(p.cell((6, 6))) == "-ahef/eb"

    def test_round_trip(self):
        p = parse_puzzle(DEMO_PUZZLE_TEXT)
        assert parse_puzzle(render_puzzle(p)) == p

    def test_json_round_trip(self):
        p = parse_puzzle(DEMO_PUZZLE_TEXT)
        assert puzzle_from_json(puzzle_to_json(p)) == p
        assert parse_puzzle(puzzle_to_json(p)) == p

    def test_comments_and_blank_lines(self):
        text = "# small\nsize 1\n\nconvention leading-zero=on # trailing\n\na\n"
        assert parse_puzzle(text) == parse_puzzle(TINY)

    def test_diagonals_header_optional(self):
        p = parse_puzzle(TINY)
        assert p.diag_mode == "main"
        assert parse_puzzle("size 1\nconvention leading-zero=on\ndiagonals all\na\n").diag_mode == "all"

    def test_error_positions(self):
        bad_op = "size 2\nconvention leading-zero=on\na + b\n+ ? +\nc + d\n"
        with pytest.raises(PuzzleFormatError) as err:
            parse_puzzle(bad_op)
        assert err.value.line == 4
        assert err.value.col == 3

        bad_cell = "size 2\nconvention leading-zero=on\na + 5x\n+ + +\nc + d\n"
        with pytest.raises(PuzzleFormatError) as err:
            parse_puzzle(bad_cell)
        assert err.value.line == 3
        assert err.value.col == 5

        double_space = "size 1\nconvention leading-zero=on\na  -\n"
        with pytest.raises(PuzzleFormatError) as err:
            parse_puzzle(double_space)
        assert err.value.col == 3

    def test_header_errors(self):
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("size x\nconvention leading-zero=on\na\n")
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("size 1\nconvention leading-zero=maybe\na\n")
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("convention leading-zero=on\nsize 1\na\n")
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("size 1\nconvention leading-zero=on\ndiagonals some\na\n")

    def test_row_count_checked(self):
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("size 2\nconvention leading-zero=on\na + b\n")
        with pytest.raises(PuzzleFormatError):
            parse_puzzle(TINY + "a\n")

    def test_entry_count_checked(self):
        with pytest.raises(PuzzleFormatError) as err:
            parse_puzzle("size 2\nconvention leading-zero=on\na + b +\n+ + +\nc + d\n")
        assert err.value.line == 3


class TestEncode:
    def test_digit_letters_bijection(self):
        m = digit_letters(7)
        assert sorted(m) == list(range(10))
        assert sorted(m.values()) == list("abcdefghij")
        assert digit_letters(7) == digit_letters(7)
        assert any(digit_letters(7) != digit_letters(s) for s in range(1, 6))

    def test_encode_round_trip_values(self):
        grid = random_grid(2, 1, 1, 5)
        values = {1: Fraction(3), 2: Fraction(-13, 2), 3: Fraction(0), 4: Fraction(7, 3)}
        puzzle, assignment = encode_letters(grid, values, seed=11, diag_mode="all")
        for (i, j), want in (((0, 0), 3), ((0, 1), Fraction(-13, 2)), ((1, 0), 0), ((1, 1), Fraction(7, 3))):
            assert puzzle.cell((i, j)).value(assignment) == want

    def test_encode_shapes(self):
        grid = var_grid(1, [[]], [], [])
        puzzle, assignment = encode_letters(grid, {1: Fraction(-5)}, seed=3)
        cell = puzzle.cell((0, 0))
        assert cell.sign == -1
        assert cell.den is None
        assert len(cell.num) == 1
        assert assignment == {cell.num: 5}

    def test_encode_integer_has_no_denominator(self):
        grid = var_grid(1, [[]], [], [])
        puzzle, _ = encode_letters(grid, {1: Fraction(10, 2)}, seed=3)
        assert puzzle.cell((0, 0)).den is None

    def test_encode_never_leads_with_zero_digit(self):
        grid = var_grid(1, [[]], [], [])
        for seed in range(5):
            puzzle, assignment = encode_letters(grid, {1: Fraction(105, 2)}, seed=seed)
            cell = puzzle.cell((0, 0))
            assert assignment[cell.num[0]] == 1
            assert assignment[cell.den[0]] == 2


class TestInstantiate:
    def test_bound_is_enforced(self, linear_family):
        values = instantiate(linear_family, {}, bound=10)
        assert values
        with pytest.raises(InstantiateError):
            instantiate(linear_family, {}, bound=1)


@pytest.fixture
def linear_family():
    from crosszero.session import parse_system, workbench_for

    wb = workbench_for(parse_system("var u1\nvar u2\neq u1 - 2*u2\neq u2 - 2\n"))
    wb.run()
    return wb.families[0]
