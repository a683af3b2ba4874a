"""System files and session snapshots."""

import json

import pytest

from crosszero.poly import parse_poly
from crosszero.session import (
    System,
    SystemFormatError,
    format_system,
    load_session_text,
    parse_system,
    save_session,
    save_session_text,
    workbench_for,
)
from crosszero.solver import SolveOptions, Workbench


GOOD = """\
# three unknowns, one relation
var u1
var u2
var u3

eq u1^2 - 2*u2
ineq u3
"""


def test_parse_system_basics():
    system = parse_system(GOOD)
    assert system.var_ids == (1, 2, 3)
    assert system.equations == (parse_poly("u1^2 - 2*u2"),)
    assert system.inequalities == (parse_poly("u3"),)


def test_format_parse_roundtrip():
    system = parse_system(GOOD)
    assert parse_system(format_system(system)) == system


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("eq u1", "undeclared"),
        ("var u1\nvar u1", "twice"),
        ("var u0", "start at 1"),
        ("var x3", "bad variable name"),
        ("var u1\nfoo u1", "expected var"),
        ("var u1\neq u1 +", "bad polynomial"),
        ("var u1\nineq 0", "nonzero"),
    ],
)
def test_parse_system_rejects(text, fragment):
    with pytest.raises(SystemFormatError) as e:
        parse_system(text)
    assert fragment in str(e.value)


def test_error_carries_line_number():
    with pytest.raises(SystemFormatError) as e:
        parse_system("var u1\nvar u2\neq u9")
    assert e.value.line_no == 3


def test_declared_but_unused_variables_stay_free():
    system = parse_system("var u1\nvar u2\neq u1 - 1")
    wb = workbench_for(system)
    wb.run()
    assert wb.families[0].free_params == (2,)
    assert wb.families[0].total_vars == 2


def test_save_load_roundtrip_is_exact():
    system = parse_system("var u1\nvar u2\nvar u3\neq u2*u1 - u3\neq u2^2 - u3")
    wb = workbench_for(system, SolveOptions(max_cases=50))
    wb.apply_module("1", "21")
    snap = save_session(wb)
    wb2 = load_session_text(save_session_text(wb))
    assert save_session(wb2) == snap
    assert wb2.options == wb.options


def test_resumed_session_finishes_like_the_original():
    # same manual prefix, one saved and reloaded mid-way: both must land
    # on the identical final snapshot
    text = "var u1\nvar u2\nvar u3\neq u2*u1 - u3\neq u2^2 - u3"
    mirror = workbench_for(parse_system(text))
    mirror.apply_module("1", "21")
    mirror.run()

    partial = workbench_for(parse_system(text))
    partial.apply_module("1", "21")
    resumed = load_session_text(save_session_text(partial))
    resumed.run()

    assert save_session(resumed) == save_session(mirror)
    assert [f.id for f in resumed.families] == [f.id for f in mirror.families]


def test_load_rejects_other_files():
    with pytest.raises(Exception):
        load_session_text("{}")
    with pytest.raises(Exception):
        load_session_text("not json")
    data = json.loads(save_session_text(workbench_for(parse_system("var u1\neq u1"))))
    data["version"] = 999
    with pytest.raises(Exception):
        load_session_text(json.dumps(data))
