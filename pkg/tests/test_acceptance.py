"""Top-level acceptance gate.

One test per shipped guarantee, each a single pass/fail line under
``pytest -v``: the bundled 7x7 puzzle is uniquely solvable with exact
zero residuals, grid clearing produces the advertised system shape, the
batch solver closes verified parametric families on that system, the
equation-splitting rules are sound on randomized inputs, univariate
rationality decisions are exact, seeded generation is unique and
replayable, and the pruned uniqueness counter agrees with brute force.
"""

import time
from fractions import Fraction
from random import Random

from crosszero.cases import NO_RATIONAL, canonical_poly
from crosszero.factor import univ_rational_roots
from crosszero.fixtures import DEMO_PUZZLE_TEXT, OPSET
from crosszero.generate import GenConfig, generate, replay
from crosszero.grid import grid_to_system, var_grid
from crosszero.poly import Poly
from crosszero.puzzle import parse_puzzle, render_puzzle
from crosszero.solver import SolveOptions, Workbench
from crosszero.unique import check_assignment, count_assignments

from test_unique import naive_count, random_puzzle


def u(v: int) -> Poly:
    return Poly.var(v)


def coefficient_split(p: Poly, v: int) -> list[Poly]:
    """Replace p = 0 by one equation per power of u_v."""
    cs = p.coeffs_wrt(v)
    return [cs[n] for n in sorted(cs)]


def paired_split(p: Poly, v: int) -> list[Poly]:
    """Keep the constant and linear parts together as one equation."""
    cs = p.coeffs_wrt(v)
    pair = cs.get(0, Poly.zero()) + cs.get(1, Poly.zero()) * u(v)
    return [cs[n] for n in sorted(cs) if n >= 2] + [pair]


def folded_split(p: Poly, v: int) -> list[Poly]:
    """Fold all upper coefficients into a single equation, zero branch."""
    cs = p.coeffs_wrt(v)
    pair = cs.get(0, Poly.zero()) + cs.get(1, Poly.zero()) * u(v)
    folded = Poly.zero()
    for n in sorted(cs):
        if n >= 2:
            folded = folded + cs[n] * u(v) ** (n - 2)
    return [folded, pair]


def random_coeff_poly(rng: Random, vars_: tuple[int, ...]) -> Poly:
    """Small random polynomial that avoids the split variable."""
    p = Poly.zero()
    for _ in range(rng.randint(1, 4)):
        mono = Poly.const(rng.randint(-4, 4))
        for w in vars_:
            mono = mono * u(w) ** rng.randint(0, 2)
        p = p + mono
    return p


def random_point(rng: Random, vars_: tuple[int, ...]) -> dict[int, Fraction]:
    return {w: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for w in vars_}


def assemble(coeffs: dict[int, Poly], v: int) -> Poly:
    p = Poly.zero()
    for n, a in coeffs.items():
        p = p + a * u(v) ** n
    return p


def canonical_set(polys) -> frozenset[Poly]:
    return frozenset(canonical_poly(p) for p in polys if not p.is_zero())


def test_bundled_puzzle_has_exactly_one_solution_with_zero_residuals():
    puzzle = parse_puzzle(DEMO_PUZZLE_TEXT)
    started = time.monotonic()
    res = count_assignments(puzzle)
    elapsed = time.monotonic() - started
    assert res.count == 1
    assert not res.capped
    assert elapsed < 120.0, f"counting took {elapsed:.1f}s"
    report = check_assignment(puzzle, res.assignments[0])
    assert report.ok
    assert len(report.lines) == 36
    assert all(line.status == "zero" and line.residual == 0 for line in report.lines)


def test_grid_clearing_yields_advertised_system_shape():
    gsys = grid_to_system(OPSET, "all")
    assert len(gsys.equations) == 36
    assert len(gsys.var_ids) == 49
    assert len(gsys.var_ids) - len(gsys.equations) == 13
    row1 = u(1) + u(2) + u(3) - u(4) - u(5) * u(6) - u(7)
    assert canonical_poly(gsys.equations[0]) == canonical_poly(row1)

    plus5 = var_grid(5, [["+"] * 4] * 5, [["+"] * 5] * 4, [["+"] * 4] * 4)
    small = grid_to_system(plus5, "main")
    assert len(small.equations) == 12
    assert len(small.var_ids) == 25


def test_batch_solve_closes_verified_parametric_families():
    gsys = grid_to_system(OPSET, "all")
    opts = SolveOptions(
        plist=SolveOptions.parse_plist("(1 89 20 77 47 21 90)"),
        stop_after_families=3,
    )
    wb = Workbench(
        gsys.equations, gsys.inequalities, declared_vars=gsys.var_ids, options=opts
    )
    started = time.monotonic()
    wb.run()
    elapsed = time.monotonic() - started
    assert elapsed < 1800.0, f"batch run took {elapsed:.1f}s"
    assert len(wb.families) >= 1
    assert any(len(fam.free_params) >= 5 for fam in wb.families)
    for fam in wb.families:
        assert fam.verify(gsys.equations), f"{fam.id} does not satisfy the originals"
    biggest = max(
        (eq.term_count for node in wb.tree.nodes.values() for eq in node.equations),
        default=0,
    )
    print(
        "families:",
        [(fam.id, len(fam.free_params), fam.binding_term_count()) for fam in wb.families],
        "largest equation:",
        biggest,
        "terms",
    )


def test_split_rules_sound_on_randomized_polynomials():
    rng = Random(20240803)
    others = (2, 3)
    checked = 0
    for _ in range(1000):
        v = 1
        d = rng.randint(2, 4)

        # Each split rule reproduces the input exactly.
        coeffs = {n: random_coeff_poly(rng, others) for n in range(d + 1)}
        p = assemble(coeffs, v)
        cs = p.coeffs_wrt(v)
        assert assemble(cs, v) == p
        folded, pair = folded_split(p, v)
        assert u(v) ** 2 * folded + pair == p

        # A common zero of every coefficient stays a solution down the
        # whole chain of coarser splits.
        q = random_point(rng, others)
        planted = {n: a - Poly.const(a.eval_at(q)) for n, a in coeffs.items()}
        p1 = assemble(planted, v)
        point = dict(q)
        point[v] = Fraction(rng.randint(-3, 3))
        assert all(a.eval_at(point) == 0 for a in coefficient_split(p1, v))
        assert all(a.eval_at(point) == 0 for a in paired_split(p1, v))
        assert all(a.eval_at(point) == 0 for a in folded_split(p1, v))
        assert p1.eval_at(point) == 0

        # A zero of the paired system that is not a zero of every
        # coefficient still satisfies the folded system and the input.
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        a1 = coeffs[1] + Poly.const(1 - coeffs[1].eval_at(q))
        paired_coeffs = {
            n: coeffs[n] - Poly.const(coeffs[n].eval_at(q)) for n in range(2, d + 1)
        }
        paired_coeffs[1] = a1
        paired_coeffs[0] = a1 * Poly.const(-c)
        p2 = assemble(paired_coeffs, v)
        point2 = dict(q)
        point2[v] = c
        assert all(a.eval_at(point2) == 0 for a in paired_split(p2, v))
        assert all(a.eval_at(point2) == 0 for a in folded_split(p2, v))
        assert p2.eval_at(point2) == 0

        # A zero of the folded system that is not a zero of the paired
        # one still satisfies the input.
        shift = sum(
            (coeffs[n].eval_at(q) * c ** (n - 2) for n in range(2, d + 1)),
            Fraction(0),
        )
        folded_coeffs = dict(coeffs)
        folded_coeffs[2] = coeffs[2] - Poly.const(shift)
        folded_coeffs[1] = a1
        folded_coeffs[0] = a1 * Poly.const(-c)
        p3 = assemble(folded_coeffs, v)
        f3, g3 = folded_split(p3, v)
        assert f3.eval_at(point2) == 0 and g3.eval_at(point2) == 0
        assert p3.eval_at(point2) == 0

        # At degree two the paired and folded rules coincide.
        quad = {
            0: random_coeff_poly(rng, others),
            1: random_coeff_poly(rng, others),
            2: random_coeff_poly(rng, others) + Poly.one(),
        }
        p4 = assemble(quad, v)
        if p4.degree_in(v) == 2:
            assert paired_split(p4, v) == folded_split(p4, v)

        # Full coefficient splits along different variables commute.
        mixed = Poly.zero()
        for _ in range(rng.randint(2, 5)):
            mono = Poly.const(rng.randint(-3, 3))
            for w in (1, 2, 3):
                mono = mono * u(w) ** rng.randint(0, 2)
            mixed = mixed + mono
        one_way = canonical_set(
            b for a in coefficient_split(mixed, 1) for b in coefficient_split(a, 2)
        )
        other_way = canonical_set(
            b for a in coefficient_split(mixed, 2) for b in coefficient_split(a, 1)
        )
        assert one_way == other_way
        checked += 1
    assert checked == 1000


def test_univariate_rationality_decisions_are_exact():
    def solve(p: Poly):
        wb = Workbench([p], [], declared_vars=[1], options=SolveOptions())
        wb.run()
        return wb

    def bound_value(fam) -> Fraction:
        (_, num, den), = fam.bindings
        return num.constant_value() / den.constant_value()

    no_root = solve(u(1) ** 2 - Poly.const(2))
    assert no_root.families == []
    assert any(n.status == NO_RATIONAL for n in no_root.tree.nodes.values())

    two_roots = solve(u(1) ** 2 - Poly.const(Fraction(9, 4)))
    assert sorted(bound_value(f) for f in two_roots.families) == [
        Fraction(-3, 2),
        Fraction(3, 2),
    ]

    cubic = (u(1) - Poly.const(1)) * (u(1) + Poly.const(2)) * (Poly.const(2) * u(1) - Poly.const(3))
    assert sorted(univ_rational_roots(cubic)) == [-2, Fraction(1), Fraction(3, 2)]
    three_roots = solve(cubic)
    assert sorted(bound_value(f) for f in three_roots.families) == sorted(
        univ_rational_roots(cubic)
    )


def test_seeded_generation_is_unique_and_replayable():
    cfg = GenConfig(size=5, n_times=1, n_div=1, seed=0, max_attempts=10)
    started = time.monotonic()
    out = generate(cfg)
    elapsed = time.monotonic() - started
    assert out.attempts <= 10
    assert elapsed < 600.0, f"generation took {elapsed:.1f}s"
    res = count_assignments(out.puzzle, cap=2)
    assert res.count == 1 and not res.capped

    again_puzzle, again_assignment = replay(out.provenance)
    assert render_puzzle(again_puzzle) == render_puzzle(out.puzzle)
    assert again_assignment == out.assignment


def test_pruned_counter_matches_naive_enumeration():
    agreed = 0
    for seed in range(50):
        puzzle = random_puzzle(seed)
        assert count_assignments(puzzle).count == naive_count(puzzle)
        agreed += 1
    assert agreed == 50
