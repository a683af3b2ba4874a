"""Step modules and the scheduler that drives the case tree.

Each step module is a small, numbered strategy; the numbers are stable
wire codes used in traces, the REPL, and the HTTP service:

    1   work the queued branch list (FIFO; stale entries are dropped)
    89  rationality test on a univariate equation
    20  substitution with a coefficient known to be nonzero
    21  substitution that splits on whether the coefficient is zero
    77  factor search on the shortest untested equation
    47  case split over the factors of a factored equation
    90  replace an equation by its coefficient-wise partial split
    91  queue a single branch on the best partial-split pair
    38  yield to the operator and surface split candidates

A run works one ordered module list (the "plist"): after any module
applies, control returns to the head of the list, so earlier modules
always get the next word.  Cases are explored depth first, zero branches
first.  All arithmetic is exact; traces never include wall clock times,
so identical inputs give byte-identical traces everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from .cases import (
    AWAITING,
    BRANCHED,
    CONTRADICTORY,
    LIMIT,
    NO_RATIONAL,
    OPEN,
    SOLVED,
    TERMINAL_STATUSES,
    CaseNode,
    CaseTree,
    Equation,
    SolutionFamily,
    SolverError,
    add_equations,
    add_nonzero,
    bind,
    canonical_poly,
    extract_solution,
    refresh_case,
)
from .factor import Factorization, discriminant_square_root, try_factor
from .poly import Poly, format_poly

M_TODO = "1"
M_SUB_SAFE = "20"
M_SUB_SPLIT = "21"
M_YIELD = "38"
M_FACTOR_SPLIT = "47"
M_FACTOR_TEST = "77"
M_RATIONALITY = "89"
M_SPLIT_FULL = "90"
M_SPLIT_ONCE = "91"

DEFAULT_PLIST: tuple[str, ...] = ("1", "89", "20", "21", "77", "47", "90", "38")
ALL_MODULES: tuple[str, ...] = ("1", "20", "21", "38", "47", "77", "89", "90", "91")


@dataclass(frozen=True)
class SolveOptions:
    plist: tuple[str, ...] = DEFAULT_PLIST
    max_terms: int = 200_000
    max_cases: int = 10_000
    stop_after_families: int | None = None
    explore_nonzero: bool = False

    @staticmethod
    def parse_plist(text: str) -> tuple[str, ...]:
        """Module list from text: numbers separated by commas or spaces,
        optionally wrapped in parentheses, e.g. "(1 89 20 77 47 21 90)"."""
        cleaned = text.strip()
        if cleaned.startswith("(") and cleaned.endswith(")"):
            cleaned = cleaned[1:-1]
        mods = tuple(part for part in cleaned.replace(",", " ").split() if part)
        bad = [m for m in mods if m not in ALL_MODULES]
        if bad:
            raise SolverError(f"unknown step modules: {', '.join(bad)}")
        if not mods:
            raise SolverError("empty module list")
        return mods


@dataclass(frozen=True)
class SplitCandidate:
    """A (equation, variable) pair eligible for partial splitting."""

    eq_index: int
    var: int
    degree: int
    low: Poly    # coefficient of var**0
    lin: Poly    # coefficient of var**1
    uppers: tuple[tuple[int, Poly], ...]  # (n, coefficient) for n >= 2, nonzero

    def pair_poly(self) -> Poly:
        return self.low + self.lin * Poly.var(self.var)

    def split_polys(self) -> list[Poly]:
        return [c for _, c in self.uppers] + [self.pair_poly()]


@dataclass(frozen=True)
class StepOutcome:
    applied: bool
    module: str
    note: str = ""
    children: tuple[str, ...] = ()


@dataclass
class RunResult:
    visited: int = 0
    new_families: list[str] = field(default_factory=list)
    stopped_early: bool = False
    aborted: bool = False


class RunAbort(Exception):
    """Raised by a boundary callback to stop a run between modules."""


_cached_try_factor = lru_cache(maxsize=4096)(try_factor)


def _is_linear_in_some_var(p: Poly) -> bool:
    return any(d == 1 for d in p.degrees().values())


def _splittable_coefficient(p: Poly) -> bool:
    """A coefficient the split machinery can keep working on: zero,
    linear in some variable, or with a factor linear in some variable."""
    if p.is_zero() or p.is_constant():
        return not p.is_constant() or p.is_zero()
    if _is_linear_in_some_var(p):
        return True
    f = _cached_try_factor(p)
    return any(_is_linear_in_some_var(fac) for fac in f.distinct_factors())


def split_candidates(case: CaseNode) -> list[SplitCandidate]:
    """All surviving partial-split candidates of a case, unranked.

    A candidate (equation, variable) with degree d >= 2 survives when no
    coefficient of var**n (n >= 2) is known nonzero and every such
    coefficient is workable (see _splittable_coefficient)."""
    out: list[SplitCandidate] = []
    for idx, eq in enumerate(case.equations):
        by_var = {v: eq.poly.coeffs_wrt(v) for v in sorted(eq.vars) if eq.degs[v] >= 2}
        for v, coeffs in by_var.items():
            uppers = tuple((n, c) for n, c in sorted(coeffs.items()) if n >= 2)
            if any(case.ineq.knows_nonzero(c) for _, c in uppers):
                continue
            if any(c.is_constant() for _, c in uppers):
                continue
            if not all(_splittable_coefficient(c) for _, c in uppers):
                continue
            out.append(
                SplitCandidate(
                    eq_index=idx,
                    var=v,
                    degree=eq.degs[v],
                    low=coeffs.get(0, Poly.zero()),
                    lin=coeffs.get(1, Poly.zero()),
                    uppers=uppers,
                )
            )
    return out


def rank_split_candidates(case: CaseNode, cands: Iterable[SplitCandidate] | None = None) -> list[SplitCandidate]:
    """Order candidates so the cheapest, most promising split comes
    first; the key is deterministic and documented in the README."""
    if cands is None:
        cands = split_candidates(case)

    def key(c: SplitCandidate):
        eq = case.equations[c.eq_index]
        return (
            len(eq.vars),
            eq.term_count,
            c.degree,
            c.lin.term_count,
            c.low.term_count,
            len(c.low.vars() | c.lin.vars()),
            c.eq_index,
            c.var,
        )

    return sorted(cands, key=key)


def _fraction_poly(x: Fraction) -> tuple[Poly, Poly]:
    return Poly.const(x.numerator), Poly.const(x.denominator)


class TraceLog:
    """Collects trace lines; optionally forwards them to a sink."""

    def __init__(self, sink: Callable[[str], None] | None = None) -> None:
        self.lines: list[str] = []
        self.sink = sink

    def emit(self, kind: str, *fields: tuple[str, str]) -> None:
        parts = [kind] + [f"{k}={v}" for k, v in fields]
        line = " ".join(parts)
        self.lines.append(line)
        if self.sink is not None:
            self.sink(line)


class Workbench:
    """Holds one case tree plus the strategy state shared by the CLI,
    the REPL, and the HTTP service."""

    def __init__(
        self,
        equations: Iterable[Poly],
        inequalities: Iterable[Poly] = (),
        declared_vars: Iterable[int] = (),
        options: SolveOptions | None = None,
        trace: TraceLog | None = None,
    ) -> None:
        self.options = options or SolveOptions()
        self.trace = trace or TraceLog()
        self.tree = CaseTree(equations, inequalities, declared_vars)
        self.families: list[SolutionFamily] = []
        self._family_keys: set = set()
        self._family_counter = 0
        root = self.tree.node("1")
        if root.status in TERMINAL_STATUSES:
            self._announce_status(root)
        if root.status == SOLVED:
            self._harvest(root)

    # -- bookkeeping -----------------------------------------------------------

    def _announce_status(self, node: CaseNode) -> None:
        self.trace.emit("status", ("case", node.id), ("status", node.status), ("note", node.note))

    def _after_change(self, node: CaseNode) -> None:
        if node.status in TERMINAL_STATUSES:
            self._announce_status(node)
        if node.status == SOLVED:
            self._harvest(node)

    def _harvest(self, node: CaseNode) -> None:
        fam = extract_solution(self.tree, node, f"F{self._family_counter + 1}")
        if fam.key() in self._family_keys:
            self.trace.emit("solution", ("case", node.id), ("new", "no"))
            return
        self._family_counter += 1
        self._family_keys.add(fam.key())
        self.families.append(fam)
        self.trace.emit(
            "solution",
            ("case", node.id),
            ("family", fam.id),
            ("new", "yes"),
            ("free", str(len(fam.free_params))),
            ("binding_terms", str(fam.binding_term_count())),
        )

    def _update(self, node: CaseNode) -> CaseNode:
        out = self.tree.update(node)
        self._after_change(out)
        return out

    def _budget_for_children(self, case: CaseNode, k: int) -> bool:
        if self.tree.case_count() + k > self.options.max_cases:
            self._update(replace(case, status=LIMIT, note=f"case budget {self.options.max_cases} reached"))
            self.trace.emit("limit", ("case", case.id), ("kind", "cases"), ("max", str(self.options.max_cases)))
            return False
        return True

    def _add_children(self, case: CaseNode, builders, note: str) -> tuple[str, ...]:
        kids = self.tree.add_children(case.id, builders, note=note)
        self.trace.emit(
            "branch",
            ("case", case.id),
            ("children", ",".join(k.id for k in kids)),
            ("note", note),
        )
        for kid in kids:
            self._after_change(kid)
        return tuple(k.id for k in kids)

    # -- step modules ----------------------------------------------------------

    def _mod_todo(self, case: CaseNode) -> StepOutcome:
        while case.todo:
            (code, target), rest = case.todo[0], case.todo[1:]
            case = self.tree.update(replace(case, todo=rest))
            if code == M_FACTOR_SPLIT:
                idx = case.find_equation(target)
                if idx is None:
                    continue
                eq = case.equations[idx]
                if eq.factorization is None or len(eq.factorization.distinct_factors()) < 2:
                    continue
                children = self._factor_split(case, idx)
                if children is not None:
                    return StepOutcome(True, M_TODO, f"queued factor split of {eq.poly}", children)
                return StepOutcome(True, M_TODO, "queued factor split hit the case budget")
            if code == M_FACTOR_TEST:
                idx = case.find_equation(target)
                if idx is None:
                    continue
                if case.equations[idx].factorization is not None:
                    continue
                note = self._factor_one(case, idx)
                return StepOutcome(True, M_TODO, note)
            if code == M_SPLIT_ONCE:
                if target.vars() & case.bound_vars():
                    continue
                if case.ineq.knows_nonzero(target):
                    continue
                if case.find_equation(target) is not None:
                    continue
                children = self._branch_pair(case, target)
                if children is not None:
                    return StepOutcome(True, M_TODO, f"queued branch on {target}", children)
                return StepOutcome(True, M_TODO, "queued branch hit the case budget")
            raise SolverError(f"unknown queued entry kind {code}")
        return StepOutcome(False, M_TODO)

    def _branch_pair(self, case: CaseNode, q: Poly) -> tuple[str, ...] | None:
        """Two-way branch on q = 0; the nonzero child is only marked for
        exploration when the explore_nonzero option is set."""
        if not self._budget_for_children(case, 2):
            return None
        zero, nonzero = self.tree.branch(case.id, q)
        self.trace.emit(
            "branch",
            ("case", case.id),
            ("children", f"{zero.id},{nonzero.id}"),
            ("note", f"pair {canonical_poly(q)}"),
        )
        if not self.options.explore_nonzero:
            nonzero = self.tree.update(replace(nonzero, explore=False, note="deferred nonzero branch"))
        for kid in (zero, nonzero):
            self._after_change(kid)
        return (zero.id, nonzero.id)

    def _mod_rationality(self, case: CaseNode) -> StepOutcome:
        for idx, eq in enumerate(case.equations):
            if len(eq.vars) != 1:
                continue
            v = next(iter(eq.vars))
            d = eq.degs[v]
            if d == 1:
                a = eq.poly.coeff_wrt(v, 1).constant_value()
                b = eq.poly.coeff_wrt(v, 0).constant_value()
                root = -b / a
                num, den = _fraction_poly(root)
                out = bind(case, v, num, den, self.options.max_terms)
                self._update(out)
                return StepOutcome(True, M_RATIONALITY, f"u{v} = {root}")
            if d == 2:
                a = eq.poly.coeff_wrt(v, 2).constant_value()
                b = eq.poly.coeff_wrt(v, 1).constant_value()
                c = eq.poly.coeff_wrt(v, 0).constant_value()
                roots = discriminant_square_root(a, b, c)
                if roots is None:
                    self._update(replace(case, status=NO_RATIONAL, note=f"u{v} has no rational value"))
                    return StepOutcome(True, M_RATIONALITY, f"quadratic in u{v} has no rational roots")
                distinct = sorted(set(roots))
                if not self._budget_for_children(case, len(distinct)):
                    return StepOutcome(True, M_RATIONALITY, "root split hit the case budget")
                builders = []
                for r in distinct:
                    def build(cid: str, r: Fraction = r) -> CaseNode:
                        lin = canonical_poly(Poly.var(v) * r.denominator - Poly.const(r.numerator))
                        base = replace(case, id=cid, parent=case.id, assumption=(lin, "=0"), status=OPEN, note="")
                        num, den = _fraction_poly(r)
                        return bind(base, v, num, den, self.options.max_terms)
                    builders.append(build)
                children = self._add_children(case, builders, note=f"rational roots of u{v}")
                return StepOutcome(True, M_RATIONALITY, f"split on the roots of a quadratic in u{v}", children)
            f = eq.factorization
            if f is None:
                queued = case.todo + ((M_FACTOR_TEST, eq.poly),)
                self.tree.update(replace(case, todo=queued))
                return StepOutcome(True, M_RATIONALITY, f"queued factor search for a degree {d} equation")
            if len(f.distinct_factors()) >= 2 or any(m > 1 for _, m in f.factors):
                queued = case.todo + ((M_FACTOR_SPLIT, eq.poly),)
                self.tree.update(replace(case, todo=queued))
                return StepOutcome(True, M_RATIONALITY, "queued factor split of a univariate equation")
            self._update(replace(case, status=NO_RATIONAL, note=f"univariate equation in u{v} has no rational roots"))
            return StepOutcome(True, M_RATIONALITY, f"degree {d} equation in u{v} has no rational roots")
        return StepOutcome(False, M_RATIONALITY)

    def _linear_pairs(self, case: CaseNode):
        for idx, eq in enumerate(case.equations):
            for v in sorted(eq.linear_vars):
                yield idx, eq, v

    def _mod_sub_safe(self, case: CaseNode) -> StepOutcome:
        cands = []
        for idx, eq, v in self._linear_pairs(case):
            a = eq.poly.coeff_wrt(v, 1)
            if not case.ineq.knows_nonzero(a):
                continue
            impact = sum(e.term_count for e in case.equations if e is not eq and v in e.vars)
            cands.append(((eq.term_count + a.term_count, impact, idx, v), idx, v, a, eq))
        cands.sort(key=lambda t: t[0])
        blown: CaseNode | None = None
        for _, idx, v, a, eq in cands:
            b = eq.poly.coeff_wrt(v, 0)
            out = bind(case, v, -b, a, self.options.max_terms)
            if out.status == LIMIT:
                if blown is None:
                    blown = out
                continue
            self._update(out)
            return StepOutcome(True, M_SUB_SAFE, f"u{v} bound from equation {idx + 1}")
        if blown is not None:
            self._update(blown)
            return StepOutcome(True, M_SUB_SAFE, "every safe substitution exceeds the term budget")
        return StepOutcome(False, M_SUB_SAFE)

    def _mod_sub_split(self, case: CaseNode) -> StepOutcome:
        best = None
        for idx, eq, v in self._linear_pairs(case):
            a = eq.poly.coeff_wrt(v, 1)
            if case.ineq.knows_nonzero(a):
                continue
            if case.find_equation(a) is not None:
                # The coefficient is already required to vanish, so the
                # equation reduces to its variable-free part; branching
                # here would recreate the same case forever.
                b = eq.poly.coeff_wrt(v, 0)
                out = add_equations(case, [b], keep=lambda i: i != idx)
                self._update(out)
                return StepOutcome(
                    True, M_SUB_SPLIT,
                    f"coefficient of u{v} in equation {idx + 1} already vanishes",
                )
            key = (a.term_count, eq.term_count, idx, v)
            if best is None or key < best[0]:
                best = (key, idx, eq, v, a)
        if best is None:
            return StepOutcome(False, M_SUB_SPLIT)
        _, idx, eq, v, a = best
        if not self._budget_for_children(case, 2):
            return StepOutcome(True, M_SUB_SPLIT, "coefficient split hit the case budget")
        b = eq.poly.coeff_wrt(v, 0)
        canon = canonical_poly(a)

        def build_zero(cid: str) -> CaseNode:
            base = replace(case, id=cid, parent=case.id, assumption=(canon, "=0"), status=OPEN, note="")
            return add_equations(base, [a, b], keep=lambda i: i != idx)

        def build_nonzero(cid: str) -> CaseNode:
            base = replace(case, id=cid, parent=case.id, assumption=(canon, "!=0"), status=OPEN, note="")
            base = add_nonzero(base, [a])
            if base.status in TERMINAL_STATUSES:
                return base
            return bind(base, v, -b, a, self.options.max_terms)

        children = self._add_children(case, [build_zero, build_nonzero], note=f"coefficient of u{v} in equation {idx + 1}")
        return StepOutcome(True, M_SUB_SPLIT, f"split on the coefficient of u{v}", children)

    def _factor_one(self, case: CaseNode, idx: int) -> str:
        eq = case.equations[idx]
        f = _cached_try_factor(eq.poly)
        eqs = list(case.equations)
        eqs[idx] = eq.with_factorization(f)
        self._update(refresh_case(replace(case, equations=tuple(eqs))))
        kinds = len(f.distinct_factors())
        if f.is_nontrivial(eq.poly):
            return f"equation {idx + 1} factors into {kinds} distinct pieces ({f.status})"
        return f"equation {idx + 1} did not factor ({f.status})"

    def _mod_factor_test(self, case: CaseNode) -> StepOutcome:
        order = sorted(range(len(case.equations)), key=lambda i: (case.equations[i].term_count, i))
        for idx in order:
            eq = case.equations[idx]
            if eq.factorization is not None:
                continue
            note = self._factor_one(case, idx)
            fresh = self.tree.node(case.id)
            if fresh.status in TERMINAL_STATUSES or fresh.status == SOLVED:
                return StepOutcome(True, M_FACTOR_TEST, note)
            new_idx = fresh.find_equation(eq.poly)
            if new_idx is None:
                return StepOutcome(True, M_FACTOR_TEST, note)
            got = fresh.equations[new_idx].factorization
            if got is not None and got.is_nontrivial(eq.poly):
                return StepOutcome(True, M_FACTOR_TEST, note)
            case = fresh
        return StepOutcome(False, M_FACTOR_TEST)

    def _factor_split(self, case: CaseNode, idx: int) -> tuple[str, ...] | None:
        eq = case.equations[idx]
        factors = eq.factorization.distinct_factors()
        if not self._budget_for_children(case, len(factors)):
            return None
        builders = []
        for j, fj in enumerate(factors):
            def build(cid: str, j: int = j, fj: Poly = fj) -> CaseNode:
                base = replace(case, id=cid, parent=case.id, assumption=(fj, "=0"), status=OPEN, note="")
                base = add_equations(base, [fj], keep=lambda i: i != idx)
                if base.status in TERMINAL_STATUSES:
                    return base
                return add_nonzero(base, factors[:j])
            builders.append(build)
        return self._add_children(case, builders, note=f"factors of equation {idx + 1}")

    def _mod_factor_split(self, case: CaseNode) -> StepOutcome:
        order = sorted(range(len(case.equations)), key=lambda i: (case.equations[i].term_count, i))
        for idx in order:
            eq = case.equations[idx]
            if eq.factorization is None or len(eq.factorization.distinct_factors()) < 2:
                continue
            children = self._factor_split(case, idx)
            if children is None:
                return StepOutcome(True, M_FACTOR_SPLIT, "factor split hit the case budget")
            return StepOutcome(True, M_FACTOR_SPLIT, f"case per factor of equation {idx + 1}", children)
        return StepOutcome(False, M_FACTOR_SPLIT)

    def _mod_split_full(self, case: CaseNode) -> StepOutcome:
        if not case.equations:
            return StepOutcome(False, M_SPLIT_FULL)
        if any(eq.linear_vars for eq in case.equations):
            return StepOutcome(False, M_SPLIT_FULL)
        cands = split_candidates(case)
        if not cands:
            return StepOutcome(False, M_SPLIT_FULL)
        eq_indices = {c.eq_index for c in cands}
        target = min(eq_indices, key=lambda i: (case.equations[i].term_count, i))
        chosen = min((c for c in cands if c.eq_index == target), key=lambda c: c.var)
        out = add_equations(case, chosen.split_polys(), keep=lambda i: i != chosen.eq_index)
        self._update(out)
        return StepOutcome(
            True,
            M_SPLIT_FULL,
            f"equation {chosen.eq_index + 1} split along u{chosen.var} (degree {chosen.degree})",
        )

    def _mod_split_once(self, case: CaseNode) -> StepOutcome:
        queued = {p for code, p in case.todo if code == M_SPLIT_ONCE}
        for cand in rank_split_candidates(case):
            if cand.lin.is_zero():
                continue
            q = cand.pair_poly()
            if q in queued or case.ineq.knows_nonzero(q) or case.find_equation(q) is not None:
                continue
            self.tree.update(replace(case, todo=case.todo + ((M_SPLIT_ONCE, q),)))
            return StepOutcome(True, M_SPLIT_ONCE, f"queued pair branch for u{cand.var} in equation {cand.eq_index + 1}")
        return StepOutcome(False, M_SPLIT_ONCE)

    def _mod_yield(self, case: CaseNode) -> StepOutcome:
        n = len(split_candidates(case))
        self.tree.update(replace(case, status=AWAITING, note=f"{n} split candidates available"))
        return StepOutcome(True, M_YIELD, f"waiting with {n} split candidates")

    _DISPATCH = {
        M_TODO: _mod_todo,
        M_SUB_SAFE: _mod_sub_safe,
        M_SUB_SPLIT: _mod_sub_split,
        M_YIELD: _mod_yield,
        M_FACTOR_SPLIT: _mod_factor_split,
        M_FACTOR_TEST: _mod_factor_test,
        M_RATIONALITY: _mod_rationality,
        M_SPLIT_FULL: _mod_split_full,
        M_SPLIT_ONCE: _mod_split_once,
    }

    # -- public stepping api ---------------------------------------------------

    def apply_module(self, case_id: str, code: str) -> StepOutcome:
        """Run one step module against one case.  Returns whether it
        applied; the tree is updated in place."""
        if code not in self._DISPATCH:
            raise SolverError(f"unknown step module {code}")
        case = self.tree.node(case_id)
        if case.status == AWAITING:
            case = self.tree.update(replace(case, status=OPEN, note=""))
        if case.status != OPEN:
            raise SolverError(f"case {case_id} is {case.status}")
        out = self._DISPATCH[code](self, case)
        if out.applied:
            self.trace.emit(
                "step",
                ("case", case_id),
                ("module", code),
                ("note", out.note),
            )
        return out

    def candidates(self, case_id: str) -> list[SplitCandidate]:
        return rank_split_candidates(self.tree.node(case_id))

    def apply_split(self, case_id: str, cand: SplitCandidate, once: bool = False) -> StepOutcome:
        """Interactive entry point: apply a chosen split candidate, as a
        full in-place split or as a queued two-way branch."""
        case = self.tree.node(case_id)
        if case.status == AWAITING:
            case = self.tree.update(replace(case, status=OPEN, note=""))
        if case.status != OPEN:
            raise SolverError(f"case {case_id} is {case.status}")
        if cand.eq_index >= len(case.equations):
            raise SolverError("stale split candidate")
        rebuilt = cand.low + cand.lin * Poly.var(cand.var)
        for n, c in cand.uppers:
            rebuilt = rebuilt + c * Poly.var(cand.var) ** n
        if rebuilt != case.equations[cand.eq_index].poly:
            raise SolverError("stale split candidate")
        if once:
            q = cand.pair_poly()
            children = self._branch_pair(case, q)
            out = StepOutcome(True, M_SPLIT_ONCE, f"pair branch on equation {cand.eq_index + 1}", children or ())
        else:
            updated = add_equations(case, cand.split_polys(), keep=lambda i: i != cand.eq_index)
            self._update(updated)
            out = StepOutcome(True, M_SPLIT_FULL, f"equation {cand.eq_index + 1} split along u{cand.var}")
        self.trace.emit("step", ("case", case_id), ("module", out.module), ("note", out.note))
        return out

    # -- batch runs -------------------------------------------------------------

    def _stop_reached(self) -> bool:
        stop = self.options.stop_after_families
        return stop is not None and len(self.families) >= stop

    def run(self, start: str = "1", boundary: Callable[[], None] | None = None) -> RunResult:
        """Depth-first batch run from the given case (default the root).

        Stops when every reachable case is terminal or waiting, when the
        family target is reached, or when budgets trip.  A boundary
        callback, if given, runs between module applications; it may
        raise RunAbort to stop the run cleanly mid-flight (the summary
        trace line is then withheld, so a later resumed run stays
        comparable to an uninterrupted one)."""
        result = RunResult()
        stack = [start]
        try:
            while stack:
                if self._stop_reached():
                    result.stopped_early = True
                    break
                cid = stack.pop()
                node = self.tree.node(cid)
                if node.status == BRANCHED:
                    stack.extend(reversed(self.tree.children[cid]))
                    continue
                if node.status in TERMINAL_STATUSES:
                    continue
                if not node.explore and not self.options.explore_nonzero:
                    self.trace.emit("skip", ("case", cid), ("note", "deferred nonzero branch"))
                    continue
                result.visited += 1
                before = len(self.families)
                self._drive(cid, boundary)
                result.new_families.extend(f.id for f in self.families[before:])
                node = self.tree.node(cid)
                if node.status == BRANCHED:
                    stack.extend(reversed(self.tree.children[cid]))
        except RunAbort:
            result.aborted = True
            return result
        self.trace.emit(
            "run",
            ("visited", str(result.visited)),
            ("families", str(len(self.families))),
            ("cases", str(self.tree.case_count())),
        )
        return result

    def _drive(self, cid: str, boundary: Callable[[], None] | None = None) -> None:
        while True:
            if boundary is not None:
                boundary()
            node = self.tree.node(cid)
            if node.status != OPEN:
                return
            if self._stop_reached():
                return
            applied = False
            for code in self.options.plist:
                out = self._DISPATCH[code](self, node)
                if out.applied:
                    self.trace.emit("step", ("case", cid), ("module", code), ("note", out.note))
                    applied = True
                    break
                node = self.tree.node(cid)
            if not applied:
                self.tree.update(replace(node, status=AWAITING, note="no step module applies"))
                self.trace.emit("status", ("case", cid), ("status", AWAITING), ("note", "no step module applies"))
                return

    # -- inspection -------------------------------------------------------------

    def case_detail(self, case_id: str) -> dict:
        node = self.tree.node(case_id)
        fact_of = lambda eq: (
            None
            if eq.factorization is None
            else {
                "status": eq.factorization.status,
                "factors": [[format_poly(f), m] for f, m in eq.factorization.factors],
            }
        )
        return {
            "id": node.id,
            "parent": node.parent,
            "status": node.status,
            "note": node.note,
            "explore": node.explore,
            "assumption": None
            if node.assumption is None
            else {"poly": format_poly(node.assumption[0]), "relation": node.assumption[1]},
            "equations": [
                {
                    "poly": format_poly(eq.poly),
                    "terms": eq.term_count,
                    "degree": eq.poly.degree(),
                    "vars": [f"u{v}" for v in sorted(eq.vars)],
                    "factorization": fact_of(eq),
                }
                for eq in node.equations
            ],
            "nonzero": [format_poly(p) for p in node.ineq.sorted_nonzero()],
            "or_groups": [sorted(format_poly(p) for p in g) for g in node.ineq.or_groups],
            "bindings": [
                {"var": b.var, "num": format_poly(b.num), "den": format_poly(b.den)} for b in node.bindings
            ],
            "todo": [[code, format_poly(p)] for code, p in node.todo],
            "children": list(self.tree.children.get(case_id, [])),
        }

    def tree_summary(self) -> dict:
        return {
            "cases": self.tree.case_count(),
            "statuses": self.tree.status_counts(),
            "families": [f.id for f in self.families],
        }

    def family_detail(self, fam: SolutionFamily) -> dict:
        return {
            "id": fam.id,
            "case": fam.case_id,
            "free": [f"u{v}" for v in fam.free_params],
            "bindings": [
                {"var": f"u{v}", "num": format_poly(n), "den": format_poly(d)} for v, n, d in fam.bindings
            ],
            "inequalities": [format_poly(p) for p in fam.inequalities],
            "total_vars": fam.total_vars,
        }
