"""Case tree engine for solving polynomial systems by case distinction.

A case holds a system of polynomial equations (all implicitly ``= 0``),
a set of polynomials asserted nonzero, and the triangular variable
bindings accumulated so far.  Operations never mutate a case: binding a
variable or simplifying returns a new node, branching returns child
nodes.  The tree assigns dotted ids ("1", "1.2", "1.2.1", ...) so a
case's ancestry is readable from its name.

Substitutions are fraction free: replacing v by num/den multiplies each
affected equation by den**deg(v), which preserves the solution set while
den is known nonzero.  Equations are kept normalized (rational content
removed, sign fixed so the leading coefficient is positive); inequality
facts propagate through substitutions and are used to divide known
nonzero factors out of factored equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .factor import Factorization, try_factor
from .poly import Poly, PolyError, format_poly

OPEN = "open"
SOLVED = "solved"
NO_RATIONAL = "no-rational-solution"
CONTRADICTORY = "contradictory"
LIMIT = "resource-limit"
AWAITING = "awaiting-interaction"
BRANCHED = "branched"

TERMINAL_STATUSES = {SOLVED, NO_RATIONAL, CONTRADICTORY, LIMIT}

# Nonzero facts at most this large are run through the factor search so
# their factors become nonzero facts too.
_INEQ_FACTOR_LIMIT = 64


class SolverError(Exception):
    """Invalid operation on a case (not a resource problem)."""


class InstantiateError(Exception):
    """A numeric instantiation hit a zero denominator or inequality;
    retry with different parameter values."""


def poly_sort_key(p: Poly):
    return (p.degree(), p.term_count, format_poly(p))


class Equation:
    """A normalized polynomial equation with cached structure."""

    __slots__ = ("poly", "vars", "degs", "linear_vars", "factorization")

    def __init__(self, poly: Poly, factorization: Factorization | None = None) -> None:
        self.poly = poly
        self.vars = poly.vars()
        self.degs = poly.degrees()
        self.linear_vars = frozenset(v for v, d in self.degs.items() if d == 1)
        self.factorization = factorization

    @property
    def term_count(self) -> int:
        return self.poly.term_count

    def with_factorization(self, f: Factorization | None) -> "Equation":
        return Equation(self.poly, f)

    def __eq__(self, other) -> bool:
        return isinstance(other, Equation) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    def __repr__(self) -> str:
        return f"Equation({self.poly})"


class _Contradiction(Exception):
    def __init__(self, note: str) -> None:
        self.note = note


def canonical_poly(p: Poly) -> Poly:
    """Canonical representative of {c * p : c rational, c != 0}: integer
    coefficients with gcd 1, positive leading coefficient, monomial
    factors kept.  p and -p map to the same polynomial."""
    if p.is_zero() or p.is_constant():
        return Poly.one() if not p.is_zero() else p
    content, mono, prim = p.content_primitive()
    return prim * Poly.from_terms([(mono, 1)])


def _normalize_eq_poly(p: Poly) -> Poly | None:
    """Equation-normal form via canonical_poly.  None means the
    equation is trivially satisfied."""
    if p.is_zero():
        return None
    if p.is_constant():
        raise _Contradiction(f"equation reduces to nonzero constant {p}")
    return canonical_poly(p)


@dataclass(frozen=True)
class InequalitySet:
    """Polynomials asserted nonzero, plus or-groups where at least one
    member must be nonzero.  Members are stored in atomic normalized
    form: single variables and primitive, monomial-free polynomials."""

    nonzero: frozenset[Poly] = frozenset()
    or_groups: tuple[frozenset[Poly], ...] = ()

    def knows_nonzero(self, p: Poly) -> bool:
        if p.is_zero():
            return False
        if p.is_constant():
            return True
        content, mono, prim = p.content_primitive()
        for v, _ in mono:
            if Poly.var(v) not in self.nonzero:
                return False
        if prim.is_constant():
            return True
        return prim in self.nonzero

    def with_nonzero(self, polys: Iterable[Poly]) -> "InequalitySet":
        """Add nonzero facts, splitting off monomial variables and (for
        small members) factors.  Raises _Contradiction on a zero."""
        new = set(self.nonzero)
        stack = list(polys)
        while stack:
            p = stack.pop()
            if p.is_zero():
                raise _Contradiction("zero polynomial asserted nonzero")
            if p.is_constant():
                continue
            content, mono, prim = p.content_primitive()
            for v, _ in mono:
                new.add(Poly.var(v))
            if prim.is_constant() or prim in new:
                continue
            new.add(prim)
            if prim.term_count <= _INEQ_FACTOR_LIMIT:
                f = try_factor(prim)
                if f.is_nontrivial(prim):
                    stack.extend(fac for fac, _ in f.factors)
        return replace(self, nonzero=frozenset(new))

    def substituted(self, v: int, num: Poly, den: Poly) -> "InequalitySet":
        out = InequalitySet(frozenset(), ())
        carried: list[Poly] = []
        for p in self.nonzero:
            if v not in p.vars():
                carried.append(p)
            else:
                carried.append(p.subs_ratfun(v, num, den))
        out = out.with_nonzero(carried)
        groups: list[frozenset[Poly]] = []
        for group in self.or_groups:
            members: list[Poly] = []
            satisfied = False
            for p in group:
                q = p if v not in p.vars() else p.subs_ratfun(v, num, den)
                if q.is_zero():
                    continue
                if q.is_constant():
                    satisfied = True
                    break
                members.append(canonical_poly(q))
            if satisfied:
                continue
            if not members:
                raise _Contradiction("every alternative in an or-group became zero")
            groups.append(frozenset(members))
        return replace(out, or_groups=tuple(groups))

    def with_or_group(self, polys: Iterable[Poly]) -> "InequalitySet":
        members = [canonical_poly(p) for p in polys if not p.is_zero()]
        if any(p.is_constant() for p in members):
            return self
        if not members:
            raise _Contradiction("or-group with no satisfiable member")
        return replace(self, or_groups=self.or_groups + (frozenset(members),))

    def sorted_nonzero(self) -> list[Poly]:
        return sorted(self.nonzero, key=poly_sort_key)


class Binding(NamedTuple):
    var: int
    num: Poly
    den: Poly


@dataclass(frozen=True)
class CaseNode:
    """One case: an immutable snapshot of the working system."""

    id: str
    parent: str | None
    assumption: tuple[Poly, str] | None  # (poly, "=0" or "!=0")
    equations: tuple[Equation, ...]
    ineq: InequalitySet
    bindings: tuple[Binding, ...] = ()
    todo: tuple[tuple[str, Poly], ...] = ()
    status: str = OPEN
    explore: bool = True
    note: str = ""

    @property
    def depth(self) -> int:
        return self.id.count(".")

    def bound_vars(self) -> frozenset[int]:
        return frozenset(b.var for b in self.bindings)

    def max_term_count(self) -> int:
        return max((eq.term_count for eq in self.equations), default=0)

    def total_term_count(self) -> int:
        return sum(eq.term_count for eq in self.equations)

    def find_equation(self, p: Poly) -> int | None:
        """Index of the equation whose poly equals p (normalized), or
        None if it is no longer present."""
        target = _normalize_eq_poly(p) if not p.is_zero() else None
        if target is None:
            return None
        for i, eq in enumerate(self.equations):
            if eq.poly == target:
                return i
        return None


def _closed(case: CaseNode, status: str, note: str) -> CaseNode:
    return replace(case, status=status, note=note)


def refresh_case(case: CaseNode) -> CaseNode:
    """Simplification fixpoint: use inequality facts against factored
    equations, collapse or-groups, detect contradictions, and flag the
    case solved when no equations remain."""
    if case.status not in (OPEN, AWAITING):
        return case
    eqs = list(case.equations)
    ineq = case.ineq
    try:
        while True:
            changed = False

            # deduplicate, keeping first occurrence
            seen: set[Poly] = set()
            unique: list[Equation] = []
            for eq in eqs:
                if eq.poly not in seen:
                    seen.add(eq.poly)
                    unique.append(eq)
            if len(unique) != len(eqs):
                eqs = unique
                changed = True

            # strip known nonzero monomial variable factors
            for i, eq in enumerate(eqs):
                if eq.factorization is not None:
                    continue
                content, mono, prim = eq.poly.content_primitive()
                kept_mono = tuple((v, e) for v, e in mono if not ineq.knows_nonzero(Poly.var(v)))
                if kept_mono == mono:
                    continue
                norm = _normalize_eq_poly(prim * Poly.from_terms([(kept_mono, 1)]))
                if norm is None:
                    eqs.pop(i)
                else:
                    eqs[i] = Equation(norm)
                changed = True
                break
            if changed:
                continue

            for i, eq in enumerate(eqs):
                if ineq.knows_nonzero(eq.poly):
                    raise _Contradiction(f"equation {eq.poly} is known nonzero")
                f = eq.factorization
                if f is None:
                    continue
                kept = [(fac, mult) for fac, mult in f.factors if not ineq.knows_nonzero(fac)]
                if not kept:
                    raise _Contradiction("all factors of an equation are known nonzero")
                if len(kept) < len(f.factors):
                    p = Poly.one()
                    for fac, mult in kept:
                        p = p * fac**mult
                    norm = _normalize_eq_poly(p)
                    if norm is None:
                        eqs.pop(i)
                    else:
                        eqs[i] = Equation(norm, Factorization(Fraction(1), tuple(kept), f.status))
                    changed = True
                    break
                if len(kept) == 1 and (kept[0][1] > 1 or kept[0][0] != eq.poly):
                    fac = kept[0][0]
                    norm = _normalize_eq_poly(fac)
                    if norm is None:
                        eqs.pop(i)
                    else:
                        eqs[i] = Equation(norm, Factorization(Fraction(1), ((norm, 1),), f.status))
                    changed = True
                    break
            if changed:
                continue

            # or-group collapse against current facts and equations
            eq_polys = {eq.poly for eq in eqs}
            groups: list[frozenset[Poly]] = []
            promoted: list[Poly] = []
            for group in ineq.or_groups:
                if any(ineq.knows_nonzero(p) for p in group):
                    changed = True
                    continue
                members = [p for p in group if p not in eq_polys]
                if not members:
                    raise _Contradiction("every alternative in an or-group is forced zero")
                if len(members) == 1:
                    promoted.append(members[0])
                    changed = True
                    continue
                if len(members) != len(group):
                    changed = True
                groups.append(frozenset(members))
            if promoted or len(groups) != len(ineq.or_groups):
                ineq = replace(ineq, or_groups=tuple(groups)).with_nonzero(promoted)
                changed = True

            if not changed:
                break
    except _Contradiction as c:
        return _closed(case, CONTRADICTORY, c.note)

    case = replace(case, equations=tuple(eqs), ineq=ineq)
    if not case.equations and case.status in (OPEN, AWAITING):
        return _closed(case, SOLVED, "no equations remain")
    return case


def new_session(eq_polys: Iterable[Poly], ineq_polys: Iterable[Poly] = ()) -> CaseNode:
    """Build the root case from raw polynomials."""
    try:
        ineq = InequalitySet().with_nonzero(list(ineq_polys))
        eqs: list[Equation] = []
        for p in eq_polys:
            norm = _normalize_eq_poly(p)
            if norm is not None:
                eqs.append(Equation(norm))
    except _Contradiction as c:
        root = CaseNode("1", None, None, (), InequalitySet())
        return _closed(root, CONTRADICTORY, c.note)
    root = CaseNode("1", None, None, tuple(eqs), ineq)
    return refresh_case(root)


def _substitution_size_guard(case: CaseNode, v: int, num: Poly, den: Poly, max_terms: int) -> int | None:
    """Estimated upper bound on generated monomials, or None if safely
    small.  A generous multiple of max_terms is allowed because merges
    usually shrink the real result far below the bound."""
    tn, td = num.term_count, den.term_count
    worst = 0
    for eq in case.equations:
        if v not in eq.vars:
            continue
        buckets: dict[int, int] = {}
        for m in eq.poly.terms:
            e = 0
            for mv, me in m:
                if mv == v:
                    e = me
                    break
            buckets[e] = buckets.get(e, 0) + 1
        d = max(buckets)
        est = sum(cnt * (tn**n) * (td ** (d - n)) for n, cnt in buckets.items())
        worst = max(worst, est)
    if worst > 30 * max_terms:
        return worst
    return None


def bind(case: CaseNode, v: int, num: Poly, den: Poly, max_terms: int | None = None) -> CaseNode:
    """Record v = num/den and eliminate v from the whole case.

    den must be a nonzero constant or known nonzero from the case's
    inequalities.  num and den must not mention v or any previously
    bound variable (bindings stay triangular).
    """
    if any(b.var == v for b in case.bindings):
        raise SolverError(f"u{v} is already bound")
    if den.is_zero():
        raise SolverError("zero denominator in binding")
    if not den.is_constant() and not case.ineq.knows_nonzero(den):
        raise SolverError(f"denominator {den} is not known nonzero")
    touched = num.vars() | den.vars()
    if v in touched:
        raise SolverError(f"binding for u{v} mentions u{v}")
    already = case.bound_vars()
    if touched & already:
        raise SolverError("binding mentions a previously bound variable")

    if max_terms is not None:
        est = _substitution_size_guard(case, v, num, den, max_terms)
        if est is not None:
            return _closed(case, LIMIT, f"substitution for u{v} estimated at {est} terms")

    try:
        ineq = case.ineq.substituted(v, num, den)
        if not den.is_constant():
            ineq = ineq.with_nonzero([den])
        eqs: list[Equation] = []
        for eq in case.equations:
            if v not in eq.vars:
                eqs.append(eq)
                continue
            new_poly = eq.poly.subs_ratfun(v, num, den)
            if max_terms is not None and new_poly.term_count > max_terms:
                return _closed(
                    case, LIMIT, f"equation grew to {new_poly.term_count} terms (limit {max_terms})"
                )
            norm = _normalize_eq_poly(new_poly)
            if norm is not None:
                eqs.append(Equation(norm))
    except _Contradiction as c:
        return _closed(case, CONTRADICTORY, c.note)

    out = replace(
        case,
        equations=tuple(eqs),
        ineq=ineq,
        bindings=case.bindings + (Binding(v, num, den),),
    )
    return refresh_case(out)


def add_equations(case: CaseNode, polys: Iterable[Poly], keep: Callable[[int], bool] | None = None) -> CaseNode:
    """Replace the equation list: keep the equations selected by
    ``keep`` (by index; default all) and append the new polynomials."""
    eqs = [eq for i, eq in enumerate(case.equations) if keep is None or keep(i)]
    try:
        for p in polys:
            norm = _normalize_eq_poly(p)
            if norm is not None:
                eqs.append(Equation(norm))
    except _Contradiction as c:
        return _closed(case, CONTRADICTORY, c.note)
    return refresh_case(replace(case, equations=tuple(eqs)))


def add_nonzero(case: CaseNode, polys: Iterable[Poly]) -> CaseNode:
    try:
        ineq = case.ineq.with_nonzero(list(polys))
    except _Contradiction as c:
        return _closed(case, CONTRADICTORY, c.note)
    return refresh_case(replace(case, ineq=ineq))


class CaseTree:
    """Registry of cases by dotted id plus the original system."""

    def __init__(
        self,
        originals: Iterable[Poly],
        ineqs: Iterable[Poly] = (),
        declared_vars: Iterable[int] = (),
    ) -> None:
        self.originals: tuple[Poly, ...] = tuple(originals)
        self.original_ineqs: tuple[Poly, ...] = tuple(ineqs)
        vars_seen: set[int] = set(declared_vars)
        for p in self.originals:
            vars_seen |= p.vars()
        for p in self.original_ineqs:
            vars_seen |= p.vars()
        self.all_vars: frozenset[int] = frozenset(vars_seen)
        root = new_session(self.originals, self.original_ineqs)
        self.nodes: dict[str, CaseNode] = {root.id: root}
        self.children: dict[str, list[str]] = {root.id: []}

    @property
    def root_id(self) -> str:
        return "1"

    def node(self, cid: str) -> CaseNode:
        if cid not in self.nodes:
            raise SolverError(f"no case {cid}")
        return self.nodes[cid]

    def update(self, node: CaseNode) -> CaseNode:
        if node.id not in self.nodes:
            raise SolverError(f"no case {node.id}")
        self.nodes[node.id] = node
        return node

    def case_count(self) -> int:
        return len(self.nodes)

    def add_children(
        self, parent_id: str, builders: list[Callable[[str], CaseNode]], note: str = ""
    ) -> list[CaseNode]:
        parent = self.node(parent_id)
        out: list[CaseNode] = []
        for builder in builders:
            child_id = f"{parent_id}.{len(self.children[parent_id]) + 1}"
            child = builder(child_id)
            self.nodes[child_id] = child
            self.children[child_id] = []
            self.children[parent_id].append(child_id)
            out.append(child)
        self.nodes[parent_id] = replace(parent, status=BRANCHED, note=note)
        return out

    def branch(self, case_id: str, p: Poly) -> tuple[CaseNode, CaseNode]:
        """Two-way split on p: a child assuming p = 0 and a child
        assuming p nonzero."""
        case = self.node(case_id)
        if case.status not in (OPEN, AWAITING):
            raise SolverError(f"case {case_id} is {case.status}")
        if p.is_constant():
            raise SolverError("cannot branch on a constant")
        if case.ineq.knows_nonzero(p):
            raise SolverError(f"{p} is already known nonzero")

        canon = canonical_poly(p)

        def build_zero(cid: str) -> CaseNode:
            base = replace(case, id=cid, parent=case_id, assumption=(canon, "=0"), status=OPEN, note="")
            return add_equations(base, [p])

        def build_nonzero(cid: str) -> CaseNode:
            base = replace(case, id=cid, parent=case_id, assumption=(canon, "!=0"), status=OPEN, note="")
            return add_nonzero(base, [p])

        zero, nonzero = self.add_children(case_id, [build_zero, build_nonzero], note=f"branch on {canon}")
        return zero, nonzero

    def leaves(self) -> list[CaseNode]:
        return [n for cid, n in sorted(self.nodes.items()) if not self.children.get(cid)]

    def status_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for n in self.nodes.values():
            out[n.status] = out.get(n.status, 0) + 1
        return out


# -- solution families --------------------------------------------------------

@dataclass(frozen=True)
class SolutionFamily:
    """A rational solution family: every bound variable expressed as a
    rational function of the free parameters."""

    id: str
    case_id: str
    free_params: tuple[int, ...]
    bindings: tuple[tuple[int, Poly, Poly], ...]
    chain: tuple[Binding, ...]
    inequalities: tuple[Poly, ...]
    total_vars: int

    def binding_term_count(self) -> int:
        return sum(n.term_count + d.term_count for _, n, d in self.bindings)

    def key(self):
        return (
            frozenset(self.free_params),
            tuple(sorted((v, n, d) for v, n, d in self.bindings)),
        )

    def verify(self, originals: Iterable[Poly]) -> bool:
        """Substitute the resolved bindings into each original equation
        and require the zero polynomial."""
        table = {v: (n, d) for v, n, d in self.bindings}
        for p in originals:
            work = p
            for v in sorted(p.vars()):
                if v in table:
                    n, d = table[v]
                    work = work.subs_ratfun(v, n, d)
            if not work.is_zero():
                return False
        return True

    def evaluate(self, params: dict[int, Fraction | int]) -> dict[int, Fraction]:
        """Numeric instantiation at the given free parameter values."""
        missing = [v for v in self.free_params if v not in params]
        if missing:
            raise SolverError(f"missing values for parameters {missing}")
        point = {v: Fraction(params[v]) for v in self.free_params}
        values = dict(point)
        for v, num, den in self.bindings:
            dval = den.eval_at(point)
            if dval == 0:
                raise InstantiateError(f"denominator of u{v} vanished")
            values[v] = num.eval_at(point) / dval
        for p in self.inequalities:
            if p.eval_at(point) == 0:
                raise InstantiateError(f"nonzero condition {p} vanished")
        return values


def _ratfun_close(p: Poly, resolved: dict[int, tuple[Poly, Poly]]) -> tuple[Poly, Poly]:
    """Rewrite p over free parameters only, as num/den, by substituting
    already resolved variables.

    The fraction is reduced after every substitution; composing the whole
    chain first and reducing once at the end makes the intermediate
    numerators large enough that the final gcd becomes intractable.
    """
    num, den = p, Poly.one()
    for w in sorted(p.vars()):
        if w not in resolved:
            continue
        nw, dw = resolved[w]
        d = num.degree_in(w)
        if d == 0:
            continue
        num = num.subs_ratfun(w, nw, dw)
        den = den * dw**d
        num, den = _reduce_ratfun(num, den)
    return num, den


def _reduce_ratfun(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    from .factor import multivar_gcd
    from .poly import poly_div_exact

    if num.is_zero():
        return Poly.zero(), Poly.one()
    g = multivar_gcd(num, den)
    if not g.is_constant():
        qn, qd = poly_div_exact(num, g), poly_div_exact(den, g)
        if qn is not None and qd is not None:
            num, den = qn, qd
    content, mono, prim = den.content_primitive()
    den_norm = den * (1 / content)
    num_norm = num * (1 / content)
    return num_norm, den_norm


def extract_solution(tree: CaseTree, case: CaseNode, fam_id: str) -> SolutionFamily:
    """Turn a solved case into a SolutionFamily.

    First checks, by forward substitution of the binding chain, that
    every original equation vanishes identically; then back-substitutes
    so each bound variable is a rational function of free parameters.
    """
    if case.status != SOLVED:
        raise SolverError(f"case {case.id} is not solved")
    if case.ineq.or_groups:
        raise SolverError(f"case {case.id} still carries or-group constraints")

    for p in tree.originals:
        work = p
        for b in case.bindings:
            if b.var in work.vars():
                work = work.subs_ratfun(b.var, b.num, b.den)
        if not work.is_zero():
            raise SolverError(
                f"internal error: original equation {p} does not vanish in case {case.id}"
            )

    resolved: dict[int, tuple[Poly, Poly]] = {}
    for b in reversed(case.bindings):
        n_num, d_num = _ratfun_close(b.num, resolved)
        n_den, d_den = _ratfun_close(b.den, resolved)
        num = n_num * d_den
        den = d_num * n_den
        if den.is_zero():
            raise SolverError(f"internal error: resolved denominator of u{b.var} is zero")
        num, den = _reduce_ratfun(num, den)
        resolved[b.var] = (num, den)

    bound = case.bound_vars()
    free = tuple(sorted(tree.all_vars - bound))
    residual = []
    for p in case.ineq.sorted_nonzero():
        if p.vars() & bound:
            raise SolverError("internal error: residual inequality mentions a bound variable")
        residual.append(p)

    bindings = tuple((v, resolved[v][0], resolved[v][1]) for v in sorted(resolved))
    return SolutionFamily(
        id=fam_id,
        case_id=case.id,
        free_params=free,
        bindings=bindings,
        chain=case.bindings,
        inequalities=tuple(residual),
        total_vars=len(tree.all_vars),
    )
