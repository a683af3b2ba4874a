"""Best-effort exact factorization helpers.

The solver needs two different guarantees from this module:

* complete detection of rational roots of univariate polynomials (the
  rationality test depends on it having no false negatives), and
* opportunistic factor discovery for multivariate polynomials, where an
  honest "found nothing" is acceptable and the result carries a status
  that never overstates what was proven.

Statuses: ``complete`` (the listed factors multiply back to the input and
every factor is certified irreducible over the rationals), ``partial``
(a genuine split was found but some factor may split further),
``irreducible-by-our-tests`` (no split found; the polynomial may still be
reducible), ``untested``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm

from .poly import (
    CONST_MONO,
    Mono,
    Poly,
    PolyError,
    mono_div,
    mono_divides,
    mono_gcd,
    poly_div_exact,
)

COMPLETE = "complete"
PARTIAL = "partial"
IRREDUCIBLE = "irreducible-by-our-tests"
UNTESTED = "untested"

# Polynomials beyond this size only get content extraction.
_FACTOR_TERM_LIMIT = 600
_KRONECKER_MAX_VARS = 3
_KRONECKER_MAX_DEGREE = 4


@dataclass(frozen=True)
class Factorization:
    """Result of a factor search: content * prod(factor**mult) == input."""

    content: Fraction
    factors: tuple[tuple[Poly, int], ...]
    status: str

    def expand(self) -> Poly:
        out = Poly.const(self.content)
        for f, mult in self.factors:
            out = out * f ** mult
        return out

    def distinct_factors(self) -> tuple[Poly, ...]:
        return tuple(f for f, _ in self.factors)

    def is_nontrivial(self, original: Poly) -> bool:
        """True if the search split something off: more than one distinct
        factor, a repeated factor, or a factor different from the
        primitive part of the input."""
        if len(self.factors) > 1:
            return True
        if not self.factors:
            return False
        f, mult = self.factors[0]
        if mult > 1:
            return True
        return f != original.primitive() and f != original


def _divisors(n: int) -> list[int]:
    """All positive divisors of |n| (n nonzero)."""
    n = abs(n)
    if n == 1:
        return [1]
    if n <= 10**12:
        small: list[int] = []
        large: list[int] = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                small.append(i)
                if i != n // i:
                    large.append(n // i)
            i += 1
        return small + large[::-1]
    # Large trailing or leading coefficients: lean on integer
    # factorization instead of trial division.
    from sympy import factorint

    primes = factorint(n)
    divs = [1]
    for p, e in primes.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _univ_coeff_list(p: Poly, v: int) -> list[Fraction]:
    """Dense coefficient list c[0..d] for a univariate polynomial."""
    d = p.degree_in(v)
    out = [Fraction(0)] * (d + 1)
    for m, c in p.terms.items():
        e = m[0][1] if m else 0
        out[e] += Fraction(c)
    return out


def _eval_univ(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def univ_rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of a univariate polynomial, sorted ascending.

    Complete by the rational root theorem: on the primitive integer form
    every rational root written in lowest terms has a numerator dividing
    the trailing coefficient and a denominator dividing the leading one.
    Every candidate is verified by exact evaluation.
    """
    vs = p.vars()
    if len(vs) != 1:
        raise PolyError("rational roots need a univariate polynomial")
    v = next(iter(vs))
    roots: list[Fraction] = []
    _, mono, prim = p.content_primitive()
    if mono:
        roots.append(Fraction(0))
    if prim.is_constant():
        return roots
    coeffs = _univ_coeff_list(prim, v)
    trailing = int(coeffs[0])
    leading = int(coeffs[-1])
    assert trailing != 0 and leading != 0
    for num in _divisors(trailing):
        for den in _divisors(leading):
            cand = Fraction(num, den)
            for r in (cand, -cand):
                if r not in roots and _eval_univ(coeffs, r) == 0:
                    roots.append(r)
    return sorted(roots)


def _frac_sqrt(f: Fraction) -> Fraction | None:
    if f < 0:
        return None
    rn = isqrt(f.numerator)
    rd = isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None


def discriminant_square_root(a: Fraction, b: Fraction, c: Fraction) -> tuple[Fraction, Fraction] | None:
    """Roots of a*x^2 + b*x + c if they are rational, else None.

    The quadratic has rational roots exactly when the discriminant is the
    square of a rational, which is checked exactly on numerator and
    denominator.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0:
        raise PolyError("leading coefficient must be nonzero")
    disc = b * b - 4 * a * c
    s = _frac_sqrt(disc)
    if s is None:
        return None
    return ((-b + s) / (2 * a), (-b - s) / (2 * a))


def _divide_out_root(coeffs: list[Fraction], r: Fraction) -> list[Fraction]:
    """Synthetic division of a dense coefficient list by (x - r)."""
    d = len(coeffs) - 1
    out = [Fraction(0)] * d
    acc = coeffs[d]
    out[d - 1] = acc
    for i in range(d - 1, 0, -1):
        acc = coeffs[i] + acc * r
        out[i - 1] = acc
    rem = coeffs[0] + acc * r
    assert rem == 0
    return out


def _poly_from_coeffs(coeffs: list[Fraction], v: int) -> Poly:
    return Poly.from_terms(
        [(((v, i),) if i else CONST_MONO, c) for i, c in enumerate(coeffs) if c != 0]
    )


def _root_to_linear_factor(r: Fraction, v: int) -> Poly:
    """Primitive linear polynomial with root r: den*v - num."""
    return Poly.var(v) * r.denominator - Poly.const(r.numerator)


def _factor_univariate(prim: Poly, v: int) -> tuple[list[tuple[Poly, int]], Fraction, bool]:
    """Split off every rational root.  Returns (factors, content_adjust,
    certified) where certified means the cofactor is provably
    irreducible."""
    coeffs = _univ_coeff_list(prim, v)
    factors: list[tuple[Poly, int]] = []
    adjust = Fraction(1)
    roots = univ_rational_roots(prim)
    for r in roots:
        mult = 0
        while len(coeffs) > 1 and _eval_univ(coeffs, r) == 0:
            coeffs = _divide_out_root(coeffs, r)
            mult += 1
        lin = _root_to_linear_factor(r, v)
        # dividing by (x - r) differs from the primitive factor by den
        adjust /= Fraction(r.denominator) ** mult
        factors.append((lin, mult))
    rest = _poly_from_coeffs(coeffs, v)
    if rest.is_constant():
        adjust *= rest.constant_value()
        return factors, adjust, True
    content, _, rest_prim = rest.content_primitive()
    adjust *= content
    certified = rest_prim.degree_in(v) == 2  # no rational roots, so irreducible
    factors.append((rest_prim, 1))
    return factors, adjust, certified


def _is_even_mono(m: Mono) -> bool:
    return all(e % 2 == 0 for _, e in m)


def _half_mono(m: Mono) -> Mono:
    return tuple((v, e // 2) for v, e in m)


def _try_perfect_square(prim: Poly) -> Poly | None:
    """Return s with prim == s*s, if such an s exists.

    Builds s term by term from the leading monomial down; each step is
    forced, so failure at any step is a proof that prim is not a square.
    """
    if prim.degree() % 2 or prim.term_count < 2:
        return None
    lm = prim.leading_mono()
    lc = Fraction(prim.leading_coeff())
    if not _is_even_mono(lm):
        return None
    root_c = _frac_sqrt(lc)
    if root_c is None:
        return None
    lead = Poly.from_terms([(_half_mono(lm), root_c)])
    s = lead
    rem = prim - s * s
    twice_lead_mono = _half_mono(lm)
    for _ in range(prim.term_count * 2 + 4):
        if rem.is_zero():
            return s
        rlm = rem.leading_mono()
        if not mono_divides(twice_lead_mono, rlm):
            return None
        step_mono = mono_div(rlm, twice_lead_mono)
        step_c = Fraction(rem.leading_coeff()) / (2 * root_c)
        step = Poly.from_terms([(step_mono, step_c)])
        s = s + step
        rem = prim - s * s
    return None


def _try_difference_of_squares(prim: Poly) -> tuple[Poly, Poly] | None:
    if prim.term_count != 2:
        return None
    (m1, c1), (m2, c2) = prim.sorted_terms()
    if Fraction(c1) * Fraction(c2) >= 0:
        return None
    if not (_is_even_mono(m1) and _is_even_mono(m2)):
        return None
    s1 = _frac_sqrt(Fraction(abs(c1)))
    s2 = _frac_sqrt(Fraction(abs(c2)))
    if s1 is None or s2 is None:
        return None
    # prim = s1^2*m1 - s2^2*m2 (leading coefficient positive)
    a = Poly.from_terms([(_half_mono(m1), s1)])
    b = Poly.from_terms([(_half_mono(m2), s2)])
    return (a - b, a + b)


def _kronecker_encode(p: Poly, var_order: list[int], base: int, image_var: int) -> Poly:
    terms = []
    for m, c in p.terms.items():
        d = dict(m)
        e = 0
        for i, v in enumerate(var_order):
            e += d.get(v, 0) * base**i
        terms.append((((image_var, e),) if e else CONST_MONO, c))
    return Poly.from_terms(terms)


def _kronecker_decode(p: Poly, var_order: list[int], base: int, image_var: int) -> Poly:
    terms = []
    for m, c in p.terms.items():
        e = m[0][1] if m else 0
        mono = []
        for v in var_order:
            e, rem = divmod(e, base)
            if rem:
                mono.append((v, rem))
        if e:
            return Poly.zero()  # exponent overflow: not decodable
        terms.append((tuple(sorted(mono)), c))
    return Poly.from_terms(terms)


def _try_kronecker(prim: Poly) -> tuple[Poly, Poly] | None:
    """Map to one variable, split off root-derived factors, and test
    whether any preimage combination divides the input exactly."""
    vs = sorted(prim.vars())
    if not 2 <= len(vs) <= _KRONECKER_MAX_VARS:
        return None
    if prim.degree() > _KRONECKER_MAX_DEGREE or prim.term_count > 60:
        return None
    base = max(prim.degrees().values()) + 1
    image_var = max(vs) + 1
    img = _kronecker_encode(prim, vs, base, image_var)
    if img.term_count != prim.term_count:
        return None
    try:
        roots = univ_rational_roots(img)
    except PolyError:
        return None
    if not roots:
        return None
    lins = [_root_to_linear_factor(r, image_var) for r in roots]
    # Try products of subsets of the linear image factors as candidate
    # divisor images, smallest subsets first.
    from itertools import combinations

    for size in range(1, min(len(lins), 4) + 1):
        for combo in combinations(range(len(lins)), size):
            cand_img = Poly.one()
            for i in combo:
                cand_img = cand_img * lins[i]
            cand = _kronecker_decode(cand_img, vs, base, image_var)
            if cand.is_zero() or cand.is_constant():
                continue
            cand = cand.primitive()
            q = poly_div_exact(prim, cand)
            if q is not None and not q.is_constant():
                return cand, q
    return None


def try_factor(p: Poly) -> Factorization:
    """Best-effort factor search.

    Always extracts rational content and common monomial factors; splits
    univariate polynomials completely into linear factors times a
    root-free cofactor; for multivariate polynomials tries, in order, the
    variables of degree one (gcd of the two coefficient halves), a
    two-term difference of squares, and a Kronecker-style single-variable
    image for small polynomials.
    """
    if p.is_zero():
        raise PolyError("cannot factor the zero polynomial")
    if p.is_constant():
        return Factorization(p.constant_value(), (), COMPLETE)

    content, mono, prim = p.content_primitive()
    factors: list[tuple[Poly, int]] = [(Poly.var(v), e) for v, e in mono]
    content = Fraction(content)

    if prim.is_constant():
        return Factorization(content * prim.constant_value(), tuple(factors), COMPLETE)

    if prim.term_count > _FACTOR_TERM_LIMIT:
        status = UNTESTED if not factors else PARTIAL
        return Factorization(content, tuple(factors + [(prim, 1)]), status)

    pieces, certified = _split_primitive(prim)
    adjust = Fraction(1)
    out: dict[Poly, int] = {}
    for f, mult in factors:
        out[f] = out.get(f, 0) + mult
    for f, mult in pieces:
        fc, fm, fp = f.content_primitive()
        adjust *= fc**mult
        for v, e in fm:
            out[Poly.var(v)] = out.get(Poly.var(v), 0) + e * mult
        if not fp.is_constant():
            out[fp] = out.get(fp, 0) + mult
    content *= adjust
    ordered = tuple(sorted(out.items(), key=lambda it: (it[0].degree(), it[0].term_count, str(it[0]))))
    result = Factorization(content, ordered, COMPLETE)
    if not result.is_nontrivial(p):
        return Factorization(content, ordered, IRREDUCIBLE)
    if not certified:
        return Factorization(content, ordered, PARTIAL)
    return result


def _split_primitive(prim: Poly) -> tuple[list[tuple[Poly, int]], bool]:
    """Recursive split of a non-constant polynomial into a factor list
    whose product equals the input exactly.  Returns (factors,
    certified)."""
    c0, m0, p0 = prim.content_primitive()
    if m0 or c0 != 1:
        lead: list[tuple[Poly, int]] = [(Poly.var(v), e) for v, e in m0]
        if c0 != 1:
            lead.append((Poly.const(c0), 1))
        if p0.is_constant():
            return lead, True
        inner, ci = _split_primitive(p0)
        return lead + inner, ci
    prim = p0
    vs = prim.vars()
    if len(vs) == 1:
        v = next(iter(vs))
        factors, adjust, certified = _factor_univariate(prim, v)
        if adjust != 1:
            factors = factors + [(Poly.const(adjust), 1)]
        return factors, certified

    degs = prim.degrees()
    linear_vars = [v for v in sorted(vs) if degs[v] == 1]
    for v in linear_vars:
        a = prim.coeff_wrt(v, 1)
        b = prim.coeff_wrt(v, 0)
        g = multivar_gcd(a, b)
        if not g.is_constant():
            qa = poly_div_exact(a, g)
            qb = poly_div_exact(b, g)
            if qa is None or qb is None:
                continue
            cofactor = qa * Poly.var(v) + qb
            left, cl = _split_primitive(g.primitive())
            right, cr = _split_primitive(cofactor.primitive())
            scale = poly_div_exact(prim, g.primitive() * cofactor.primitive())
            extra: list[tuple[Poly, int]] = []
            if scale is not None and scale.is_constant() and scale.constant_value() != 1:
                extra = [(scale, 1)]
            return left + right + extra, cl and cr
    if linear_vars:
        # Linear in some variable with coprime coefficient halves: any
        # factorization would put the linear variable in one factor and
        # force the other to divide both halves, so prim is irreducible.
        return [(prim, 1)], True

    sq = _try_perfect_square(prim)
    if sq is not None:
        inner, ci = _split_primitive(sq.primitive())
        scale = poly_div_exact(prim, sq.primitive() ** 2)
        doubled = [(f, 2 * mult) for f, mult in inner]
        extra = []
        if scale is not None and scale.is_constant() and scale.constant_value() != 1:
            extra = [(scale, 1)]
        return doubled + extra, ci

    ds = _try_difference_of_squares(prim)
    if ds is not None:
        left, cl = _split_primitive(ds[0].primitive())
        right, cr = _split_primitive(ds[1].primitive())
        scale = poly_div_exact(prim, ds[0].primitive() * ds[1].primitive())
        extra = []
        if scale is not None and scale.is_constant() and scale.constant_value() != 1:
            extra = [(scale, 1)]
        return left + right + extra, cl and cr

    kr = _try_kronecker(prim)
    if kr is not None:
        left, _ = _split_primitive(kr[0].primitive())
        right, _ = _split_primitive(kr[1].primitive())
        scale = poly_div_exact(prim, kr[0].primitive() * kr[1].primitive())
        extra = []
        if scale is not None and scale.is_constant() and scale.constant_value() != 1:
            extra = [(scale, 1)]
        return left + right + extra, False

    return [(prim, 1)], False


# -- greatest common divisor ----------------------------------------------

def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    return Fraction(gcd(a.numerator, b.numerator), lcm(a.denominator, b.denominator))


def _sympy_poly_gcd(p: Poly, q: Poly) -> Poly:
    """True multivariate gcd of two primitive integer-coefficient
    polynomials, delegated to sympy's sparse polynomial rings."""
    from sympy import ZZ
    from sympy.polys.rings import ring

    vs = sorted(p.vars() | q.vars())
    ring_obj = ring([f"u{v}" for v in vs], ZZ)[0]
    index = {v: k for k, v in enumerate(vs)}

    def encode(poly: Poly):
        data = {}
        for mono, coeff in poly.terms.items():
            exps = [0] * len(vs)
            for var, e in mono:
                exps[index[var]] = e
            data[tuple(exps)] = int(coeff)
        return ring_obj.from_dict(data)

    g = encode(p).gcd(encode(q))
    terms: dict[Mono, Fraction] = {}
    for exps, c in g.terms():
        mono = tuple((vs[k], int(e)) for k, e in enumerate(exps) if e)
        terms[mono] = Fraction(int(c))
    return Poly(terms)


def multivar_gcd(p: Poly, q: Poly) -> Poly:
    """A common divisor of p and q, best effort.

    Rational content and shared monomial factors are stripped directly;
    the gcd of the primitive cores comes from sympy.  The result always
    divides both inputs exactly (verified), and is the true gcd whenever
    the core computation succeeds; on any failure there the content and
    monomial part alone is returned, which still divides both.
    """
    if p.is_zero() and q.is_zero():
        return Poly.zero()
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()

    cp, mp, pp = p.content_primitive()
    cq, mq, pq = q.content_primitive()
    c = _frac_gcd(cp, cq)
    m = mono_gcd(mp, mq)
    base = Poly.const(c) * Poly({m: 1} if m else {CONST_MONO: 1})

    if pp.is_constant() or pq.is_constant():
        return base

    if not (pp.vars() & pq.vars()):
        return base

    try:
        g = _sympy_poly_gcd(pp, pq)
    except Exception:
        return base

    g = g.primitive() * base
    if not g.is_constant():
        if poly_div_exact(p, g) is None or poly_div_exact(q, g) is None:
            return base
        return g
    return base
