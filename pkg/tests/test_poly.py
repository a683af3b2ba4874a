"""Polynomial kernel tests: exact arithmetic, canonical form, text round-trip."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crosszero.poly import (
    Poly,
    PolyError,
    PolyParseError,
    format_poly,
    mono_key,
    parse_poly,
    poly_div_exact,
)


def u(k, e=1):
    return Poly.var(k, e)


def c(x):
    return Poly.const(Fraction(x))


# -- strategies ----------------------------------------------------------

coeffs = st.fractions(
    min_value=-6, max_value=6, max_denominator=4
).filter(lambda f: f != 0)


@st.composite
def polys(draw, max_terms=6, max_vars=4, max_exp=3):
    n_terms = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(n_terms):
        n_vars = draw(st.integers(0, 2))
        mono = []
        used = set()
        for _ in range(n_vars):
            v = draw(st.integers(1, max_vars))
            if v in used:
                continue
            used.add(v)
            mono.append((v, draw(st.integers(1, max_exp))))
        terms.append((tuple(sorted(mono)), draw(coeffs)))
    return Poly.from_terms(terms)


points = st.dictionaries(
    st.integers(1, 4),
    st.fractions(min_value=-5, max_value=5, max_denominator=3),
    min_size=4,
    max_size=4,
)


def full_point(d):
    return {v: d.get(v, Fraction(0)) for v in range(1, 5)}


# -- ring axioms (evaluation is the independent oracle) -------------------

@settings(max_examples=200, deadline=None)
@given(polys(), polys(), points)
def test_add_matches_pointwise(p, q, pt):
    pt = full_point(pt)
    assert (p + q).eval_at(pt) == p.eval_at(pt) + q.eval_at(pt)


@settings(max_examples=200, deadline=None)
@given(polys(), polys(), points)
def test_mul_matches_pointwise(p, q, pt):
    pt = full_point(pt)
    assert (p * q).eval_at(pt) == p.eval_at(pt) * q.eval_at(pt)


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + Poly.zero() == p
    assert p * Poly.one() == p
    assert p - p == Poly.zero()


@settings(max_examples=100, deadline=None)
@given(polys())
def test_canonical_no_zero_coeffs(p):
    for m, coeff in p.terms.items():
        assert coeff != 0
        assert not isinstance(coeff, Fraction) or coeff.denominator > 1
        assert list(m) == sorted(m)
        assert all(e > 0 for _, e in m)


# -- coefficient extraction ----------------------------------------------

@settings(max_examples=150, deadline=None)
@given(polys(), st.integers(1, 4))
def test_coeff_wrt_reconstructs(p, v):
    d = p.degree_in(v)
    rebuilt = Poly.zero()
    for n in range(d + 1):
        part = p.coeff_wrt(v, n)
        assert v not in part.vars()
        rebuilt = rebuilt + part * Poly.var(v) ** n if n else rebuilt + part
    assert rebuilt == p


@settings(max_examples=150, deadline=None)
@given(polys(), st.integers(1, 4))
def test_coeffs_wrt_agree(p, v):
    table = p.coeffs_wrt(v)
    for n, part in table.items():
        assert part == p.coeff_wrt(v, n)


def test_degree_queries():
    p = parse_poly("u1^2*u2 + u2 - 3")
    assert p.degree() == 3
    assert p.degree_in(1) == 2
    assert p.degree_in(2) == 1
    assert p.degree_in(3) == 0
    assert p.degrees() == {1: 2, 2: 1}
    assert Poly.zero().degree() == -1


# -- substitution ---------------------------------------------------------

def test_subs_ratfun_hand_expanded():
    # p = v*w + w with v -> w/2; 2 * p|v=w/2 = w^2 + 2w by hand.
    p = u(1) * u(2) + u(2)
    got = p.subs_ratfun(1, u(2), c(2))
    assert got == u(2, 2) + 2 * u(2)


def test_subs_ratfun_degree_scaling():
    # p = v^2 + 1, v -> a/b gives a^2 + b^2
    p = u(1, 2) + c(1)
    assert p.subs_ratfun(1, u(2), u(3)) == u(2, 2) + u(3, 2)


def test_subs_ratfun_value_containing_target_rejected():
    p = u(1) + c(1)
    with pytest.raises(PolyError):
        p.subs_ratfun(1, u(1), c(1))
    with pytest.raises(PolyError):
        p.subs_ratfun(1, c(1), u(1) + c(1))
    with pytest.raises(PolyError):
        p.subs_ratfun(1, c(1), Poly.zero())


@settings(max_examples=150, deadline=None)
@given(polys(max_vars=3), polys(max_vars=2), polys(max_vars=2), points)
def test_subs_ratfun_matches_numeric(p, num, den, pt):
    # Shift num/den to variables 2..3 only so they are free of u1.
    num = Poly.from_terms(
        [(tuple((v + 1 if v == 1 else v, e) for v, e in m), co) for m, co in num.terms.items()]
    )
    den = Poly.from_terms(
        [(tuple((v + 1 if v == 1 else v, e) for v, e in m), co) for m, co in den.terms.items()]
    )
    if den.is_zero():
        den = Poly.one()
    pt = full_point(pt)
    dval = den.eval_at(pt)
    if dval == 0:
        return
    d = p.degree_in(1)
    got = p.subs_ratfun(1, num, den)
    pt2 = dict(pt)
    pt2[1] = num.eval_at(pt) / dval
    assert got.eval_at(pt) == dval ** d * p.eval_at(pt2)


@settings(max_examples=100, deadline=None)
@given(polys(max_vars=3), polys(max_vars=3), points)
def test_subs_poly_matches_numeric(p, val, pt):
    val = Poly.from_terms(
        [(tuple((2 if v == 1 else v, e) for v, e in m), co) for m, co in val.terms.items()]
    )
    pt = full_point(pt)
    pt2 = dict(pt)
    pt2[1] = val.eval_at(pt)
    assert p.subs_poly(1, val).eval_at(pt) == p.eval_at(pt2)


# -- content and primitive part -------------------------------------------

def test_content_primitive_examples():
    p = 2 * u(1) * u(2) + 2 * u(1)
    content, mono, prim = p.content_primitive()
    assert content == 2
    assert mono == ((1, 1),)
    assert prim == u(2) + c(1)

    q = Poly.const(Fraction(3, 2)) * u(1, 2)
    content, mono, prim = q.content_primitive()
    assert content == Fraction(3, 2)
    assert mono == ((1, 2),)
    assert prim == Poly.one()


def test_content_primitive_sign():
    p = -2 * u(1) - 2 * u(2)
    content, mono, prim = p.content_primitive()
    assert content == -2
    assert prim == u(1) + u(2)
    assert prim.leading_coeff() > 0


@settings(max_examples=150, deadline=None)
@given(polys())
def test_content_primitive_reconstructs(p):
    if p.is_zero():
        with pytest.raises(PolyError):
            p.content_primitive()
        return
    content, mono, prim = p.content_primitive()
    assert Poly.const(content) * Poly(dict([(mono, 1)])) * prim == p
    assert prim.leading_coeff() > 0
    nums = [Fraction(co).numerator for co in prim.terms.values()]
    dens = [Fraction(co).denominator for co in prim.terms.values()]
    from math import gcd
    g = 0
    for n in nums:
        g = gcd(g, n)
    assert g == 1
    assert set(dens) == {1}


# -- exact division --------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(polys(), polys())
def test_div_exact_roundtrip(p, g):
    if g.is_zero():
        return
    prod = p * g
    q = poly_div_exact(prod, g)
    assert q is not None
    assert q * g == prod


def test_div_exact_rejects_nondivisor():
    assert poly_div_exact(u(1) + c(1), u(2)) is None
    assert poly_div_exact(u(1, 2) + c(1), u(1) + c(1)) is None


# -- ordering and text form -------------------------------------------------

def test_grlex_order():
    # degree first, then earlier variable more significant
    assert mono_key(((1, 2),)) > mono_key(((1, 1), (2, 1)))
    assert mono_key(((1, 1), (2, 1))) > mono_key(((2, 2),))
    assert mono_key(((3, 3),)) > mono_key(((1, 2),))
    assert mono_key(()) < mono_key(((5, 1),))


def test_format_examples():
    assert format_poly(Poly.zero()) == "0"
    assert format_poly(u(1) - u(2)) == "u1 - u2"
    assert format_poly(c(Fraction(-5, 2)) + u(1, 2) * u(3) + 2 * u(1) * u(2)) == "u1^2*u3 + 2*u1*u2 - 5/2"
    assert format_poly(-u(1)) == "-u1"


@settings(max_examples=200, deadline=None)
@given(polys())
def test_text_roundtrip(p):
    assert parse_poly(format_poly(p)) == p


def test_parse_errors_have_positions():
    for bad in ["", "u", "u1^", "3/", "u1 +", "u0", "q1", "u1^0", "3/0"]:
        with pytest.raises(PolyParseError):
            parse_poly(bad)


def test_parse_accepts_signs():
    assert parse_poly("-u1 + 2") == -u(1) + c(2)
    assert parse_poly("+u1") == u(1)
    assert parse_poly("3/2*u2^2") == Poly.const(Fraction(3, 2)) * u(2, 2)


def test_eval_missing_var():
    with pytest.raises(PolyError):
        (u(1) + u(2)).eval_at({1: 1})


def test_hash_consistency():
    a = parse_poly("u1 + 1")
    b = parse_poly("1 + u1")
    assert a == b and hash(a) == hash(b)
    s = {a, b}
    assert len(s) == 1
