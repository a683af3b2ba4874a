"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from monomials to nonzero coefficients.  A
monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
index with every exponent positive; the empty tuple is the constant
monomial.  Variables are positive integers, displayed as ``u<k>``.

Coefficients are stored as plain ints whenever they are integral and as
``fractions.Fraction`` otherwise.  The two types compare and hash
consistently in Python, so term dictionaries stay canonical while the
dominant all-integer case avoids Fraction overhead.

The term order used for display, leading-term queries and sign
normalisation is graded lexicographic: higher total degree wins, ties are
broken by giving earlier variables higher significance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

Coeff = int | Fraction
Mono = tuple[tuple[int, int], ...]

CONST_MONO: Mono = ()


class PolyError(ValueError):
    """Raised for invalid polynomial operations."""


class PolyParseError(PolyError):
    """Raised when polynomial text cannot be parsed."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _intify(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def mono_mul(a: Mono, b: Mono) -> Mono:
    """Product of two monomials (merge of sorted exponent vectors)."""
    if not a:
        return b
    if not b:
        return a
    out: list[tuple[int, int]] = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_key(m: Mono) -> tuple:
    """Graded lexicographic sort key; larger key means larger monomial."""
    return (mono_degree(m), tuple((-v, e) for v, e in m))


def mono_divides(a: Mono, b: Mono) -> bool:
    """True if monomial a divides monomial b."""
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


def mono_div(a: Mono, b: Mono) -> Mono:
    """Quotient a / b, assuming b divides a."""
    db = dict(b)
    out = []
    for v, e in a:
        r = e - db.get(v, 0)
        if r < 0:
            raise PolyError("monomial does not divide")
        if r:
            out.append((v, r))
    return tuple(out)


def mono_gcd(a: Mono, b: Mono) -> Mono:
    db = dict(b)
    out = []
    for v, e in a:
        f = db.get(v, 0)
        if f:
            out.append((v, min(e, f)))
    return tuple(out)


class Poly:
    """Immutable sparse polynomial.  Do not mutate ``terms``."""

    __slots__ = ("terms", "_hash")

    terms: dict[Mono, Coeff]

    def __init__(self, terms: dict[Mono, Coeff] | None = None) -> None:
        # terms is trusted to be clean: no zero coefficients, Fractions
        # reduced to ints where integral.  Use from_terms otherwise.
        object.__setattr__(self, "terms", terms or {})
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value) -> None:
        raise AttributeError("Poly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return _ZERO

    @staticmethod
    def one() -> "Poly":
        return _ONE

    @staticmethod
    def const(c: Coeff | str) -> "Poly":
        if isinstance(c, str):
            c = Fraction(c)
        c = _intify(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
        if c == 0:
            return _ZERO
        return Poly({CONST_MONO: c})

    @staticmethod
    def var(v: int, exp: int = 1) -> "Poly":
        if v <= 0:
            raise PolyError(f"variable index must be positive, got {v}")
        if exp <= 0:
            raise PolyError(f"exponent must be positive, got {exp}")
        return Poly({((v, exp),): 1})

    @staticmethod
    def from_terms(pairs: Iterable[tuple[Mono, Coeff]]) -> "Poly":
        acc: dict[Mono, Coeff] = {}
        for m, c in pairs:
            if m:
                m = tuple(sorted((v, e) for v, e in m if e))
            acc[m] = acc.get(m, 0) + c
        return Poly({m: _intify(c) for m, c in acc.items() if c != 0})

    # -- basic queries --------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and CONST_MONO in self.terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial as a Fraction."""
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise PolyError("polynomial is not constant")
        return Fraction(self.terms[CONST_MONO])

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def vars(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return frozenset(out)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def degree_in(self, v: int) -> int:
        """Degree in variable v; 0 if v does not occur (also for zero)."""
        d = 0
        for m in self.terms:
            for mv, e in m:
                if mv == v and e > d:
                    d = e
        return d

    def degrees(self) -> dict[int, int]:
        """Max exponent per occurring variable."""
        out: dict[int, int] = {}
        for m in self.terms:
            for v, e in m:
                if e > out.get(v, 0):
                    out[v] = e
        return out

    def leading_mono(self) -> Mono:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        return max(self.terms, key=mono_key)

    def leading_coeff(self) -> Coeff:
        return self.terms[self.leading_mono()]

    # -- arithmetic -----------------------------------------------------

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: "Poly | Coeff") -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        small, big = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s == 0:
                del out[m]
            else:
                out[m] = _intify(s)
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other: "Poly | Coeff") -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "Poly | Coeff") -> "Poly":
        return (-self) + other

    def __mul__(self, other: "Poly | Coeff") -> "Poly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return _ZERO
            if other == 1:
                return self
            return Poly({m: _intify(c * other) for m, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return _ZERO
        small, big = (self, other) if len(self.terms) <= len(other.terms) else (other, self)
        out: dict[Mono, Coeff] = {}
        get = out.get
        for m1, c1 in small.terms.items():
            for m2, c2 in big.terms.items():
                m = mono_mul(m1, m2)
                s = get(m, 0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly({m: _intify(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise PolyError("negative power")
        result = _ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash(frozenset((m, Fraction(c)) for m, c in self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    # -- structure queries ----------------------------------------------

    def coeff_wrt(self, v: int, n: int) -> "Poly":
        """Coefficient of v**n, a polynomial free of v (n=0 gives the
        part of the polynomial not containing v)."""
        out: dict[Mono, Coeff] = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (mv, me) in enumerate(m):
                if mv == v:
                    e = me
                    rest = m[:i] + m[i + 1:]
                    break
            if e == n:
                out[rest] = c
        return Poly(out)

    def coeffs_wrt(self, v: int) -> dict[int, "Poly"]:
        """All coefficients with respect to v in one pass: a map from
        exponent n to the coefficient polynomial of v**n."""
        buckets: dict[int, dict[Mono, Coeff]] = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (mv, me) in enumerate(m):
                if mv == v:
                    e = me
                    rest = m[:i] + m[i + 1:]
                    break
            buckets.setdefault(e, {})[rest] = c
        return {n: Poly(d) for n, d in buckets.items()}

    def eval_at(self, point: Mapping[int, Coeff]) -> Fraction:
        """Exact evaluation.  Raises PolyError on a missing variable."""
        total = Fraction(0)
        for m, c in self.terms.items():
            val = Fraction(c)
            for v, e in m:
                if v not in point:
                    raise PolyError(f"no value for u{v}")
                val *= Fraction(point[v]) ** e
            total += val
        return total

    def subs_poly(self, v: int, value: "Poly") -> "Poly":
        """Substitute a polynomial for v (Horner over the coefficients)."""
        if self.degree_in(v) == 0:
            return self
        coeffs = self.coeffs_wrt(v)
        d = max(coeffs)
        result = coeffs.get(d, _ZERO)
        for n in range(d - 1, -1, -1):
            result = result * value + coeffs.get(n, _ZERO)
        return result

    def subs_ratfun(self, v: int, num: "Poly", den: "Poly") -> "Poly":
        """Fraction-free substitution v -> num/den.

        Returns den**d * self evaluated at v = num/den, where d is the
        degree of self in v.  The result is a polynomial again; callers
        that track equations multiply both sides by den**d, which is
        harmless while den is known nonzero.
        """
        if den.is_zero():
            raise PolyError("zero denominator in substitution")
        if v in num.vars() or v in den.vars():
            raise PolyError(f"substitution value for u{v} contains u{v}")
        d = self.degree_in(v)
        if d == 0:
            return self
        coeffs = self.coeffs_wrt(v)
        result = coeffs.get(d, _ZERO)
        den_pow = _ONE
        for n in range(d - 1, -1, -1):
            den_pow = den_pow * den
            result = result * num + coeffs.get(n, _ZERO) * den_pow
        return result

    def content_primitive(self) -> tuple[Fraction, Mono, "Poly"]:
        """Split into (content, monomial, primitive).

        content * monomial * primitive reconstructs the polynomial
        exactly.  The primitive part has integer coefficients with
        collective gcd 1, no common monomial factor, and a positive
        leading coefficient in the graded lexicographic order; the sign
        lives in the content.
        """
        if not self.terms:
            raise PolyError("zero polynomial has no content")
        from math import gcd, lcm

        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            f = Fraction(c)
            num_gcd = gcd(num_gcd, abs(f.numerator))
            den_lcm = lcm(den_lcm, f.denominator)
        content = Fraction(num_gcd, den_lcm)

        mono = None
        for m in self.terms:
            if mono is None:
                mono = m
            else:
                mono = mono_gcd(mono, m)
            if not mono:
                break
        mono = mono or CONST_MONO

        inv = 1 / content
        prim_terms = {mono_div(m, mono): _intify(Fraction(c) * inv) for m, c in self.terms.items()}
        prim = Poly(prim_terms)
        if prim.leading_coeff() < 0:
            prim = -prim
            content = -content
        return content, mono, prim

    def primitive(self) -> "Poly":
        """Primitive part (sign-normalised, content and monomial kept)."""
        if not self.terms:
            return self
        content, mono, prim = self.content_primitive()
        sign = -1 if content < 0 else 1
        return Poly.from_terms([(mono_mul(m, mono), sign * c) for m, c in prim.terms.items()])

    def sorted_terms(self) -> list[tuple[Mono, Coeff]]:
        return sorted(self.terms.items(), key=lambda it: mono_key(it[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"


_ZERO = Poly({})
_ONE = Poly({CONST_MONO: 1})


def poly_div_exact(p: Poly, g: Poly) -> Poly | None:
    """Exact division: return q with p == q * g, or None if g does not
    divide p.  Works by repeated elimination of the leading term."""
    if g.is_zero():
        raise PolyError("division by zero polynomial")
    if p.is_zero():
        return _ZERO
    q_terms: dict[Mono, Coeff] = {}
    lm_g = g.leading_mono()
    lc_g = Fraction(g.leading_coeff())
    rest = p
    steps = 0
    bound = p.term_count * g.term_count + p.term_count + 16
    while rest:
        steps += 1
        if steps > bound:
            return None
        lm = rest.leading_mono()
        if not mono_divides(lm_g, lm):
            return None
        qm = mono_div(lm, lm_g)
        qc = _intify(Fraction(rest.leading_coeff()) / lc_g)
        q_terms[qm] = qc
        rest = rest - Poly({qm: qc}) * g
    return Poly(q_terms)


# -- text form ----------------------------------------------------------

def _format_coeff(c: Coeff) -> str:
    f = Fraction(c)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_poly(p: Poly) -> str:
    """Canonical text form, e.g. '3/2*u1^2*u3 - u2 + 5'."""
    if not p.terms:
        return "0"
    parts: list[str] = []
    for m, c in p.sorted_terms():
        f = Fraction(c)
        neg = f < 0
        af = -f if neg else f
        factors = [f"u{v}" if e == 1 else f"u{v}^{e}" for v, e in m]
        if not factors:
            body = _format_coeff(af)
        elif af == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(af)] + factors)
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            yield ("op", ch, i)
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("int", text[i:j], i)
            i = j
            continue
        if ch == "u":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise PolyParseError("variable name needs an index", i)
            yield ("var", text[i:j], i)
            i = j
            continue
        raise PolyParseError(f"unexpected character {ch!r}", i)


def parse_poly(text: str) -> Poly:
    """Parse the canonical text form.  Accepts integer and num/den
    coefficients, '*' products, '^' powers and u<k> variables."""
    tokens = list(_tokenize(text))
    if not tokens:
        raise PolyParseError("empty polynomial", 0)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", "", len(text))

    def take():
        nonlocal pos
        t = peek()
        pos += 1
        return t

    def parse_factor() -> Poly:
        kind, val, at = take()
        if kind == "int":
            if peek()[:2] == ("op", "/"):
                take()
                k2, v2, at2 = take()
                if k2 != "int":
                    raise PolyParseError("expected denominator digits", at2)
                if int(v2) == 0:
                    raise PolyParseError("zero denominator", at2)
                return Poly.const(Fraction(int(val), int(v2)))
            return Poly.const(int(val))
        if kind == "var":
            v = int(val[1:])
            if v <= 0:
                raise PolyParseError("variable index must be positive", at)
            exp = 1
            if peek()[:2] == ("op", "^"):
                take()
                k2, v2, at2 = take()
                if k2 != "int":
                    raise PolyParseError("expected exponent digits", at2)
                exp = int(v2)
                if exp <= 0:
                    raise PolyParseError("exponent must be positive", at2)
            return Poly.var(v, exp)
        raise PolyParseError(f"unexpected token {val!r}", at)

    def parse_term() -> Poly:
        p = parse_factor()
        while peek()[:2] == ("op", "*"):
            take()
            p = p * parse_factor()
        return p

    result = Poly.zero()
    sign = 1
    kind, val, _ = peek()
    if kind == "op" and val in "+-":
        take()
        sign = -1 if val == "-" else 1
    while True:
        result = result + parse_term() * sign
        kind, val, at = peek()
        if kind == "end":
            return result
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
            continue
        raise PolyParseError(f"unexpected token {val!r}", at)
