"""Sparse multivariate Laurent polynomials over Q with tracked unit denominators.

A :class:`Poly` is ``numerator / (disc^k * delta^l)`` where the numerator is a
finite sum of rational multiples of Laurent monomials, ``disc = a^2 - 16 b``
and ``delta = c^2 - 16``.  Monomials with negative exponents are units, so
this models the base rings ``Z[1/4][a, b, Delta^-1]`` and its degree-zero chart
``Z[1/4][c, delta^-1]`` (tensored with Q) with a unique representation: the
numerator is never divisible by a factor whose exponent is positive.

Monomials are packed into a single int, 16 biased bits per variable, so a
product of monomials is one integer addition.
"""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterable

from gmpy2 import mpq

from .scalar import DivisionByNonUnit, balanced, rational_mod, rational_valuation

# Canonical variable order.  Names after "i" are auxiliary symbols: series
# variables for formal group laws, an ideal generator, and formal operation
# symbols Q_k(x), Q_k(y), Q_jQ_k(x) used when deriving relations.
VARIABLES = (
    ("a", "b", "c", "d", "e", "u", "v", "x", "y", "alpha", "kappa", "lambda", "h", "i")
    + ("u1", "u2", "u3", "t", "H")
    + tuple(f"Q{k}x" for k in range(4))
    + tuple(f"Q{k}y" for k in range(4))
    + tuple(f"Q{j}Q{k}x" for j in range(4) for k in range(4))
)
INDEX = {name: k for k, name in enumerate(VARIABLES)}
NVARS = len(VARIABLES)

WEIGHTS = {
    "a": 1, "b": 2, "c": 0, "d": -1, "e": -3, "u": -1, "v": -3, "x": 2, "y": 3,
    "alpha": 0, "kappa": -2, "lambda": -6, "h": 0, "i": 0,
}

_BITS = 16
_MASK = (1 << _BITS) - 1
_BIAS = 1 << (_BITS - 1)
ONE = sum(_BIAS << (_BITS * k) for k in range(NVARS))


class NonUnitLeadingCoefficient(ArithmeticError):
    pass


# -- monomials ---------------------------------------------------------------

def mono(**exps: int) -> int:
    m = ONE
    for name, e in exps.items():
        m += e << (_BITS * INDEX[name])
    return m


def mono_from(exps: dict[int, int]) -> int:
    m = ONE
    for k, e in exps.items():
        m += e << (_BITS * k)
    return m


def mono_exp(m: int, k: int) -> int:
    return ((m >> (_BITS * k)) & _MASK) - _BIAS


def mono_exps(m: int) -> dict[int, int]:
    out = {}
    k = 0
    m0 = m
    while m0:
        e = (m0 & _MASK) - _BIAS
        if e:
            out[k] = e
        m0 >>= _BITS
        k += 1
    return out


def mono_shift(m: int, k: int, de: int) -> int:
    return m + (de << (_BITS * k))


def mono_degree(m: int) -> int:
    return sum(mono_exps(m).values())


# -- registered unit factors -------------------------------------------------

FACTORS = ("disc", "delta")
_A, _B, _C = INDEX["a"], INDEX["b"], INDEX["c"]
_SIXTEEN = mpq(16)
_MPQ = type(mpq(0))


def _reduce_mod_factor(terms: dict, j: int) -> dict:
    """Image of a numerator in the quotient by factor j (a Laurent ring again)."""
    out: dict = defaultdict(mpq)
    if j == 0:  # b -> a^2/16
        for m, c in terms.items():
            eb = mono_exp(m, _B)
            if eb:
                m = mono_shift(mono_shift(m, _B, -eb), _A, 2 * eb)
                c = c / _SIXTEEN**eb if eb > 0 else c * _SIXTEEN ** (-eb)
            out[m] += c
    else:  # c^2 -> 16
        for m, c in terms.items():
            ec = mono_exp(m, _C)
            q, r = divmod(ec, 2)
            if q:
                m = mono_shift(m, _C, -2 * q)
                c = c * _SIXTEEN**q if q > 0 else c / _SIXTEEN ** (-q)
            out[m] += c
    return {m: c for m, c in out.items() if c}


def _divisible_by_factor(terms: dict, j: int) -> bool:
    return not _reduce_mod_factor(terms, j)


def _factor_terms(j: int) -> dict:
    if j == 0:
        return {mono(a=2): mpq(1), mono(b=1): mpq(-16)}
    return {mono(c=2): mpq(1), ONE: mpq(-16)}


# -- raw term-dict arithmetic ------------------------------------------------

def _add_into(acc: dict, terms: dict, scale=1) -> None:
    for m, c in terms.items():
        v = acc.get(m)
        if v is None:
            acc[m] = c * scale if scale != 1 else c
        else:
            v = v + (c * scale if scale != 1 else c)
            if v:
                acc[m] = v
            else:
                del acc[m]


def _mul_terms(t1: dict, t2: dict) -> dict:
    if len(t1) < len(t2):
        t1, t2 = t2, t1
    acc: dict = {}
    get = acc.get
    for m2, c2 in t2.items():
        shift = m2 - ONE
        for m1, c1 in t1.items():
            m = m1 + shift
            v = get(m)
            acc[m] = c1 * c2 if v is None else v + c1 * c2
    return {m: c for m, c in acc.items() if c}


def _min_exponents(terms: dict) -> dict[int, int]:
    mins: dict[int, int] = {}
    first = True
    for m in terms:
        ex = mono_exps(m)
        if first:
            mins = dict(ex)
            first = False
            continue
        for k in list(mins):
            e = ex.get(k, 0)
            if e < mins[k]:
                mins[k] = e
        for k, e in ex.items():
            if k not in mins and e < 0:
                mins[k] = e
    for k in list(mins):
        if mins[k] > 0 and any(mono_exp(m, k) <= 0 for m in terms):
            mins[k] = 0
    return mins


def _monomial_content(terms: dict) -> int:
    """Largest monomial dividing every term (exponents may be negative)."""
    if not terms:
        return ONE
    ks: set[int] = set()
    for m in terms:
        ks.update(mono_exps(m))
    content = {}
    for k in ks:
        content[k] = min(mono_exp(m, k) for m in terms)
    return mono_from(content)


def _exact_div_terms(p: dict, q: dict) -> dict | None:
    """p / q in the Laurent ring, or None when q does not divide p."""
    if not q:
        raise ZeroDivisionError
    if not p:
        return {}
    cq = _monomial_content(q)
    q0 = {m - cq + ONE: c for m, c in q.items()}
    cp = _monomial_content(p)
    p0 = {m - cp + ONE: c for m, c in p.items()}
    lq = max(q0)
    lc = q0[lq]
    rest = {m: c for m, c in q0.items() if m != lq}
    quot: dict = {}
    rem = dict(p0)
    while rem:
        lp = max(rem)
        diff = lp - lq + ONE
        dex = mono_exps(diff)
        if any(e < 0 for e in dex.values()):
            return None
        coef = rem.pop(lp) / lc
        quot[diff] = coef
        shift = diff - ONE
        for m, c in rest.items():
            mm = m + shift
            v = rem.get(mm)
            nv = -coef * c if v is None else v - coef * c
            if nv:
                rem[mm] = nv
            elif v is not None:
                del rem[mm]
    shift = cp - cq
    return {m + shift: c for m, c in quot.items()}


# -- Poly --------------------------------------------------------------------

class Poly:
    """Immutable element of Q[vars^{+-1}][disc^-1, delta^-1]."""

    __slots__ = ("terms", "den", "_hash")

    def __init__(self, terms: dict | None = None, den: tuple[int, int] = (0, 0), *, _normal=False):
        terms = {m: c for m, c in (terms or {}).items() if c}
        if not terms:
            den = (0, 0)
        elif not _normal and any(den):
            terms, den = _normalize(terms, den)
        self.terms = terms
        self.den = den
        self._hash = None

    # construction
    @classmethod
    def const(cls, c) -> Poly:
        c = mpq(c)
        return cls({ONE: c} if c else {}, _normal=True)

    @classmethod
    def var(cls, name: str, power: int = 1) -> Poly:
        return cls({mono(**{name: power}): mpq(1)}, _normal=True)

    @classmethod
    def monomial(cls, coeff=1, **exps) -> Poly:
        return cls({mono(**exps): mpq(coeff)}, _normal=True)

    @classmethod
    def factor(cls, name: str, power: int = 1) -> Poly:
        """disc or delta to an integer power."""
        j = FACTORS.index(name)
        base = cls(_factor_terms(j), _normal=True)
        if power >= 0:
            return base**power
        den = [0, 0]
        den[j] = -power
        return cls({ONE: mpq(1)}, tuple(den), _normal=True)

    @staticmethod
    def coerce(x) -> Poly:
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    @staticmethod
    def _foreign(x) -> bool:
        """True for operands (e.g. series) that Poly should defer to."""
        return not isinstance(x, (Poly, int, _MPQ))

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not any(self.den) and (not self.terms or list(self.terms) == [ONE])

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(ONE, mpq(0))

    def variables(self) -> set[str]:
        ks: set[int] = set()
        for m in self.terms:
            ks.update(mono_exps(m))
        if self.den[0]:
            ks.update((_A, _B))
        if self.den[1]:
            ks.add(_C)
        return {VARIABLES[k] for k in ks}

    # arithmetic
    def _lift(self, den: tuple[int, int]) -> dict:
        terms = self.terms
        for j in range(2):
            extra = den[j] - self.den[j]
            if extra:
                f = _factor_terms(j)
                for _ in range(extra):
                    terms = _mul_terms(terms, f)
        return terms

    def __add__(self, other) -> Poly:
        if Poly._foreign(other):
            return NotImplemented
        other = Poly.coerce(other) if not isinstance(other, Poly) else other
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.den == other.den:
            acc = dict(self.terms)
            _add_into(acc, other.terms)
            return Poly(acc, self.den)
        den = (max(self.den[0], other.den[0]), max(self.den[1], other.den[1]))
        acc = dict(self._lift(den))
        _add_into(acc, other._lift(den))
        return Poly(acc, den)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()}, self.den, _normal=True)

    def __sub__(self, other) -> Poly:
        if Poly._foreign(other):
            return NotImplemented
        return self + (-Poly.coerce(other))

    def __rsub__(self, other) -> Poly:
        return Poly.coerce(other) + (-self)

    def __mul__(self, other) -> Poly:
        if Poly._foreign(other):
            return NotImplemented
        if not isinstance(other, Poly):
            c = mpq(other)
            if not c:
                return ZERO
            return Poly({m: v * c for m, v in self.terms.items()}, self.den, _normal=True)
        if not self.terms or not other.terms:
            return ZERO
        terms = _mul_terms(self.terms, other.terms)
        den = (self.den[0] + other.den[0], self.den[1] + other.den[1])
        # Numerators are coprime to their own factors, so only factors that
        # came from one side alone can cancel.
        check = any(den[j] and (self.den[j] == 0 or other.den[j] == 0) for j in range(2))
        return Poly(terms, den, _normal=not check)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            return self.inverse() ** (-n)
        if len(self.terms) == 1 and not any(self.den):
            ((m, c),) = self.terms.items()
            return Poly({n * (m - ONE) + ONE: c**n}, _normal=True)
        result = ONE_POLY
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def unit_decomposition(self):
        """(coeff, monomial, factor exponents) if self is a unit, else None."""
        if not self.terms:
            return None
        terms = self.terms
        num_f = [0, 0]
        for j in range(2):
            while len(terms) > 1 and _divisible_by_factor(terms, j):
                terms = _exact_div_terms(terms, _factor_terms(j))
                num_f[j] += 1
        if len(terms) != 1:
            return None
        ((m, c),) = terms.items()
        return c, m, (num_f[0] - self.den[0], num_f[1] - self.den[1])

    def is_unit(self) -> bool:
        return self.unit_decomposition() is not None

    def inverse(self) -> Poly:
        dec = self.unit_decomposition()
        if dec is None:
            raise DivisionByNonUnit(f"{to_text(self)} is not a unit")
        c, m, fexp = dec
        out = Poly({2 * ONE - m: 1 / c}, _normal=True)
        for j, e in enumerate(fexp):
            if e:
                out = out * Poly.factor(FACTORS[j], -e)
        return out

    def __truediv__(self, other) -> Poly:
        if Poly._foreign(other):
            return NotImplemented
        if not isinstance(other, Poly):
            c = mpq(other)
            if not c:
                raise ZeroDivisionError
            return self * (1 / c)
        return self * other.inverse()

    def __rtruediv__(self, other) -> Poly:
        return Poly.coerce(other) * self.inverse()

    def exact_div(self, other: Poly) -> Poly:
        """Division by a possibly non-unit element known to divide self."""
        other = Poly.coerce(other)
        if not other:
            raise ZeroDivisionError
        unit, core = split_unit(other)
        if core is None:
            return self / other
        q = _exact_div_terms(self.terms, core.terms)
        if q is None:
            raise DivisionByNonUnit(f"{to_text(other)} does not divide {to_text(self)}")
        return Poly(q, self.den) / unit

    def divides(self, other: Poly) -> bool:
        """Whether self divides other in the Laurent ring (numerators only)."""
        return _exact_div_terms(other.terms, self.terms) is not None

    # comparison
    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.den == other.den and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.terms.items()), self.den))
        return self._hash

    def __repr__(self):
        return f"Poly({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    # structure
    def numerator(self) -> Poly:
        return Poly(self.terms, _normal=True)

    def denominator(self) -> Poly:
        out = ONE_POLY
        for j, e in enumerate(self.den):
            if e:
                out = out * Poly.factor(FACTORS[j], e)
        return out

    def denominator_exponents(self) -> dict[str, int]:
        """Exponents of the unit denominators 2, a, b, disc (and delta)."""
        twos = max((rational_valuation(1 / c, 2) for c in self.terms.values()), default=0)
        out = {
            "two": max(twos, 0),
            "a": max([0] + [-mono_exp(m, _A) for m in self.terms]),
            "b": max([0] + [-mono_exp(m, _B) for m in self.terms]),
            "disc": self.den[0],
        }
        if self.den[1]:
            out["delta"] = self.den[1]
        return out

    def has_foreign_denominator(self) -> bool:
        """True when some rational coefficient has an odd denominator."""
        for c in self.terms.values():
            d = int(c.denominator)
            while d % 2 == 0:
                d //= 2
            if d != 1:
                return True
        return False

    def weight(self) -> int | None:
        """Graded degree if homogeneous, else None."""
        w = None
        base = 2 * self.den[0]
        for m in self.terms:
            mw = 0
            for k, e in mono_exps(m).items():
                name = VARIABLES[k]
                if name not in WEIGHTS:
                    return None
                mw += WEIGHTS[name] * e
            if w is None:
                w = mw
            elif w != mw:
                return None
        return None if w is None else w - base

    def degree(self, name: str) -> int:
        k = INDEX[name]
        if not self.terms:
            return -1
        return max(mono_exp(m, k) for m in self.terms)

    def low_degree(self, name: str) -> int:
        k = INDEX[name]
        return min(mono_exp(m, k) for m in self.terms)

    def total_degree(self, names: Iterable[str]) -> int:
        ks = [INDEX[n] for n in names]
        return max(sum(mono_exp(m, k) for k in ks) for m in self.terms)

    def coefficients(self, name: str) -> list[Poly]:
        """Coefficient list in ``name``; index = exponent (must be >= 0)."""
        k = INDEX[name]
        buckets: dict[int, dict] = defaultdict(dict)
        for m, c in self.terms.items():
            e = mono_exp(m, k)
            if e < 0:
                raise ValueError(f"negative power of {name}")
            buckets[e][mono_shift(m, k, -e)] = c
        if not buckets:
            return []
        n = max(buckets)
        return [Poly(buckets[e], self.den) if e in buckets else ZERO for e in range(n + 1)]

    def coefficient(self, name: str, power: int) -> Poly:
        k = INDEX[name]
        out = {}
        for m, c in self.terms.items():
            if mono_exp(m, k) == power:
                out[mono_shift(m, k, -power)] = c
        return Poly(out, self.den)

    def laurent_coefficients(self, name: str) -> dict[int, Poly]:
        k = INDEX[name]
        buckets: dict[int, dict] = defaultdict(dict)
        for m, c in self.terms.items():
            e = mono_exp(m, k)
            buckets[e][mono_shift(m, k, -e)] = c
        return {e: Poly(t, self.den) for e, t in sorted(buckets.items())}

    def truncate(self, names: Iterable[str], order: int) -> Poly:
        """Drop terms whose total degree in ``names`` exceeds ``order``."""
        ks = [INDEX[n] for n in names]
        keep = {m: c for m, c in self.terms.items() if sum(mono_exp(m, k) for k in ks) <= order}
        return Poly(keep, self.den)

    def map_coefficients(self, fn) -> Poly:
        return Poly({m: fn(c) for m, c in self.terms.items()}, self.den)

    def subs(self, mapping: dict[str, Poly | int]) -> Poly:
        """Simultaneous substitution of variables by polynomials."""
        mapping = {INDEX[k]: Poly.coerce(v) for k, v in mapping.items()}
        powcache: dict[tuple[int, int], Poly] = {}

        def power(k, e):
            key = (k, e)
            if key not in powcache:
                powcache[key] = mapping[k] ** e
            return powcache[key]

        groups: dict[tuple, dict] = defaultdict(dict)
        for m, c in self.terms.items():
            ex = mono_exps(m)
            key = tuple(sorted((k, e) for k, e in ex.items() if k in mapping))
            rest = m
            for k, e in key:
                rest = mono_shift(rest, k, -e)
            groups[key][rest] = c
        out = ZERO
        for key, rest_terms in groups.items():
            piece = Poly(rest_terms, _normal=True)
            for k, e in key:
                piece = piece * power(k, e)
            out = out + piece
        for j, e in enumerate(self.den):
            if e:
                fac = Poly(_factor_terms(j), _normal=True).subs(
                    {VARIABLES[k]: v for k, v in mapping.items()}
                )
                out = out / fac**e
        return out

    def derivative(self, name: str) -> Poly:
        if any(self.den):
            raise NotImplementedError("derivative of a fraction")
        k = INDEX[name]
        out = {}
        for m, c in self.terms.items():
            e = mono_exp(m, k)
            if e:
                out[mono_shift(m, k, -1)] = c * e
        return Poly(out, _normal=True)


def _normalize(terms: dict, den: tuple[int, int]):
    den = list(den)
    for j in range(2):
        while den[j] > 0 and _divisible_by_factor(terms, j):
            terms = _exact_div_terms(terms, _factor_terms(j))
            den[j] -= 1
    return terms, tuple(den)


ZERO = Poly()
ONE_POLY = Poly.const(1)


def var(name: str) -> Poly:
    return Poly.var(name)


def symbols(names: str) -> tuple[Poly, ...]:
    return tuple(Poly.var(n) for n in names.split())


def from_coefficients(coeffs: list[Poly], name: str) -> Poly:
    x = Poly.var(name)
    out = ZERO
    for k, c in enumerate(coeffs):
        if c:
            out = out + c * x**k
    return out


# -- canonical text ----------------------------------------------------------

def _mono_text(m: int) -> str:
    parts = []
    for k, e in sorted(mono_exps(m).items()):
        name = VARIABLES[k]
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _term_key(m: int):
    ex = mono_exps(m)
    vec = [ex.get(k, 0) for k in range(NVARS)]
    return (-sum(vec), [-e for e in vec])


def _numerator_text(terms: dict) -> str:
    if not terms:
        return "0"
    out = []
    for m in sorted(terms, key=_term_key):
        c = terms[m]
        mt = _mono_text(m)
        mag = abs(c)
        if not mt:
            body = str(mag)
        elif mag == 1:
            body = mt
        else:
            body = f"{mag}*{mt}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def to_text(p: Poly) -> str:
    num = _numerator_text(p.terms)
    if not any(p.den):
        return num
    dens = []
    for j, e in enumerate(p.den):
        if e:
            base = "(a^2 - 16*b)" if j == 0 else "(c^2 - 16)"
            dens.append(base if e == 1 else f"{base}^{e}")
    return f"({num})/({'*'.join(dens)})" if len(dens) > 1 else f"({num})/{dens[0]}"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^(){}]))")


class ParseError(ValueError):
    pass


def parse(text: str) -> Poly:
    """Parse ``+ - * / ^`` expressions over the known variables.

    Juxtaposition multiplies, exponents may be written ``x^{10}``.  Division is allowed only by units (rationals, monomials, disc, delta).
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad token at {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expect(op):
        tok = take()
        if tok != ("op", op):
            raise ParseError(f"expected {op!r}, got {tok}")

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def starts_factor(tok):
        return tok[0] in ("num", "name") or tok == ("op", "(")

    def term():
        val = unary()
        while True:
            tok = peek()
            if tok in (("op", "*"), ("op", "/")):
                op = take()[1]
                rhs = unary()
                val = val * rhs if op == "*" else val / rhs
            elif starts_factor(tok):
                # juxtaposition is multiplication: "3 a b^2" = 3*a*b^2
                val = val * power()
            else:
                return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def exponent():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        tok = take()
        if tok[0] == "num":
            return sign * tok[1]
        if tok in (("op", "("), ("op", "{")):
            e = exponent()
            expect(")" if tok[1] == "(" else "}")
            return sign * e
        raise ParseError(f"bad exponent {tok}")

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            return base ** exponent()
        return base

    def atom():
        tok = take()
        if tok[0] == "num":
            return Poly.const(tok[1])
        if tok[0] == "name":
            if tok[1] not in INDEX:
                raise ParseError(f"unknown variable {tok[1]!r}")
            return Poly.var(tok[1])
        if tok == ("op", "("):
            val = expr()
            expect(")")
            return val
        raise ParseError(f"unexpected {tok}")

    out = expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input at token {peek()}")
    return out


P = parse


# -- univariate algorithms ---------------------------------------------------

def _lead(coeffs: list[Poly]) -> Poly:
    return coeffs[-1]


def _trim(coeffs: list[Poly]) -> list[Poly]:
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def divrem(A: Poly, B: Poly, name: str) -> tuple[Poly, Poly]:
    """A = Q*B + R with deg_name R < deg_name B; lc(B) must be a unit."""
    bc = _trim(B.coefficients(name))
    if not bc:
        raise ZeroDivisionError("division by zero polynomial")
    try:
        inv = bc[-1].inverse()
    except DivisionByNonUnit as exc:
        raise NonUnitLeadingCoefficient(str(exc)) from None
    ac = _trim(A.coefficients(name))
    n = len(bc) - 1
    quot = [ZERO] * max(len(ac) - n, 0)
    for k in range(len(ac) - 1, n - 1, -1):
        c = ac[k]
        if not c:
            continue
        q = c * inv
        quot[k - n] = q
        for j in range(n + 1):
            if bc[j]:
                ac[k - n + j] = ac[k - n + j] - q * bc[j]
    return from_coefficients(quot, name), from_coefficients(_trim(ac[:n]), name)


def pseudo_divrem(A: Poly, B: Poly, name: str) -> tuple[int, Poly, Poly]:
    """(m, Q, R) with lc(B)^m * A = Q*B + R, m = deg A - deg B + 1."""
    bc = _trim(B.coefficients(name))
    ac = _trim(A.coefficients(name))
    n = len(bc) - 1
    if len(ac) - 1 < n:
        return 0, ZERO, A
    lc = bc[-1]
    m = len(ac) - n
    quot = [ZERO] * m
    for k in range(len(ac) - 1, n - 1, -1):
        c = ac[k]
        # multiply everything so far by lc
        quot = [q * lc for q in quot]
        ac = [a * lc for a in ac]
        if not c:
            continue
        quot[k - n] = quot[k - n] + c
        for j in range(n + 1):
            if bc[j]:
                ac[k - n + j] = ac[k - n + j] - c * bc[j]
    return m, from_coefficients(quot, name), from_coefficients(_trim(ac[:n]), name)


def gcd_bezout(f: Poly, g: Poly, name: str) -> tuple[Poly, Poly, Poly]:
    """(gcd, M, N) with M*f + N*g = gcd by the Euclidean algorithm.

    Every remainder met along the chain must have a unit leading coefficient.
    The gcd is made monic when its leading coefficient is a unit.
    """
    r0, r1 = f, g
    s0, s1 = ONE_POLY, ZERO
    t0, t1 = ZERO, ONE_POLY
    while r1:
        q, r = divrem(r0, r1, name)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lc = _trim(r0.coefficients(name))[-1]
    if lc.is_unit():
        inv = lc.inverse()
        r0, s0, t0 = r0 * inv, s0 * inv, t0 * inv
    return r0, s0, t0


def subresultant_bezout(f: Poly, g: Poly, name: str) -> tuple[Poly, Poly, Poly]:
    """Fraction-free extended Euclid: (r, s, t) with s*f + t*g = r.

    Uses the subresultant remainder sequence, so every division is exact and
    no coefficient field is needed.  When f and g are coprime r is free of
    ``name`` (a multiple of their resultant).
    """
    A, B = f, g
    if A.degree(name) < B.degree(name):
        A, B = B, A
        sA, tA, sB, tB = ZERO, ONE_POLY, ONE_POLY, ZERO
    else:
        sA, tA, sB, tB = ONE_POLY, ZERO, ZERO, ONE_POLY
    gg = ONE_POLY
    hh = ONE_POLY
    while True:
        delta = A.degree(name) - B.degree(name)
        m, q, r = pseudo_divrem(A, B, name)
        lcB = _trim(B.coefficients(name))[-1]
        scale = lcB ** m
        sR = scale * sA - q * sB
        tR = scale * tA - q * tB
        if not r:
            return B, sB, tB
        beta = gg * hh**delta
        r, sR, tR = r.exact_div(beta), sR.exact_div(beta), tR.exact_div(beta)
        A, B = B, r
        sA, tA, sB, tB = sB, tB, sR, tR
        gg = _trim(A.coefficients(name))[-1]
        if delta == 0:
            pass
        elif delta == 1:
            hh = gg
        else:
            hh = (gg**delta).exact_div(hh ** (delta - 1))
        if B.degree(name) == 0:
            return B, sB, tB


def split_unit(p: Poly) -> tuple[Poly, Poly | None]:
    """Write p = unit * core with core free of monomial and disc/delta factors.

    core is None when p is itself a unit.
    """
    if p.is_unit():
        return p, None
    cm = _monomial_content(p.terms)
    terms = {m - cm + ONE: c for m, c in p.terms.items()}
    unit = Poly({cm: mpq(1)}, _normal=True) / Poly.factor("disc", p.den[0]) / Poly.factor("delta", p.den[1])
    for j in range(2):
        while len(terms) > 1 and _divisible_by_factor(terms, j):
            terms = _exact_div_terms(terms, _factor_terms(j))
            unit = unit * Poly.factor(FACTORS[j])
    return unit, Poly(terms, _normal=True)


def localize(num: Poly, den: Poly) -> Poly:
    """num/den where den is a unit times a non-unit core dividing num."""
    return num.exact_div(den)


def solve_exact(rows: list[list[Poly]], rhs: list[Poly]) -> list[Poly]:
    """Unique solution of an (over)determined linear system over the ring.

    Fraction-free Gaussian elimination (Bareiss); extra equations must be
    consistent and the solution must lie in the ring, otherwise
    ``DivisionByNonUnit`` or ``ValueError`` is raised.
    """
    m = len(rows)
    n = len(rows[0])
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    prev = ONE_POLY
    pivot_rows = 0
    for col in range(n):
        piv = next((r for r in range(pivot_rows, m) if M[r][col]), None)
        if piv is None:
            raise ValueError("singular system")
        M[pivot_rows], M[piv] = M[piv], M[pivot_rows]
        p = M[pivot_rows][col]
        for r in range(pivot_rows + 1, m):
            lead = M[r][col]
            M[r] = [(p * M[r][j] - lead * M[pivot_rows][j]).exact_div(prev) if j > col else ZERO
                    for j in range(n + 1)]
        prev = p
        pivot_rows += 1
    for r in range(n, m):
        if any(M[r][j] for j in range(n + 1)):
            raise ValueError("inconsistent system")
    det = M[n - 1][n - 1]
    y = [ZERO] * n
    for j in range(n - 1, -1, -1):
        acc = det * M[j][n]
        for l in range(j + 1, n):
            acc = acc - M[j][l] * y[l]
        y[j] = acc.exact_div(M[j][j])
    return [yj.exact_div(det) for yj in y]


class QuotientRing:
    """R[name]/(modulus) for a modulus with unit leading coefficient."""

    def __init__(self, modulus: Poly, name: str):
        self.modulus = modulus
        self.name = name
        coeffs = _trim(modulus.coefficients(name))
        self.degree = len(coeffs) - 1
        inv = coeffs[-1].inverse()
        # x^n = -sum_{k<n} (c_k / c_n) x^k
        self._tail = [-c * inv for c in coeffs[:-1]]
        self._powers: list[list[Poly]] = []

    def _power_rep(self, k: int) -> list[Poly]:
        """Coefficients of x^(n+k) reduced, k >= 0."""
        while len(self._powers) <= k:
            if not self._powers:
                rep = list(self._tail)
            else:
                prev = self._powers[-1]
                top = prev[-1]
                rep = [ZERO] + prev[:-1]
                if top:
                    rep = [r + top * t for r, t in zip(rep, self._tail)]
            self._powers.append(rep)
        return self._powers[k]

    def reduce(self, p: Poly) -> Poly:
        if not p:
            return p
        if p.degree(self.name) < self.degree:
            return p
        coeffs = p.coefficients(self.name)
        n = self.degree
        out = list(coeffs[:n]) + [ZERO] * max(0, n - len(coeffs))
        for k in range(n, len(coeffs)):
            c = coeffs[k]
            if not c:
                continue
            rep = self._power_rep(k - n)
            for j in range(n):
                if rep[j]:
                    out[j] = out[j] + c * rep[j]
        return from_coefficients(out, self.name)

    def mul(self, x: Poly, y: Poly) -> Poly:
        return self.reduce(x * y)

    def inv(self, x: Poly) -> Poly:
        x = self.reduce(x)
        if x.degree(self.name) <= 0:
            return x.inverse()
        try:
            g, _, t = gcd_bezout(self.modulus, x, self.name)
            if g.degree(self.name) == 0:
                return self.reduce(t / g)
        except (NonUnitLeadingCoefficient, DivisionByNonUnit):
            pass
        r, _, t = subresultant_bezout(self.modulus, x, self.name)
        if r.degree(self.name) != 0:
            raise DivisionByNonUnit(f"{to_text(x)} shares a factor with the modulus")
        return self.reduce(localize(t, r))

    def power(self, x: Poly, n: int) -> Poly:
        if n < 0:
            return self.power(self.inv(x), -n)
        result = ONE_POLY
        base = self.reduce(x)
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def evaluate(self, p: Poly, name: str, value: Poly) -> Poly:
        """Substitute ``value`` for ``name`` in p with reduction (Horner)."""
        coeffs = p.coefficients(name)
        acc = ZERO
        for c in reversed(coeffs):
            acc = self.reduce(acc * value) + c
        return self.reduce(acc)


class BaseRing:
    """The coefficient ring itself: no reduction, inverses of units only."""

    name = None

    def reduce(self, p: Poly) -> Poly:
        return p

    def mul(self, x: Poly, y: Poly) -> Poly:
        return x * y

    def inv(self, x: Poly) -> Poly:
        return x.inverse()


BASE = BaseRing()


# -- ideal membership at (3, H) ----------------------------------------------

H_POLY = parse("a^2 + b")


def _in_H_coordinates(p: Poly) -> Poly:
    """Rewrite p(a, b) as a polynomial in a and H via b = H - a^2."""
    if any(p.den):
        raise ValueError("clear denominators first")
    return p.subs({"b": parse("H - a^2")})


def in_ideal_3H(p: Poly) -> bool:
    q = _in_H_coordinates(p).coefficient("H", 0)
    return all(rational_valuation(c, 3) >= 1 for c in q.terms.values())


def in_ideal_3H_squared(p: Poly) -> bool:
    q = _in_H_coordinates(p)
    c0 = q.coefficient("H", 0)
    c1 = q.coefficient("H", 1)
    return all(rational_valuation(c, 3) >= 2 for c in c0.terms.values()) and all(
        rational_valuation(c, 3) >= 1 for c in c1.terms.values()
    )


def eisenstein_check(f: Poly, name: str) -> bool:
    """Eisenstein's criterion for f in ``name`` at the prime ideal (3, H)."""
    coeffs = _trim(f.coefficients(name))
    if len(coeffs) < 2:
        return False
    lead, lower = coeffs[-1], coeffs[:-1]
    if in_ideal_3H(lead):
        return False
    if not all(in_ideal_3H(c) for c in lower):
        return False
    return not in_ideal_3H_squared(lower[0])


def reduce_mod3_and_ideal(p: Poly, at_H: bool = False, kill: Iterable[str] = ()) -> Poly:
    """Reduce coefficients mod 3 (balanced residues).

    ``at_H`` substitutes b -> -a^2 first; names in ``kill`` are set to zero.
    Denominators must be units mod 3; unit denominators that survive are
    cleared by multiplying through, so the result is a numerator.
    """
    if kill:
        p = p.subs({n: 0 for n in kill})
    if at_H:
        p = p.subs({"b": parse("-a^2")})
    num = p.numerator()
    return Poly({m: mpq(balanced(rational_mod(c, 3), 3)) for m, c in num.terms.items()})


def congruent_mod3(x: Poly, y: Poly, **kw) -> bool:
    return not reduce_mod3_and_ideal(x - y, **kw)
