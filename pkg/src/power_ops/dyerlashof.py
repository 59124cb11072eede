"""The Dyer-Lashof algebra gamma as a rewriting system.

Elements are left Z[i][h]-combinations of words in q0, q1, q2, q3.  Scalars
move left past letters by the commutation relations and every adjacent pair
q_k q_0 with k > 0 is rewritten by the matching Adem relation.  The
normal forms are the admissible words q0^m q_{k1} ... q_{kn}, k_j in {1, 2, 3}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .polyring import ONE_POLY, ZERO, Poly, var
from .powerops import derive_adem, derive_commutation, reduce_i

Word = tuple  # tuple of ints in 0..3

DEFAULT_RANK_BOUND = 6


class BoundExceeded(ValueError):
    pass


class NoTermination(RuntimeError):
    pass


class GammaSyntaxError(ValueError):
    pass


def is_admissible(word: Word) -> bool:
    seen_nonzero = False
    for k in word:
        if k:
            seen_nonzero = True
        elif seen_nonzero:
            return False
    return True


def _clean(p: Poly) -> Poly:
    return reduce_i(p)


@dataclass(frozen=True)
class GammaElement:
    """A finite sum of coefficient * word with distinct words, sorted."""

    terms: tuple = ()

    @classmethod
    def from_dict(cls, d: dict) -> GammaElement:
        items = []
        for w, c in d.items():
            c = _clean(c)
            if c:
                items.append((tuple(w), c))
        items.sort(key=lambda t: (len(t[0]), t[0]))
        return cls(tuple(items))

    @classmethod
    def word(cls, *letters: int, coeff=1) -> GammaElement:
        return cls.from_dict({tuple(letters): Poly.const(coeff) if not isinstance(coeff, Poly) else coeff})

    @classmethod
    def scalar(cls, s) -> GammaElement:
        return cls.from_dict({(): s if isinstance(s, Poly) else Poly.const(s)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: GammaElement) -> GammaElement:
        d = self.as_dict()
        for w, c in other.terms:
            d[w] = d.get(w, ZERO) + c
        return GammaElement.from_dict(d)

    def __neg__(self) -> GammaElement:
        return GammaElement(tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other: GammaElement) -> GammaElement:
        return self + (-other)

    def __mul__(self, other) -> GammaElement:
        if not isinstance(other, GammaElement):
            other = GammaElement.scalar(other)
        out: dict = {}
        for wa, ca in self.terms:
            for wb, cb in other.terms:
                for w, c in word_times_scalar(wa, cb).items():
                    key = w + wb
                    out[key] = out.get(key, ZERO) + ca * c
        return GammaElement.from_dict(out)

    def __rmul__(self, other) -> GammaElement:
        return GammaElement.scalar(other) * self

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def is_normal(self) -> bool:
        return all(is_admissible(w) for w, _ in self.terms)

    def __str__(self) -> str:
        return to_text(self)


# -- structure constants -------------------------------------------------------------

@lru_cache(maxsize=None)
def h_matrix() -> tuple:
    """M with q_k h = sum_j M[k][j] q_j."""
    comm = derive_commutation()
    return tuple(
        tuple(comm[f"Q{k}(hx)"].coefficient(f"Q{j}x", 1) for j in range(4))
        for k in range(4))


@lru_cache(maxsize=None)
def adem_table() -> dict:
    """{k: {(a, b): coeff}} with q_k q_0 = sum coeff q_a q_b."""
    table = {}
    for k in (1, 2, 3):
        rhs = derive_adem()[f"Q{k}Q0(x)"]
        row = {}
        for a in range(4):
            for b in range(4):
                c = rhs.coefficient(f"Q{a}Q{b}x", 1)
                if c:
                    row[(a, b)] = c
        table[k] = row
    return table


def _mat_mul(m1, m2):
    return tuple(
        tuple(sum((m1[r][t] * m2[t][c] for t in range(4)), ZERO) for c in range(4))
        for r in range(4))


def _scalar_mat(s: Poly):
    return tuple(tuple(s if r == c else ZERO for c in range(4)) for r in range(4))


@lru_cache(maxsize=None)
def _h_power(n: int):
    if n == 0:
        return _scalar_mat(ONE_POLY)
    return _mat_mul(_h_power(n - 1), h_matrix())


def twist_matrix(s: Poly):
    """T(s) with q_k s = sum_j T(s)[k][j] q_j.

    T is additive and multiplicative with T(h) from the commutation relations,
    T(i) = -i and integers central.
    """
    out = _scalar_mat(ZERO)
    for eh, ph in s.laurent_coefficients("h").items():
        if eh < 0:
            raise ValueError("coefficients must be polynomial in h")
        # i -> -i on the remaining coefficient
        twisted = ph.subs({"i": -var("i")})
        m = _h_power(eh)
        out = tuple(tuple(out[r][c] + twisted * m[r][c] for c in range(4)) for r in range(4))
    return out


@lru_cache(maxsize=None)
def twist_row(k: int, s: Poly) -> tuple:
    return twist_matrix(s)[k]


@lru_cache(maxsize=None)
def _word_times_scalar(word: Word, s: Poly) -> tuple:
    return tuple(_word_times_scalar_uncached(word, s).items())


def word_times_scalar(word: Word, s: Poly) -> dict:
    """word * s as a dict {word: left coefficient}."""
    return dict(_word_times_scalar(tuple(word), s))


def _word_times_scalar_uncached(word: Word, s: Poly) -> dict:
    if not word:
        return {(): s}
    if s.is_constant():
        return {word: s}
    prefix, k = word[:-1], word[-1]
    row = twist_row(k, s)
    out: dict = {}
    for j in range(4):
        if not row[j]:
            continue
        for w, c in word_times_scalar(prefix, row[j]).items():
            key = w + (j,)
            out[key] = out.get(key, ZERO) + c
    return out


# -- normalization ----------------------------------------------------------------------

def _bad_position(word: Word) -> int:
    """Index p with word[p] != 0 and word[p+1] == 0, the rightmost one; -1 if none."""
    for p in range(len(word) - 2, -1, -1):
        if word[p] and not word[p + 1]:
            return p
    return -1


_IN_PROGRESS: set = set()


@lru_cache(maxsize=None)
def normal_form_of_word(w: Word) -> tuple:
    """Normal form of a single word, memoized; items (word, coeff)."""
    p = _bad_position(w)
    if p < 0:
        return ((w, ONE_POLY),)
    if w in _IN_PROGRESS:
        raise NoTermination(f"rewriting {word_text(w)} loops")
    _IN_PROGRESS.add(w)
    try:
        prefix, k, suffix = w[:p], w[p], w[p + 2:]
        acc: dict = {}
        for (a, b), coeff in adem_table()[k].items():
            for pw, pc in word_times_scalar(prefix, coeff).items():
                for nw, nc in normal_form_of_word(pw + (a, b) + suffix):
                    acc[nw] = acc.get(nw, ZERO) + pc * nc
    finally:
        _IN_PROGRESS.discard(w)
    return GammaElement.from_dict(acc).terms


def normalize_leftmost(e: GammaElement, budget: int = 100_000) -> GammaElement:
    """Unmemoized worklist rewriting at the leftmost bad pair.

    A second rewriting strategy; agreement with normalize is evidence of
    confluence on the inputs tried.
    """
    table = adem_table()
    pending = dict(e.as_dict())
    done: dict = {}
    while pending:
        w = min(pending, key=lambda x: (len(x), x))
        c = _clean(pending.pop(w))
        if not c:
            continue
        bad = [p for p in range(len(w) - 1) if w[p] and not w[p + 1]]
        if not bad:
            done[w] = done.get(w, ZERO) + c
            continue
        budget -= 1
        if budget < 0:
            raise NoTermination("rewrite budget exhausted")
        p = bad[0]
        prefix, k, suffix = w[:p], w[p], w[p + 2:]
        for (a, b), coeff in table[k].items():
            for pw, pc in word_times_scalar(prefix, coeff).items():
                key = pw + (a, b) + suffix
                pending[key] = pending.get(key, ZERO) + c * pc
    return GammaElement.from_dict(done)


def normalize(e: GammaElement) -> GammaElement:
    """Rewrite to the admissible basis."""
    acc: dict = {}
    for w, c in e.terms:
        for nw, nc in normal_form_of_word(w):
            acc[nw] = acc.get(nw, ZERO) + c * nc
    return GammaElement.from_dict(acc)


def rank_in_degree(d: int, bound: int = DEFAULT_RANK_BOUND) -> int:
    """Number of admissible words of length d, counted by enumeration."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    if d > bound:
        raise BoundExceeded(f"degree {d} exceeds bound {bound}")
    return sum(1 for w in product(range(4), repeat=d) if is_admissible(w))


def omega_action(e: GammaElement) -> Poly:
    """Coefficient c with e . u = c u, where q_1 u = u and q_k u = 0 otherwise."""
    if not e.is_normal():
        e = normalize(e)
    out = ZERO
    for w, c in e.terms:
        if all(k == 1 for k in w):
            out = out + c
    return out


# -- text -----------------------------------------------------------------------------

def word_text(w: Word) -> str:
    return "*".join(f"q{k}" for k in w)


def to_text(e: GammaElement) -> str:
    if not e.terms:
        return "0"
    parts = []
    for w, c in e.terms:
        ctext = str(c)
        if not w:
            parts.append(ctext)
        elif c == ONE_POLY:
            parts.append(word_text(w))
        elif c == -ONE_POLY:
            parts.append("-" + word_text(w))
        else:
            parts.append(f"({ctext})*{word_text(w)}")
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|(q[0-3])|([hi])|(.))")


def parse_gamma(text: str) -> GammaElement:
    """Parse h, i, q0..q3, integers, + - * ^ and parentheses; juxtaposition multiplies."""
    tokens = []
    for num, q, sc, other in _TOKEN.findall(text):
        if num:
            tokens.append(("num", int(num)))
        elif q:
            tokens.append(("q", int(q[1])))
        elif sc:
            tokens.append(("s", sc))
        elif other.strip():
            if other not in "+-*^()":
                raise GammaSyntaxError(f"unexpected character {other!r}")
            tokens.append(("op", other))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        out = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            out = out + t if op == "+" else out - t
        return out

    def term():
        out = power()
        while True:
            tok = peek()
            if tok == ("op", "*"):
                take()
                out = out * power()
            elif tok[0] in ("num", "q", "s") or tok == ("op", "("):
                out = out * power()
            else:
                return out

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            tok = take()
            if tok[0] != "num":
                raise GammaSyntaxError("exponent must be an integer literal")
            out = GammaElement.scalar(1)
            for _ in range(tok[1]):
                out = out * base
            return out
        return base

    def atom():
        tok = take()
        if tok[0] == "num":
            return GammaElement.scalar(tok[1])
        if tok[0] == "q":
            return GammaElement.word(tok[1])
        if tok[0] == "s":
            return GammaElement.scalar(var(tok[1]))
        if tok == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise GammaSyntaxError("missing ')'")
            return inner
        if tok[0] == "end":
            raise GammaSyntaxError("unexpected end of input")
        raise GammaSyntaxError(f"unexpected token {tok[1]!r}")

    if not tokens:
        raise GammaSyntaxError("empty expression")
    result = expr()
    if pos != len(tokens):
        raise GammaSyntaxError(f"trailing input at token {pos}")
    return result


def normalize_text(text: str) -> str:
    return to_text(normalize(parse_gamma(text)))


# -- relation identities ------------------------------------------------------------------

def relation_identities() -> dict[str, tuple[GammaElement, GammaElement]]:
    """(normalized left side, right side) for every defining relation."""
    out = {}
    M = h_matrix()
    h, i = var("h"), var("i")
    for k in range(4):
        lhs = normalize(GammaElement.word(k) * GammaElement.scalar(h))
        rhs = GammaElement.from_dict({(j,): M[k][j] for j in range(4)})
        out[f"q{k}h"] = (lhs, rhs)
        lhs = normalize(GammaElement.word(k) * GammaElement.scalar(i))
        out[f"q{k}i"] = (lhs, GammaElement.from_dict({(k,): -i}))
    for k, row in adem_table().items():
        lhs = normalize(GammaElement.word(k, 0))
        out[f"q{k}q0"] = (lhs, GammaElement.from_dict(row))
    return out
