"""Truncated power series over a coefficient ring, and 3-adic Laurent series.

A :class:`TruncSeries` stores coefficients ``c_0 .. c_n`` of a series in one
variable together with ``order = n``: every coefficient of exponent <= n is
exact, nothing above n is known.  Coefficients are :class:`Poly` values and
all products are pushed through ``ring.reduce`` so that series over a
quotient ring such as ``S[d]/(f(d))`` stay reduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .polyring import BASE, ONE_POLY, ZERO, Poly, to_text
from .scalar import DEFAULT_PADIC_PRECISION, DivisionByNonUnit, PadicGauss


class NoContraction(ArithmeticError):
    pass


class NonzeroConstantTerm(ValueError):
    pass


class NonUnitLeading(ArithmeticError):
    pass


def _val(coeffs) -> int:
    for k, c in enumerate(coeffs):
        if c:
            return k
    return len(coeffs)


class TruncSeries:
    __slots__ = ("coeffs", "order", "ring", "var")

    def __init__(self, coeffs, order: int, ring=BASE, var: str = "u"):
        coeffs = [Poly.coerce(c) for c in coeffs[: order + 1]]
        coeffs += [ZERO] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order
        self.ring = ring
        self.var = var

    @classmethod
    def from_poly(cls, p: Poly, var: str, order: int, ring=BASE) -> TruncSeries:
        cs = p.coefficients(var) if p else []
        return cls(cs, order, ring, var)

    @classmethod
    def variable(cls, order: int, ring=BASE, var: str = "u") -> TruncSeries:
        return cls([ZERO, ONE_POLY], order, ring, var)

    @classmethod
    def constant(cls, c, order: int, ring=BASE, var: str = "u") -> TruncSeries:
        return cls([Poly.coerce(c)], order, ring, var)

    def _like(self, coeffs, order) -> TruncSeries:
        return TruncSeries(coeffs, order, self.ring, self.var)

    def valuation(self) -> int:
        """Index of the first nonzero coefficient (order + 1 when all vanish)."""
        return _val(self.coeffs)

    def __getitem__(self, k: int) -> Poly:
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond order {self.order}")
        return self.coeffs[k]

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise ValueError("cannot raise the order of a truncated series")
        return self._like(self.coeffs, order)

    def _coerce(self, other) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries.constant(other, self.order, self.ring, self.var)

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.order, o.order)
        return self._like([x + y for x, y in zip(self.coeffs[: n + 1], o.coeffs[: n + 1])], n)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> TruncSeries:
        c = Poly.coerce(c)
        red = self.ring.reduce
        return self._like([red(x * c) for x in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        v1, v2 = self.valuation(), other.valuation()
        # a term of exponent k only involves known coefficients when
        # k <= min(order1 + v2, order2 + v1)
        n = min(self.order + v2, other.order + v1)
        out = []
        red = self.ring.reduce
        a, b = self.coeffs, other.coeffs
        for k in range(n + 1):
            acc = ZERO
            for i in range(max(v1, k - other.order), min(k - v2, self.order) + 1):
                if a[i] and b[k - i]:
                    acc = acc + a[i] * b[k - i]
            out.append(red(acc))
        return self._like(out, n)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TruncSeries:
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncSeries.constant(ONE_POLY, self.order, self.ring, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> TruncSeries:
        """Multiply by var^k; negative k requires divisibility."""
        if k >= 0:
            return self._like([ZERO] * k + self.coeffs, self.order + k)
        if self.valuation() < -k:
            raise DivisionByNonUnit(f"series not divisible by {self.var}^{-k}")
        return self._like(self.coeffs[-k:], self.order + k)

    def inverse(self) -> TruncSeries:
        """1/self; the constant term must be a unit of the ring."""
        c0 = self.coeffs[0]
        inv0 = self.ring.inv(c0)
        red = self.ring.reduce
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = ZERO
            for i in range(1, k + 1):
                if self.coeffs[i] and out[k - i]:
                    acc = acc + self.coeffs[i] * out[k - i]
            out.append(red(-acc * inv0))
        return self._like(out, self.order)

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(self.ring.inv(Poly.coerce(other)))
        v = other.valuation()
        if v == 0:
            return self * other.inverse()
        return self.shift(-v) * other.shift(-v).inverse()

    def compose(self, g: TruncSeries) -> TruncSeries:
        """self(g) for g with zero constant term (Horner).

        With g of valuation v >= 1 the result is known through
        min(order(g), (order(self) + 1) * v - 1).
        """
        if g.coeffs[0]:
            raise NonzeroConstantTerm("inner series must have zero constant term")
        vg = min(g.valuation(), g.order)
        n = min(g.order, (self.order + 1) * vg - 1)
        acc = TruncSeries.constant(self.coeffs[-1], n, self.ring, g.var)
        for c in reversed(self.coeffs[:-1]):
            acc = (acc * g).truncate(n) + c
        return acc

    def derivative(self) -> TruncSeries:
        return self._like([c * k for k, c in enumerate(self.coeffs)][1:], self.order - 1)

    def map(self, fn) -> TruncSeries:
        return self._like([fn(c) for c in self.coeffs], self.order)

    def to_poly(self) -> Poly:
        """The polynomial sum c_k var^k (truncation marker dropped)."""
        x = Poly.var(self.var)
        out = ZERO
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + c * x**k
        return out

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def __repr__(self):
        return f"TruncSeries({self})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else self.var if k == 1 else f"{self.var}^{k}"
            body = to_text(c)
            parts.append(body if not mono else f"({body})*{mono}")
        parts.append(f"O({self.var}^{self.order + 1})")
        return " + ".join(parts)


def solve_by_recursion(phi, order: int, ring=BASE, var: str = "u", max_rounds: int | None = None):
    """Fixed point v = phi(v) of a u-adic contraction, exact to ``order``.

    ``phi`` maps a TruncSeries to a TruncSeries.  Iteration starts at 0 and
    stops once two successive iterates agree through ``order``.
    """
    v = TruncSeries([], order, ring, var)
    rounds = max_rounds if max_rounds is not None else order + 2
    for _ in range(rounds):
        nxt = phi(v).truncate(order)
        if nxt == v:
            return v
        v = nxt
    raise NoContraction(f"no fixed point after {rounds} rounds")


def residual_valuation(series: TruncSeries) -> int:
    return series.valuation()


# -- bivariate truncated helpers ----------------------------------------------

def truncate_total(p: Poly, names, order: int) -> Poly:
    return p.truncate(names, order)


def mul_total(p: Poly, q: Poly, names, order: int) -> Poly:
    return (p * q).truncate(names, order)


def substitute_series(p: Poly, mapping: dict[str, TruncSeries], order: int) -> TruncSeries:
    """Evaluate a polynomial at truncated series for some of its variables."""
    series = list(mapping.values())
    ring = series[0].ring
    var = series[0].var
    names = list(mapping)
    powers: dict[tuple[str, int], TruncSeries] = {}

    def power(name, e):
        key = (name, e)
        if key not in powers:
            if e == 0:
                powers[key] = TruncSeries.constant(ONE_POLY, order, ring, var)
            else:
                powers[key] = (power(name, e - 1) * mapping[name]).truncate(order)
        return powers[key]

    acc = TruncSeries([], order, ring, var)
    buckets: dict[tuple, Poly] = {}
    for exps, coeff in _split_monomials(p, names).items():
        buckets[exps] = coeff
    for exps, coeff in sorted(buckets.items()):
        term = TruncSeries.constant(coeff, order, ring, var)
        for name, e in zip(names, exps):
            if e:
                term = (term * power(name, e)).truncate(order)
        acc = acc + term
    return acc


def _split_monomials(p: Poly, names) -> dict[tuple, Poly]:
    out: dict[tuple, Poly] = {}
    layer = {(): p}
    for name in names:
        nxt = {}
        for key, q in layer.items():
            for e, c in enumerate(q.coefficients(name)):
                if c:
                    nxt[key + (e,)] = c
        layer = nxt
    out.update(layer)
    return out


# -- Laurent series over Z[i]/3^N ---------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """sum_{n >= low} c_n t^n + O(t^(order+1)) with c_n in Z[i]/3^N.

    ``name`` is the printed variable and ``inverted`` means t = name^-1, so
    a series in h^-1 prints with descending powers of h.
    """

    low: int
    coeffs: tuple
    order: int
    precision: int = DEFAULT_PADIC_PRECISION
    name: str = "t"
    inverted: bool = False

    def __post_init__(self):
        cs = tuple(PadicGauss.of(c, self.precision) for c in self.coeffs)
        n = self.order - self.low + 1
        cs = (cs + (PadicGauss(0, 0, self.precision),) * max(0, n - len(cs)))[: max(n, 0)]
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def monomial(cls, coeff, exponent: int, order: int, precision=DEFAULT_PADIC_PRECISION,
                 name="t", inverted=False) -> LaurentSeries:
        return cls(exponent, (coeff,), order, precision, name, inverted)

    @classmethod
    def zero(cls, order: int, precision=DEFAULT_PADIC_PRECISION, name="t", inverted=False):
        return cls(order + 1, (), order, precision, name, inverted)

    def _like(self, low, coeffs, order, precision=None):
        return LaurentSeries(low, tuple(coeffs), order, precision or self.precision,
                             self.name, self.inverted)

    def coefficient(self, n: int) -> PadicGauss:
        if n > self.order:
            raise IndexError(f"t^{n} beyond order {self.order}")
        if n < self.low:
            return PadicGauss(0, 0, self.precision)
        return self.coeffs[n - self.low]

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return self.low + k
        return self.order + 1

    def normalized(self) -> LaurentSeries:
        v = self.valuation()
        if v == self.low:
            return self
        return self._like(v, self.coeffs[v - self.low:], self.order)

    def with_precision(self, precision: int) -> LaurentSeries:
        return self._like(self.low, [c.with_precision(precision) for c in self.coeffs],
                          self.order, precision)

    def truncate(self, order: int) -> LaurentSeries:
        return self._like(self.low, self.coeffs, min(order, self.order))

    def _coerce(self, other) -> LaurentSeries:
        if isinstance(other, LaurentSeries):
            return other
        return self._like(0, (PadicGauss.of(other, self.precision),), self.order)

    def __add__(self, other):
        o = self._coerce(other)
        order = min(self.order, o.order)
        prec = min(self.precision, o.precision)
        low = min(self.low, o.low)
        cs = [self.coefficient(n).with_precision(prec) + o.coefficient(n).with_precision(prec)
              for n in range(low, order + 1)]
        return self._like(low, cs, order, prec)

    __radd__ = __add__

    def __neg__(self):
        return self._like(self.low, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        a, b = self.normalized(), o.normalized()
        va, vb = a.valuation(), b.valuation()
        prec = min(a.precision, b.precision)
        if va > a.order or vb > b.order:
            order = min(a.order + vb, b.order + va)
            return LaurentSeries.zero(order, prec, self.name, self.inverted)
        order = min(a.order + vb, b.order + va)
        low = va + vb
        cs = []
        for n in range(low, order + 1):
            acc = PadicGauss(0, 0, prec)
            for i in range(va, n - vb + 1):
                j = n - i
                if i <= a.order and j <= b.order:
                    acc = acc + a.coefficient(i) * b.coefficient(j)
            cs.append(acc)
        return self._like(low, cs, order, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            # the unit is exact; report it to the order of self
            return self._like(0, (PadicGauss(1, 0, self.precision),), max(self.order, 0))
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def inverse(self) -> LaurentSeries:
        s = self.normalized()
        v = s.valuation()
        if v > s.order:
            raise NonUnitLeading("inverse of an unknown or zero series")
        lead = s.coefficient(v)
        if not lead.is_unit():
            raise NonUnitLeading(f"leading coefficient {lead} is not a 3-adic unit")
        inv0 = lead.inverse()
        rel = s.order - v  # relative precision
        out = [inv0]
        for k in range(1, rel + 1):
            acc = PadicGauss(0, 0, s.precision)
            for i in range(1, k + 1):
                acc = acc + s.coefficient(v + i) * out[k - i]
            out.append(-acc * inv0)
        return self._like(-v, out, -v + rel)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = min(self.order, other.order)
        low = min(self.low, other.low)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(low, order + 1))

    def __hash__(self):
        return hash((self.low, self.order))

    def integer_coefficients(self) -> dict[int, int]:
        """Exponent -> balanced integer lift, for series with zero imaginary part."""
        return {self.low + k: c.integer_lift() for k, c in enumerate(self.coeffs)}

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            n = self.low + k
            e = -n if self.inverted else n
            re, im = c.lift()
            coef = str(re) if not im else f"({re} + {im}*i)" if re else f"{im}*i"
            mono = "" if e == 0 else self.name if e == 1 else f"{self.name}^{e}"
            parts.append(coef if not mono else f"{coef}*{mono}")
        e = -(self.order + 1) if self.inverted else self.order + 1
        parts.append(f"O({self.name}^{e}, 3^{self.precision})")
        return " + ".join(parts)
