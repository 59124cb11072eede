"""Exact scalars: rationals, the unit monoid of the base ring, and 3-adic
Gaussian integers Z[i]/3^N standing in for Z_9.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

DEFAULT_PADIC_PRECISION = 16

# Denominator tags allowed for coefficients of polynomials over the base ring.
UNIT_TAGS = ("two", "a", "b", "disc")


class DivisionByNonUnit(ArithmeticError):
    pass


class NonsimpleRoot(ArithmeticError):
    pass


class NoRoot(ArithmeticError):
    pass


def Q(value, den=1) -> mpq:
    return mpq(value, den)


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(q, p: int) -> int:
    q = mpq(q)
    return valuation(int(q.numerator), p) - valuation(int(q.denominator), p)


def rational_mod(q, m: int) -> int:
    """Image of a rational with denominator prime to m in Z/m, as 0..m-1."""
    q = mpq(q)
    den = int(q.denominator)
    try:
        inv = pow(den, -1, m)
    except ValueError:
        raise DivisionByNonUnit(f"{q} has denominator not invertible mod {m}") from None
    return int(q.numerator) * inv % m


def balanced(r: int, m: int) -> int:
    r %= m
    return r - m if r > m // 2 else r


def is_two_power(n: int) -> bool:
    n = abs(n)
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class PadicGauss:
    """Element re + im*i of Z[i]/3^N, i^2 = -1."""

    re: int
    im: int
    precision: int = DEFAULT_PADIC_PRECISION

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        m = 3**self.precision
        object.__setattr__(self, "re", self.re % m)
        object.__setattr__(self, "im", self.im % m)

    @property
    def modulus(self) -> int:
        return 3**self.precision

    @classmethod
    def of(cls, value, precision=DEFAULT_PADIC_PRECISION) -> PadicGauss:
        if isinstance(value, PadicGauss):
            return value.with_precision(precision)
        if isinstance(value, complex):
            return cls(int(value.real), int(value.imag), precision)
        return cls(rational_mod(value, 3**precision), 0, precision)

    @classmethod
    def i(cls, precision=DEFAULT_PADIC_PRECISION) -> PadicGauss:
        return cls(0, 1, precision)

    def with_precision(self, n: int) -> PadicGauss:
        """Truncate (n < precision) or reinterpret the residues at precision n.

        Raising precision keeps the stored residues; the new digits are zero
        and carry no information.
        """
        return PadicGauss(self.re, self.im, n)

    def _coerce(self, other) -> PadicGauss:
        if isinstance(other, PadicGauss):
            return other
        return PadicGauss.of(other, self.precision)

    def _prec(self, other: PadicGauss) -> int:
        return min(self.precision, other.precision)

    def __add__(self, other):
        o = self._coerce(other)
        return PadicGauss(self.re + o.re, self.im + o.im, self._prec(o))

    __radd__ = __add__

    def __neg__(self):
        return PadicGauss(-self.re, -self.im, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return PadicGauss(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
            self._prec(o),
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicGauss(1, 0, self.precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def norm(self) -> int:
        return (self.re * self.re + self.im * self.im) % self.modulus

    def is_unit(self) -> bool:
        # 3 is inert in Z[i]: a + bi is a unit mod 3 iff a^2 + b^2 != 0 mod 3.
        return self.norm() % 3 != 0

    def inverse(self) -> PadicGauss:
        if not self.is_unit():
            raise DivisionByNonUnit(f"{self} is divisible by 3")
        n_inv = pow(self.norm(), -1, self.modulus)
        return PadicGauss(self.re * n_inv, -self.im * n_inv, self.precision)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if not isinstance(other, PadicGauss):
            try:
                other = self._coerce(other)
            except (TypeError, DivisionByNonUnit):
                return NotImplemented
        m = 3 ** self._prec(other)
        return (self.re - other.re) % m == 0 and (self.im - other.im) % m == 0

    def __hash__(self):
        return hash((self.re, self.im, self.precision))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def valuation(self) -> int:
        """3-adic valuation, capped at the precision."""
        if self.is_zero():
            return self.precision
        g = self.re if self.im == 0 else self.im if self.re == 0 else None
        if g is None:
            return min(valuation(self.re, 3) if self.re else self.precision,
                       valuation(self.im, 3) if self.im else self.precision)
        return valuation(g, 3)

    def lift(self) -> tuple[int, int]:
        """Balanced integer lifts of the real and imaginary parts."""
        m = self.modulus
        return balanced(self.re, m), balanced(self.im, m)

    def integer_lift(self) -> int:
        re, im = self.lift()
        if im:
            raise ValueError(f"{self} is not a rational integer")
        return re

    def __repr__(self):
        re, im = self.lift()
        if im == 0:
            return f"{re} + O(3^{self.precision})"
        return f"({re} + {im}*i) + O(3^{self.precision})"


def poly_eval(coeffs, x):
    """Horner evaluation; coeffs[k] is the coefficient of x^k."""
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def hensel_lift_root(coeffs, seed: PadicGauss, target_precision: int) -> PadicGauss:
    """Lift a simple root mod 3 of sum(coeffs[k] x^k) to a root mod 3^N."""
    seed = PadicGauss.of(seed, target_precision)
    coeffs = [PadicGauss.of(c, target_precision) for c in coeffs]
    deriv = poly_derivative(coeffs)
    if not poly_eval(coeffs, seed.with_precision(1)).is_zero():
        raise NoRoot(f"{seed} is not a root mod 3")
    if not poly_eval(deriv, seed.with_precision(1)).is_unit():
        raise NonsimpleRoot(f"derivative vanishes mod 3 at {seed}")
    r = seed
    prec = 1
    while prec < target_precision:
        prec = min(2 * prec, target_precision)
        r = r.with_precision(prec)
        c = [x.with_precision(prec) for x in coeffs]
        d = [x.with_precision(prec) for x in deriv]
        r = r - poly_eval(c, r) / poly_eval(d, r)
    return r.with_precision(target_precision)
