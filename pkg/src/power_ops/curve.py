"""The curve y^2 + a x y + a b y = x^3 + b x^2, its group law and 3-torsion.

In the coordinates u = x/y, v = 1/y the identity is (0, 0), u is a local
uniformizer and the equation reads v + a u v + a b v^2 = u^3 + b u^2 v.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .polyring import (
    ONE_POLY,
    ZERO,
    DivisionByNonUnit,
    NonUnitLeadingCoefficient,
    Poly,
    divrem,
    eisenstein_check,
    gcd_bezout,
    localize,
    parse,
    pseudo_divrem,
    subresultant_bezout,
    var,
)
from .scalar import PadicGauss
from .series import TruncSeries, solve_by_recursion

A, B = var("a"), var("b")
H = A**2 + B
DISC = A**2 - 16 * B
DELTA = A**2 * B**4 * DISC


class FactorizationMismatch(ArithmeticError):
    pass


class EqualUCoordinates(ArithmeticError):
    pass


class NonInvertibleDenominator(ArithmeticError):
    pass


@dataclass(frozen=True)
class WeierstrassCurve:
    a1: Poly
    a2: Poly
    a3: Poly
    a4: Poly
    a6: Poly

    @classmethod
    def universal(cls) -> WeierstrassCurve:
        return cls(A, B, A * B, ZERO, ZERO)

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> Poly:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def xy_equation(self) -> Poly:
        x, y = var("x"), var("y")
        return (y * y + self.a1 * x * y + self.a3 * y
                - x**3 - self.a2 * x * x - self.a4 * x - self.a6)

    def uv_equation(self) -> Poly:
        """The equation after x = u/v, y = 1/v, multiplied by v^3."""
        u, v = var("u"), var("v")
        return (v + self.a1 * u * v + self.a3 * v * v
                - u**3 - self.a2 * u * u * v - self.a4 * u * v * v - self.a6 * v**3)


C = WeierstrassCurve.universal()


def discriminant_check() -> tuple[bool, Poly]:
    """Compare the standard discriminant with a^2 b^4 (a^2 - 16 b).

    Returns (whether the ratio is a rational constant, that ratio).
    """
    ratio = C.discriminant() / DELTA
    return ratio.is_constant(), ratio


# -- division polynomial and torsion data -------------------------------------

def division_polynomial_3() -> tuple[Poly, Poly]:
    """(psi_3(x), its homogenization psi~_3(u, v) under x = u/v)."""
    b2, b4, b6, b8 = C.b_invariants()
    x, u, v = var("x"), var("u"), var("v")
    psi = 3 * x**4 + b2 * x**3 + 3 * b4 * x**2 + 3 * b6 * x + b8
    psi_uv = 3 * u**4 + b2 * u**3 * v + 3 * b4 * u**2 * v**2 + 3 * b6 * u * v**3 + b8 * v**4
    return psi, psi_uv


@dataclass(frozen=True)
class RationalFunction:
    """num/den with a denominator that need not be a unit (display only)."""

    num: Poly
    den: Poly

    def cross_equal(self, other: RationalFunction) -> bool:
        return self.num * other.den == other.num * self.den


@dataclass(frozen=True)
class TorsionData:
    f: Poly
    g: Poly
    f_tilde: Poly
    A: Poly
    B: Poly
    Q1: Poly
    R1: Poly
    Q2: RationalFunction
    R2: RationalFunction
    K: Poly
    L: Poly
    M: Poly
    N: Poly

    def records(self) -> dict[str, object]:
        return {
            "f": self.f, "g": self.g, "f_tilde": self.f_tilde, "Q1": self.Q1,
            "R1": self.R1, "Q2": self.Q2, "R2": self.R2, "K": self.K, "L": self.L,
            "M": self.M, "N": self.N,
        }


def _conjugate_product(poly_in_v: Poly, s: Poly, p: Poly) -> Poly:
    """P(v) P(vbar) written through s = v + vbar and p = v vbar."""
    cs = poly_in_v.coefficients("v")
    n = len(cs)
    power_sums = [Poly.const(2), s]
    for _ in range(2, n):
        power_sums.append(s * power_sums[-1] - p * power_sums[-2])
    out = ZERO
    for j in range(n):
        if not cs[j]:
            continue
        out = out + cs[j] * cs[j] * p**j
        for k in range(j + 1, n):
            if cs[k]:
                out = out + cs[j] * cs[k] * p**j * power_sums[k - j]
    return out


def bezout(f: Poly, g: Poly, name: str) -> tuple[Poly, Poly, Poly]:
    """(gcd, M, N) with M f + N g = gcd, falling back to subresultants when
    the Euclidean chain meets a non-unit leading coefficient."""
    try:
        return gcd_bezout(f, g, name)
    except (NonUnitLeadingCoefficient, DivisionByNonUnit):
        pass
    r, s, t = subresultant_bezout(f, g, name)
    if r.degree(name) > 0:
        return r, s, t
    return ONE_POLY, localize(s, r), localize(t, r)


@lru_cache(maxsize=None)
def compute_torsion_data() -> TorsionData:
    u, v, d = var("u"), var("v"), var("d")
    _, psi_uv = division_polynomial_3()
    # the uv-equation as a quadratic in v: a b v^2 + (-b u^2 + a u + 1) v - u^3
    s = (B * u * u - A * u - 1) / (A * B)
    p = -(u**3) / (A * B)
    f_tilde = _conjugate_product(psi_uv, s, p)
    unit = -(u**4) / (A * A * B)
    f = f_tilde.exact_div(u**4) * (-(A * A * B))
    if f * unit != f_tilde or f.low_degree("u") < 0:
        raise FactorizationMismatch("f~ is not -u^4 f / (a^2 b) for a polynomial f")

    A_v = psi_uv.subs({"u": d})
    B_v = A * B * v * v + (-B * d * d + A * d + 1) * v - d**3
    Q1, R1 = divrem(A_v, B_v, "v")
    K = R1.coefficient("v", 1)
    L = R1.coefficient("v", 0)
    m, q2, r2 = pseudo_divrem(B_v, R1, "v")
    # lc(R1)^m B = q2 R1 + r2, and lc(R1) = K = (a K)/a; present over (a K)^m
    scale = A**m
    aK = A * K
    Q2 = RationalFunction(q2 * scale, aK**m)
    R2 = RationalFunction(r2 * scale, aK**m)

    Ku = K.subs({"d": u})
    Lu = L.subs({"d": u})
    gcd, M, N = bezout(f, Ku, "u")
    if gcd != ONE_POLY:
        raise FactorizationMismatch(f"gcd(f, K) = {gcd}")
    _, g = divrem(-N * Lu, f, "u")
    return TorsionData(f=f, g=g, f_tilde=f_tilde, A=A_v, B=B_v, Q1=Q1, R1=R1,
                       Q2=Q2, R2=R2, K=Ku, L=Lu, M=M, N=N)


def torsion_f() -> Poly:
    return compute_torsion_data().f


def torsion_g() -> Poly:
    return compute_torsion_data().g


def f_is_eisenstein() -> bool:
    return eisenstein_check(torsion_f(), "u")


# -- group law in uv-coordinates ----------------------------------------------

def uv_negate(P, a=A, b=B):
    """-P = (-v/(u(u + b v)), -v^2/(u^2(u + b v)))."""
    u, v = P
    den = u * (u + v * b)
    try:
        return (-v / den, -(v * v) / (u * den))
    except (DivisionByNonUnit, ZeroDivisionError) as exc:
        raise NonInvertibleDenominator(str(exc)) from None


def uv_add_negated(P1, P2, a=A, b=B):
    """-(P1 + P2) by the chord construction."""
    u1, v1 = P1
    u2, v2 = P2
    du = u1 - u2
    if isinstance(du, (Poly, PadicGauss)) and du == 0:
        raise EqualUCoordinates("chord formula needs distinct u-coordinates")
    k = (v1 - v2) / du
    m = (u1 * v2 - u2 * v1) / du
    u3 = k * a - (m * b) / (k * b + 1) - u1 - u2
    v3 = k * u3 + m
    return u3, v3


def uv_add(P1, P2, a=A, b=B):
    return uv_negate(uv_add_negated(P1, P2, a, b), a, b)


def on_uv_curve(P, a=A, b=B):
    """The curve equation evaluated at P (zero, or zero to truncation)."""
    u, v = P
    return v + u * v * a + v * v * (a * b) - u * u * u - u * u * v * b


# -- formal group -------------------------------------------------------------

def v_series(order: int = 12, a=A, b=B, ring=None) -> TruncSeries:
    """v as a power series in u, by recursive substitution."""
    from .polyring import BASE

    ring = ring or BASE

    def phi(vs: TruncSeries) -> TruncSeries:
        u = TruncSeries.variable(vs.order, ring)
        return u**3 + (u * u * vs).scale(b) - (u * vs).scale(a) - (vs * vs).scale(a * b)

    return solve_by_recursion(phi, order, ring)


def iota_series(order: int, a=A, b=B) -> TruncSeries:
    """u(-P) as a series in u(P)."""
    vs = v_series(order + 3, a, b)
    u = TruncSeries.variable(order + 3)
    neg_u, _ = uv_negate((u, vs), a, b)
    return neg_u.truncate(order)


def _complete_homogeneous(n: int) -> Poly:
    u1, u2 = var("u1"), var("u2")
    return sum((u1**i * u2 ** (n - i) for i in range(n + 1)), ZERO)


def _series_in(p: Poly, order: int, names=("u1", "u2")) -> Poly:
    return p.truncate(names, order)


def formal_group_law(order: int, a=A, b=B) -> Poly:
    """F(u1, u2) = u(P1 + P2) to total degree ``order``."""
    names = ("u1", "u2")
    vs = v_series(order + 2, a, b)
    u1, u2 = var("u1"), var("u2")
    k = ZERO
    m = ZERO
    for n in range(3, order + 3):
        c = vs[n]
        if not c:
            continue
        k = k + c * _complete_homogeneous(n - 1)
        m = m - c * u1 * u2 * _complete_homogeneous(n - 2)
    k = _series_in(k, order)
    m = _series_in(m, order)
    # 1/(1 + b k) as a geometric series; k has no terms below degree 2
    inv = ONE_POLY
    power = ONE_POLY
    for _ in range(order // 2):
        power = _series_in(power * (-b * k), order)
        inv = inv + power
    u3 = _series_in(a * k - b * m * inv - u1 - u2, order)
    iota = iota_series(order, a, b)
    acc = ZERO
    for c in reversed(iota.coeffs):
        acc = _series_in(acc * u3, order) + c
    return acc


def fgl_apply(F: Poly, x: TruncSeries, y: TruncSeries) -> TruncSeries:
    """F(x(t), y(t)) for series x, y without constant terms."""
    from .series import substitute_series

    order = min(x.order, y.order)
    return substitute_series(F, {"u1": x, "u2": y}, order)


def multiplication_series(m: int, order: int, a=A, b=B, F: Poly | None = None) -> TruncSeries:
    """[m](u) for m in Z."""
    F = F if F is not None else formal_group_law(order, a, b)
    u = TruncSeries.variable(order)
    if m == 0:
        return TruncSeries([], order)
    if m < 0:
        return iota_series(order, a, b).compose(multiplication_series(-m, order, a, b, F))
    acc = u
    for _ in range(m - 1):
        acc = fgl_apply(F, u, acc)
    return acc


def _compose_total(F: Poly, x: Poly, y: Poly, names, order: int) -> Poly:
    """F(x, y) truncated at total degree ``order`` in ``names``."""
    xs = [ONE_POLY]
    ys = [ONE_POLY]
    out = ZERO
    for i, ci in enumerate(F.coefficients("u1")):
        while len(xs) <= i:
            xs.append((xs[-1] * x).truncate(names, order))
        for j, cij in enumerate(ci.coefficients("u2")):
            if not cij:
                continue
            while len(ys) <= j:
                ys.append((ys[-1] * y).truncate(names, order))
            out = out + (cij * xs[i] * ys[j]).truncate(names, order)
    return out


@dataclass(frozen=True)
class FormalGroupAxioms:
    order: int
    identity: bool
    commutative: bool
    associative: bool
    inverse: bool

    @property
    def all_hold(self) -> bool:
        return self.identity and self.commutative and self.associative and self.inverse


def fgl_axiom_check(order: int = 8, a=A, b=B) -> FormalGroupAxioms:
    """Unit, commutativity, associativity and inverse of F to total degree ``order``."""
    F = formal_group_law(order, a, b)
    u1, u2, u3 = var("u1"), var("u2"), var("u3")
    names = ("u1", "u2", "u3")
    identity = F.subs({"u2": 0}) == u1 and F.subs({"u1": 0}) == u2
    commutative = F == F.subs({"u1": u2, "u2": u1})
    left = _compose_total(F, F, u3, names, order)
    right = _compose_total(F, u1, F.subs({"u1": u2, "u2": u3}), names, order)
    u = TruncSeries.variable(order)
    inv = fgl_apply(F, u, iota_series(order, a, b))
    return FormalGroupAxioms(order, identity, commutative, left == right, inv.valuation() > order)


# -- xy group law over a field --------------------------------------------------

def _is_zero(x) -> bool:
    if isinstance(x, PadicGauss):
        return x.is_zero()
    return x == 0


def xy_negate(P, curve: WeierstrassCurve):
    if P is None:
        return None
    x, y = P
    return (x, -y - x * curve.a1 - curve.a3)


def xy_add(P1, P2, curve: WeierstrassCurve = C):
    """Chord-tangent addition; None is the point at infinity."""
    if P1 is None:
        return P2
    if P2 is None:
        return P1
    a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    x1, y1 = P1
    x2, y2 = P2
    if _is_zero(x1 - x2):
        if _is_zero(y1 + y2 + x2 * a1 + a3):
            return None
        den = y1 * 2 + x1 * a1 + a3
        lam = (x1 * x1 * 3 + x1 * a2 * 2 + a4 - y1 * a1) / den
        nu = (-(x1 * x1 * x1) + x1 * a4 + a6 * 2 - y1 * a3) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + lam * a1 - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def xy_scalar_mul(m: int, P, curve: WeierstrassCurve = C):
    if m < 0:
        return xy_scalar_mul(-m, xy_negate(P, curve), curve)
    result = None
    base = P
    while m:
        if m & 1:
            result = xy_add(result, base, curve)
        m >>= 1
        if m:
            base = xy_add(base, base, curve)
    return result


# -- finite fields --------------------------------------------------------------

def field_elements(q: int) -> list[PadicGauss]:
    """F_3 or F_9 = F_3[i] as precision-1 Gaussian residues."""
    if q == 3:
        return [PadicGauss(r, 0, 1) for r in range(3)]
    if q == 9:
        return [PadicGauss(r, s, 1) for r, s in product(range(3), repeat=2)]
    raise ValueError("only F_3 and F_9 are supported")


def curve_over(a, b) -> WeierstrassCurve:
    zero = PadicGauss(0, 0, 1)
    a = PadicGauss.of(a, 1)
    b = PadicGauss.of(b, 1)
    return WeierstrassCurve(a, b, a * b, zero, zero)


def is_nonsingular(a, b) -> bool:
    a = PadicGauss.of(a, 1)
    b = PadicGauss.of(b, 1)
    delta = a * a * b**4 * (a * a - b * 16)
    return not delta.is_zero()


def rational_points(a, b, q: int) -> list:
    curve = curve_over(a, b)
    pts = [None]
    for x, y in product(field_elements(q), repeat=2):
        lhs = y * y + curve.a1 * x * y + curve.a3 * y
        rhs = x * x * x + curve.a2 * x * x
        if (lhs - rhs).is_zero():
            pts.append((x, y))
    return pts


def point_count(a, b, q: int) -> int:
    return len(rational_points(a, b, q))


def trace_of_frobenius(a, b, q: int) -> int:
    return q + 1 - point_count(a, b, q)


C0 = (1, -1)  # a = 1, b = -1: the supersingular fiber y^2 + x y - y = x^3 - x^2


def frobenius_squared_is_minus_three() -> bool:
    """On C0(F_9), Frob^2 = id, so [-3] must fix every point."""
    curve = curve_over(*C0)
    return all(xy_scalar_mul(-3, P, curve) == P for P in rational_points(*C0, 9))


@dataclass(frozen=True)
class SupersingularReport:
    c0_points_f3: int
    c0_trace_f3: int
    classified: int
    agree: bool
    mismatches: tuple


def supersingular_check() -> SupersingularReport:
    """Over F_9: trace = 0 mod 3 exactly when H = a^2 + b vanishes."""
    mismatches = []
    count = 0
    for a, b in product(field_elements(9), repeat=2):
        if not is_nonsingular(a, b):
            continue
        count += 1
        supersingular = trace_of_frobenius(a, b, 9) % 3 == 0
        h_zero = (a * a + b).is_zero()
        if supersingular != h_zero:
            mismatches.append((a.lift(), b.lift()))
    return SupersingularReport(
        c0_points_f3=point_count(*C0, 3),
        c0_trace_f3=trace_of_frobenius(*C0, 3),
        classified=count,
        agree=not mismatches,
        mismatches=tuple(mismatches),
    )


def order_four_point_check() -> tuple[bool, bool]:
    """([2](0,0) is not the identity, [4](0,0) is the identity) on C."""
    P = (ZERO, ZERO)
    two = xy_scalar_mul(2, P)
    four = xy_scalar_mul(4, P)
    return two is not None, four is None
