"""The universal degree-3 isogeny with kernel generated by Q = (d, e).

Everything lives over R = S[d]/(f(d)) with e = g(d).  The image of a point
P = (u, v(u)) has coordinates

    u' = u(P) u(P - Q) u(P + Q),   v' = v(P) v(P - Q) v(P + Q),

expanded as power series in u with coefficients in R.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .curve import (
    A,
    B,
    H,
    compute_torsion_data,
    formal_group_law,
    multiplication_series,
    uv_add_negated,
    uv_negate,
    v_series,
)
from .polyring import (
    BASE,
    ONE_POLY,
    ZERO,
    Poly,
    QuotientRing,
    parse,
    reduce_mod3_and_ideal,
    solve_exact,
    var,
)
from .series import TruncSeries

DEFAULT_U_ORDER = 6
DEFAULT_V_ORDER = 9
KAPPA = var("kappa")


class TruncationInsufficient(ValueError):
    pass


class ResidueNonzero(ArithmeticError):
    def __init__(self, what: str, residue):
        super().__init__(f"{what}: residue {residue}")
        self.residue = residue


class FitFailed(ArithmeticError):
    pass


class MismatchAtOrder(ArithmeticError):
    def __init__(self, k: int):
        super().__init__(f"series disagree at u^{k}")
        self.order = k


@lru_cache(maxsize=None)
def torsion_ring() -> tuple[QuotientRing, Poly, Poly]:
    """(R, f(d), e = g(d))."""
    t = compute_torsion_data()
    d = {"u": var("d")}
    f = t.f.subs(d)
    R = QuotientRing(f, "d")
    e = R.reduce(t.g.subs(d))
    return R, f, e


@dataclass(frozen=True)
class IsogenyData:
    kappa: Poly
    lam: Poly
    u_prime: TruncSeries
    v_prime: TruncSeries
    u_minus: TruncSeries  # u(P - Q)
    u_plus: TruncSeries  # u(P + Q)
    v_minus: TruncSeries
    v_plus: TruncSeries
    ring: QuotientRing = field(repr=False)
    e: Poly = field(repr=False)


@lru_cache(maxsize=None)
def build_isogeny(u_order: int = DEFAULT_U_ORDER, v_order: int = DEFAULT_V_ORDER) -> IsogenyData:
    """u' through u^u_order and v' through u^v_order."""
    R, _, e = torsion_ring()
    d = var("d")
    # P - Q loses two orders to the negation formula; u' gains one from u(P)
    base = max(u_order + 1, v_order) + 2
    vs = v_series(base, ring=R)
    u = TruncSeries.variable(base, R)
    P = (u, vs)
    Q = (d, e)
    minus = uv_add_negated(uv_negate(P), Q)
    plus = uv_negate(uv_add_negated(P, Q))
    u_prime = u * minus[0] * plus[0]
    v_prime = vs * minus[1] * plus[1]
    if u_prime.order < u_order or v_prime.order < v_order:
        raise TruncationInsufficient(
            f"reached u'^{u_prime.order}, v'^{v_prime.order}; asked {u_order}, {v_order}")
    u_prime = u_prime.truncate(u_order)
    v_prime = v_prime.truncate(v_order)
    return IsogenyData(
        kappa=u_prime[1], lam=v_prime[3], u_prime=u_prime, v_prime=v_prime,
        u_minus=minus[0], u_plus=plus[0], v_minus=minus[1], v_plus=plus[1],
        ring=R, e=e,
    )


def kappa_identity_check(data: IsogenyData) -> bool:
    """kappa = a e - d^2 in R."""
    R = data.ring
    return R.reduce(A * data.e - var("d") ** 2) == data.kappa


def norm_identity_check(data: IsogenyData) -> bool:
    """u(P - Q) u(P + Q) has constant term kappa, and u(-Q) u(Q) = kappa."""
    R = data.ring
    return R.reduce(data.u_minus[0] * data.u_plus[0]) == data.kappa


def _powers(R: QuotientRing, x: Poly, n: int) -> list[Poly]:
    out = [ONE_POLY]
    for _ in range(n):
        out.append(R.reduce(out[-1] * x))
    return out


def express_in_powers(R: QuotientRing, x: Poly, target: Poly, degree: int) -> list[Poly]:
    """Coefficients c_j (in the base ring) with target = sum c_j x^j in R."""
    pw = _powers(R, x, degree)
    n = R.degree
    cols = [p.coefficients(R.name) for p in pw]
    tc = target.coefficients(R.name)
    pad = lambda cs: [cs[i] if i < len(cs) else ZERO for i in range(n)]
    cols = [pad(c) for c in cols]
    tc = pad(tc)
    rows = [[cols[j][i] for j in range(degree + 1)] for i in range(n)]
    return solve_exact(rows, tc)


def kappa_min_poly_derived(data: IsogenyData) -> Poly:
    """Monic relation of degree 4 satisfied by kappa, found by linear algebra."""
    R = data.ring
    k4 = R.power(data.kappa, 4)
    cs = express_in_powers(R, data.kappa, k4, 3)
    out = KAPPA**4
    for j, c in enumerate(cs):
        out = out - c * KAPPA**j
    return out


W_PRINTED = parse("kappa^4 - 6/b^2 kappa^2 + (a^2 - 8 b)/b^4 kappa - 3/b^4")


def kappa_min_poly(data: IsogenyData, W: Poly = W_PRINTED) -> Poly:
    """Check W(kappa) = 0 in R and return W."""
    R = data.ring
    residue = R.evaluate(W, "kappa", data.kappa)
    if residue:
        raise ResidueNonzero("W(kappa) mod f", residue)
    return W


@dataclass(frozen=True)
class TargetCurve:
    a_prime: Poly  # element of R
    b_prime: Poly
    a_prime_in_kappa: Poly  # cubic in kappa over the base ring
    residual_order: int


@lru_cache(maxsize=None)
def target_curve(u_order: int = 7, v_order: int = DEFAULT_V_ORDER) -> TargetCurve:
    """Fit v + a'uv + a'b'v^2 = u^3 + b'u^2 v to (u', (kappa^3/lambda) v')."""
    data = build_isogeny(u_order, v_order)
    R = data.ring
    kappa = data.kappa
    U = data.u_prime
    V = data.v_prime.scale(R.reduce(R.power(kappa, 3) * R.inv(data.lam)))
    U2 = U * U
    U3 = U2 * U
    UV = U * V
    kinv = R.inv(kappa)
    a_p = R.reduce((U3[4] - V[4]) * R.power(kinv, 4))
    b_p = R.reduce((V[5] - U3[5] + a_p * UV[5]) * R.power(kinv, 5))
    residual = V - U3 - (U2 * V).scale(b_p) + UV.scale(a_p) + (V * V).scale(R.reduce(a_p * b_p))
    n = residual.order
    if residual.valuation() <= n:
        raise FitFailed(f"residual nonzero at u^{residual.valuation()}")
    if b_p.degree("d") > 0:
        raise FitFailed(f"b' depends on d: {b_p}")
    cs = express_in_powers(R, kappa, a_p, 3)
    a_kappa = sum((c * KAPPA**j for j, c in enumerate(cs)), ZERO)
    return TargetCurve(a_prime=a_p, b_prime=b_p, a_prime_in_kappa=a_kappa, residual_order=n)


def frobenius_reduction_check(data: IsogenyData) -> tuple[bool, TruncSeries]:
    """u' modulo (3, H, d) is u^3."""
    reduced = data.u_prime.map(lambda c: reduce_mod3_and_ideal(c, at_H=True, kill=("d",)))
    expected = TruncSeries([0, 0, 0, 1], data.u_prime.order)
    return reduced == expected, reduced


def formal_branch_reduce(p: Poly) -> Poly:
    """Image in R/(3, d^2): the branch of f mod 3 through u = 0."""
    d = var("d")
    q = p.coefficient("d", 0) + p.coefficient("d", 1) * d
    return reduce_mod3_and_ideal(q)


def kappa_vanishes_on_formal_branch(data: IsogenyData) -> bool:
    return not formal_branch_reduce(data.kappa)


# -- dual isogeny ---------------------------------------------------------------

KAPPA_PRIME_PRINTED = parse("-kappa^3 + 6/b^2 kappa - (a^2 - 8 b)/b^4")


@dataclass(frozen=True)
class DualRelations:
    kappa_prime: Poly  # derived, as a cubic in kappa
    relation1_residue: Poly  # b^4 kappa kappa' + 3 mod W
    relation2_holds: bool
    vieta_product: Poly
    s: Poly
    du_factor: Poly  # [3]^* du = du_factor du
    verschiebung: Poly  # -kappa' mod (3, kappa)


def dual_relations(W: Poly = W_PRINTED) -> DualRelations:
    Wring = QuotientRing(W, "kappa")
    b = B
    # kappa' from b^4 kappa kappa' + 3 = 0, inverting kappa modulo W
    kappa_prime = Wring.reduce(-3 / b**4 * Wring.inv(KAPPA))
    rel1 = Wring.reduce(b**4 * KAPPA * KAPPA_PRIME_PRINTED + 3)
    prod = W.coefficient("kappa", 0)  # product of the four roots, degree 4
    # on the chart a = c, b = 1 the multiplication-by-3 map has du-factor 3
    chart_prod = prod.subs({"a": var("c"), "b": 1})
    s = Poly.const(3) / chart_prod
    du_factor = s * prod
    verschiebung = reduce_mod3_and_ideal((-KAPPA_PRIME_PRINTED).subs({"kappa": 0}) * b**4)
    return DualRelations(
        kappa_prime=kappa_prime,
        relation1_residue=rel1,
        relation2_holds=kappa_prime == Wring.reduce(KAPPA_PRIME_PRINTED),
        vieta_product=prod,
        s=s,
        du_factor=du_factor,
        verschiebung=verschiebung,
    )


# -- the composite with the dual: comparison with [-3] -------------------------

def _power_sums(f: Poly, name: str, n: int) -> list[Poly]:
    """p_k = sum of k-th powers of the roots of f, k = 0..n (Newton)."""
    cs = f.coefficients(name)
    deg = len(cs) - 1
    lead_inv = cs[-1].inverse()
    e = [ONE_POLY] + [(-1) ** k * cs[deg - k] * lead_inv for k in range(1, deg + 1)]
    p = [Poly.const(deg)]
    for k in range(1, n + 1):
        acc = ZERO
        for i in range(1, min(k, deg) + 1):
            term = e[i] * (p[k - i] if i < k else Poly.const(k))
            acc = acc + (term if i % 2 == 1 else -term)
        p.append(acc)
    return p


def trace(R: QuotientRing, x: Poly, power_sums: list[Poly]) -> Poly:
    x = R.reduce(x)
    return sum((c * power_sums[k] for k, c in enumerate(x.coefficients(R.name))), ZERO)


def series_log1p(y: TruncSeries) -> TruncSeries:
    """log(1 + y) for y without constant term."""
    out = TruncSeries([], y.order, y.ring, y.var)
    power = y
    for k in range(1, y.order + 1):
        out = out + power.scale(Poly.const(1) / k * (1 if k % 2 else -1))
        power = power * y
    return out


def series_exp(y: TruncSeries) -> TruncSeries:
    out = TruncSeries.constant(ONE_POLY, y.order, y.ring, y.var)
    term = out
    for k in range(1, y.order + 1):
        term = (term * y).scale(Poly.const(1) / k)
        out = out + term
    return out


def norm_series(R: QuotientRing, f: Poly, s: TruncSeries, const_norm: Poly) -> TruncSeries:
    """N_{R/base}(s) = N(s_0) exp(Tr log(s / s_0))."""
    ps = _power_sums(f, R.name, 2 * R.degree)
    y = s.scale(R.inv(s[0])) - 1
    logs = series_log1p(y)
    traced = TruncSeries([trace(R, c, ps) for c in logs.coeffs], logs.order, BASE, s.var)
    return series_exp(traced).scale(const_norm)


@dataclass(frozen=True)
class ComposeReport:
    order: int
    agree_order: int
    psi_series: TruncSeries
    minus_three: TruncSeries
    chart_agree: bool


@lru_cache(maxsize=None)
def compose_check(order: int = 5) -> ComposeReport:
    """The kernel-C[3] isogeny u(P) prod_R u(P + R) against [-3]/b^4.

    The product over the eight nonzero 3-torsion points R is the norm from
    R = S[d]/(f) of u(P + Q); its leading coefficient N(d) = -3/b^4 is the
    product kappa_1 kappa_2 kappa_3 kappa_4.
    """
    data = build_isogeny(order, order)
    R, f, _ = torsion_ring()
    # N(d) = (-1)^8 f(0)/lc(f)
    nd = f.coefficient("d", 0) / f.coefficient("d", 8)
    plus = data.u_plus.truncate(order - 1)
    N = norm_series(R, f, plus, nd)
    psi = N.shift(1)
    F = formal_group_law(order)
    m3 = multiplication_series(-3, order, F=F).scale(B**-4)
    agree = 0
    for k in range(order + 1):
        if psi[k] != m3[k]:
            break
        agree = k
    chart = lambda s: s.map(lambda c: c.subs({"a": var("c"), "b": 1}))
    chart_agree = chart(psi) == chart(multiplication_series(-3, order, F=F))
    if agree < order:
        raise MismatchAtOrder(agree + 1)
    return ComposeReport(order=order, agree_order=agree, psi_series=psi, minus_three=m3,
                         chart_agree=chart_agree)


def homogeneity_check(data: IsogenyData) -> bool:
    """The u^k coefficient of u' has weight k - 3, of v' weight k - 9."""
    ok = all(c.weight() in (None, k - 3) and (not c or c.weight() == k - 3)
             for k, c in enumerate(data.u_prime.coeffs))
    return ok and all(not c or c.weight() == k - 9 for k, c in enumerate(data.v_prime.coeffs))
