"""K(1)-local power operations.

After inverting h and completing at 3, w(alpha) = alpha^4 - 6 alpha^2 +
(h - 9) alpha - 3 has a unique root with alpha = 0 mod 3.  It is found from
alpha = (3 + 6 alpha^2 - alpha^4) / (h - 9), a contraction in the h^-1-adic
topology, and plugged into the formulas for psi^3(h) and psi^3(c).

Series are LaurentSeries in t = h^-1 (or t = c^-1) with coefficients in
Z[i]/3^N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .polyring import Poly, parse, reduce_mod3_and_ideal
from .scalar import PadicGauss
from .series import LaurentSeries

DEFAULT_TERMS = 10
DEFAULT_PRECISION = 24

# the six printed coefficients, keyed by exponent of h (resp. c)
PSI_F_H_PRINTED = {3: 1, 2: -27, 1: 183, 0: -180, -1: 186, -2: 1674}
PSI_F_C_PRINTED = {3: 1, 1: -12, -1: -6, -3: -84, -5: -933, -7: -10956}


class NoConvergence(ArithmeticError):
    pass


class PrecisionInsufficient(ArithmeticError):
    pass


@dataclass(frozen=True)
class AlphaSolution:
    """alpha as a series in t = var^-1.

    ``h_order`` is the number of proven principal-part terms: alpha is known
    modulo t^(h_order + 1) and 3^padic_precision.
    """

    alpha: LaurentSeries
    h_order: int
    padic_precision: int
    variable: str = "h"  # "h" or "c"

    def coefficient(self, exponent: int) -> PadicGauss:
        """Coefficient of var^exponent (exponent <= 0)."""
        return self.alpha.coefficient(-exponent)


def _series(coeffs: dict, order: int, prec: int, name: str) -> LaurentSeries:
    low = min(coeffs, default=order + 1)
    cs = [coeffs.get(n, 0) for n in range(low, order + 1)]
    return LaurentSeries(low, tuple(PadicGauss.of(c, prec) for c in cs), order, prec, name, True)


def _geometric(step: int, ratio: int, order: int, prec: int, name: str) -> LaurentSeries:
    """sum_{n >= 1} ratio^(n-1) t^(step n), the expansion of 1/(t^-step - ratio)."""
    return _series({step * n: ratio ** (n - 1) for n in range(1, order // step + 1)},
                   order, prec, name)


def solve_alpha(h_terms: int = DEFAULT_TERMS, padic_prec: int = DEFAULT_PRECISION,
                variable: str = "h") -> AlphaSolution:
    """Fixed point of alpha = (3 + 6 alpha^2 - alpha^4) / (h - 9).

    With variable "c" the denominator is c^2 - 8 and alpha is a series in
    c^-2; ``h_terms`` then counts powers of c^-2.
    """
    if h_terms < 1 or padic_prec < 2:
        raise ValueError("need h_terms >= 1 and padic_prec >= 2")
    step, ratio = (1, 9) if variable == "h" else (2, 8)
    order = step * h_terms
    inv = _geometric(step, ratio, order, padic_prec, variable)
    alpha = LaurentSeries.zero(order, padic_prec, variable, True)
    # every pass fixes at least one more power of t^step
    for _ in range(h_terms + 2):
        new = ((alpha * alpha * 6 - alpha ** 4) + 3) * inv
        new = new.truncate(order)
        if new == alpha and new.order == alpha.order:
            break
        alpha = new
    else:
        raise NoConvergence("fixed point iteration did not stabilize")
    return AlphaSolution(alpha, h_terms, padic_prec, variable)


# -- independent oracle ---------------------------------------------------------------

def newton_alpha(h_terms: int, padic_prec: int) -> dict[int, int]:
    """alpha by Newton's method over Z/3^N with plain integer lists.

    Returns exponent of h^-1 -> residue.  w'(alpha) = h (1 + t (4 alpha^3 -
    12 alpha - 9)) with t = h^-1, which is a unit times h.
    """
    mod = 3 ** padic_prec
    n = h_terms + 1  # coefficients of t^0 .. t^h_terms

    def mul(x, y):
        out = [0] * n
        for i, xi in enumerate(x):
            if xi:
                for j in range(n - i):
                    out[i + j] = (out[i + j] + xi * y[j]) % mod
        return out

    def add(*xs):
        return [sum(c) % mod for c in zip(*xs)]

    def scale(x, s):
        return [(s * c) % mod for c in x]

    def shift(x, k):  # multiply by t^k, k may be negative when the low part vanishes
        if k >= 0:
            return ([0] * k + x)[:n]
        if any(x[:-k]):
            raise ArithmeticError("shift loses nonzero terms")
        return x[-k:] + [0] * (-k)

    def inverse(x):
        # x[0] must be a unit mod 3
        inv0 = pow(x[0], -1, mod)
        out = [inv0] + [0] * (n - 1)
        for k in range(1, n):
            acc = sum(x[i] * out[k - i] for i in range(1, k + 1))
            out[k] = (-acc * inv0) % mod
        return out

    one = [1] + [0] * (n - 1)
    alpha = [0] * n
    for _ in range(2 * n.bit_length() + padic_prec.bit_length() + 4):
        a2 = mul(alpha, alpha)
        a3 = mul(a2, alpha)
        a4 = mul(a3, alpha)
        # t * w(alpha) = t alpha^4 - 6 t alpha^2 + alpha - 9 t alpha - 3 t
        tw = add(shift(a4, 1), scale(shift(a2, 1), -6), alpha,
                 scale(shift(alpha, 1), -9), scale(shift(one, 1), -3))
        # t * w'(alpha) = 1 + t (4 alpha^3 - 12 alpha - 9)
        twp = add(one, shift(add(scale(a3, 4), scale(alpha, -12), scale(one, -9)), 1))
        step = mul(tw, inverse(twp))
        if not any(step):
            break
        alpha = add(alpha, scale(step, -1))
    else:
        raise NoConvergence("Newton iteration did not stabilize")
    return {k: alpha[k] for k in range(n)}


# -- evaluation -----------------------------------------------------------------------------

def _exact_power(name: str, exponent: int, prec: int, cap: int) -> LaurentSeries:
    # var^k = t^-k, known exactly; ``cap`` only bounds the stored order
    return LaurentSeries(-exponent, (PadicGauss(1, 0, prec),), cap, prec, name, True)


def evaluate(p: Poly, sol: AlphaSolution) -> LaurentSeries:
    """p(var, alpha) with var the solution's variable."""
    name, prec = sol.variable, sol.padic_precision
    alpha = sol.alpha
    cap = alpha.order + 8
    out = LaurentSeries.zero(cap, prec, name, True)
    for ev, pv in p.laurent_coefficients(name).items():
        inner = LaurentSeries.zero(cap, prec, name, True)
        for ea, pa in pv.laurent_coefficients("alpha").items():
            if not pa.is_constant():
                raise ValueError("formula has extra variables")
            term = alpha ** ea * PadicGauss.of(pa.constant_value(), prec)
            inner = inner + term
        out = out + inner * _exact_power(name, ev, prec, cap)
    return out


@lru_cache(maxsize=None)
def _psi_formulas():
    from .powerops import specialize_chart

    forms = specialize_chart()
    return forms.psi_h, forms.psi_c


def psiF_h(sol: AlphaSolution, through: int | None = None) -> LaurentSeries:
    """psi_F^3(h) as a series in h^-1, valid through h^-(h_order - 3)."""
    if sol.variable != "h":
        raise ValueError("need a solution in h")
    out = evaluate(_psi_formulas()[0], sol)
    if through is not None:
        if through > out.order:
            raise PrecisionInsufficient(f"h^-{through} needs more than {sol.h_order} terms")
        out = out.truncate(through)
    return out


def psiF_c(sol: AlphaSolution, through: int | None = None) -> LaurentSeries:
    """psi_F^3(c) as a series in c^-1, valid through c^-(2 h_order - 3)."""
    if sol.variable != "c":
        raise ValueError("need a solution in c")
    out = evaluate(_psi_formulas()[1], sol)
    if through is not None:
        if through > out.order:
            raise PrecisionInsufficient(f"c^-{through} needs more than {sol.h_order} terms")
        out = out.truncate(through)
    return out


def integer_coefficients(series: LaurentSeries) -> dict[int, int]:
    """Exponent of the variable -> balanced integer lift (imaginary parts must vanish)."""
    out = {}
    for k, c in enumerate(series.coeffs):
        n = series.low + k
        out[-n if series.inverted else n] = c.integer_lift()
    return out


def residual(sol: AlphaSolution) -> LaurentSeries:
    """w(alpha), which must vanish through the proven order."""
    w = parse("alpha^4 - 6 alpha^2 + (h - 9) alpha - 3")
    if sol.variable == "c":
        w = w.subs({"h": parse("c^2 + 1")})
    return evaluate(w, sol)


def residual_vanishes(sol: AlphaSolution) -> bool:
    r = residual(sol)
    return all(c.is_zero() for c in r.coeffs)


def alpha_is_zero_mod3(sol: AlphaSolution) -> bool:
    return all(c.valuation() >= 1 for c in sol.alpha.coeffs)


def truncate_solution(sol: AlphaSolution, h_terms: int, padic_prec: int) -> AlphaSolution:
    step = 1 if sol.variable == "h" else 2
    if h_terms > sol.h_order or padic_prec > sol.padic_precision:
        raise PrecisionInsufficient("cannot raise precision by truncation")
    alpha = sol.alpha.truncate(step * h_terms).with_precision(padic_prec)
    return AlphaSolution(alpha, h_terms, padic_prec, sol.variable)


def precision_coherence(small=(6, 12), large=(DEFAULT_TERMS, DEFAULT_PRECISION)) -> bool:
    """Solving at ``large`` then truncating equals solving at ``small``."""
    for variable in ("h", "c"):
        big = solve_alpha(*large, variable=variable)
        direct = solve_alpha(*small, variable=variable)
        cut = truncate_solution(big, *small)
        if cut.alpha != direct.alpha or cut.alpha.order != direct.alpha.order:
            return False
        fn = psiF_h if variable == "h" else psiF_c
        a, b = fn(cut), fn(direct)
        if a != b or integer_coefficients(a) != integer_coefficients(b):
            return False
    return True


def printed_match(sol_h: AlphaSolution, sol_c: AlphaSolution) -> dict[str, bool]:
    ph = integer_coefficients(psiF_h(sol_h))
    pc = integer_coefficients(psiF_c(sol_c))
    out = {f"h^{e}": ph.get(e) == v for e, v in PSI_F_H_PRINTED.items()}
    out.update({f"c^{e}": pc.get(e) == v for e, v in PSI_F_C_PRINTED.items()})
    return out


def odd_in_c(sol_c: AlphaSolution) -> bool:
    return all(v == 0 for e, v in integer_coefficients(psiF_c(sol_c)).items() if e % 2 == 0)


def h_c_agreement(sol_h: AlphaSolution, sol_c: AlphaSolution) -> bool:
    """psi_F(h) = psi_F(c)^2 + 1, compared in c after substituting h = c^2 + 1."""
    prec = min(sol_h.padic_precision, sol_c.padic_precision)
    ph = psiF_h(sol_h)
    pc = psiF_c(sol_c)
    # rewrite the h-series in c: sum k_n h^n with h = c^2 (1 + c^-2)
    order_c = min(2 * ph.order, pc.order)
    cap = order_c + 8
    c2 = LaurentSeries(-2, (PadicGauss(1, 0, prec), PadicGauss(0, 0, prec), PadicGauss(1, 0, prec)),
                       cap, prec, "c", True)
    h_in_c = LaurentSeries.zero(cap, prec, "c", True)
    hinv = c2.inverse().truncate(order_c + 6)
    for k, coeff in enumerate(ph.coeffs):
        n = ph.low + k  # coefficient of t^n = h^-n
        term = (hinv ** n if n > 0 else c2 ** (-n)) * coeff.with_precision(prec)
        h_in_c = h_in_c + term
    lhs = h_in_c.truncate(order_c)
    rhs = (pc * pc + 1).truncate(order_c)
    return lhs == rhs


def unique_root_check() -> dict[str, bool]:
    """w = alpha (alpha^3 + h) mod 3, and alpha^3 + h has no root in F_9((h))."""
    w = parse("alpha^4 - 6 alpha^2 + (h - 9) alpha - 3")
    factored = parse("alpha (alpha^3 + h)")
    mod3 = not reduce_mod3_and_ideal(w - factored)
    zero_root = not reduce_mod3_and_ideal(w.subs({"alpha": 0}))
    # a root alpha of alpha^3 = -h would need 3 v(alpha) = v(h) = 1
    cubic_root_possible = any(3 * v == 1 for v in range(-10, 11))
    return {"mod3_factorization": mod3, "zero_is_root": zero_root,
            "cubic_has_no_root": not cubic_root_possible}


def certified_expansion(variable: str = "h", h_terms: int = DEFAULT_TERMS,
                        padic_prec: int = DEFAULT_PRECISION) -> dict[int, int]:
    """Integer coefficients of psi_F^3(var) whose lifts agree at 3^N and 3^2N.

    The true coefficients are rational integers (the recursion never
    divides), so agreement of the balanced lifts at two precisions pins them.
    """
    fn = psiF_h if variable == "h" else psiF_c
    lo = integer_coefficients(fn(solve_alpha(h_terms, padic_prec, variable)))
    hi = integer_coefficients(fn(solve_alpha(h_terms, 2 * padic_prec, variable)))
    bad = [e for e in lo if lo[e] != hi.get(e)]
    if bad:
        raise PrecisionInsufficient(f"3-adic precision too small for exponents {bad}")
    return lo
