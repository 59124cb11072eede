import pytest
from hypothesis import given
from hypothesis import strategies as st

from power_ops.polyring import Poly, var
from power_ops.scalar import PadicGauss
from power_ops.series import (
    LaurentSeries,
    NoContraction,
    NonUnitLeading,
    TruncSeries,
    solve_by_recursion,
)

ORDER = 6
coeff_lists = st.lists(st.integers(-20, 20), min_size=0, max_size=ORDER + 1)


def ts(cs, order=ORDER):
    return TruncSeries([Poly.const(c) for c in cs], order)


def no_constant(cs):
    return ts([0] + cs[1:])


@given(coeff_lists, coeff_lists, coeff_lists)
def test_truncated_ring_axioms(x, y, z):
    X, Y, Z = ts(x), ts(y), ts(z)
    assert (X * Y) * Z == X * (Y * Z)
    assert X * (Y + Z) == X * Y + X * Z
    assert X * Y == Y * X


@given(coeff_lists)
def test_inverse(cs):
    cs = [1] + cs[1:]
    S = ts(cs)
    assert S * S.inverse() == ts([1])


@given(coeff_lists, coeff_lists, coeff_lists)
def test_composition_is_associative(f, g, h):
    F, G, Hs = ts(f), no_constant(g), no_constant(h)
    assert F.compose(G).compose(Hs) == F.compose(G.compose(Hs))


@given(coeff_lists, coeff_lists)
def test_composition_against_polynomial_oracle(f, g):
    # oracle: expand the polynomial F(G(u)) and truncate
    F, G = ts(f), no_constant(g)
    expanded = sum((Poly.const(c) * G.to_poly() ** k for k, c in enumerate(f)), Poly.const(0))
    expected = TruncSeries.from_poly(expanded.truncate(("u",), ORDER), "u", ORDER)
    assert F.compose(G) == expected


def test_fixed_point_of_contraction():
    # v = u^3 + u v has the solution u^3 / (1 - u)
    u = TruncSeries.variable(8)
    v = solve_by_recursion(lambda w: u**3 + u * w, 8)
    assert v == TruncSeries([Poly.const(c) for c in [0, 0, 0, 1, 1, 1, 1, 1, 1]], 8)


def test_non_contraction_is_reported():
    one = TruncSeries.constant(Poly.const(1), 4)
    with pytest.raises(NoContraction):
        solve_by_recursion(lambda w: w + one, 4)


def test_to_poly_and_shift():
    s = ts([0, 1, 2])
    assert s.to_poly() == var("u") + 2 * var("u") ** 2
    assert s.shift(1) == ts([0, 0, 1, 2], ORDER + 1)


# -- Laurent series over Z[i]/3^N ----------------------------------------------

PREC = 10
pad = st.builds(lambda r, s: PadicGauss(r, s, PREC), st.integers(-50, 50), st.integers(-50, 50))


def laurent(low, cs, order=8):
    return LaurentSeries(low, tuple(cs), order, PREC)


@given(st.integers(-3, 3), st.lists(pad, min_size=1, max_size=6), st.lists(pad, min_size=1, max_size=6))
def test_laurent_multiplication_commutes(low, x, y):
    assert laurent(low, x) * laurent(0, y) == laurent(0, y) * laurent(low, x)


@given(st.integers(-3, 3), st.lists(pad, min_size=1, max_size=6))
def test_laurent_inverse(low, cs):
    cs = [PadicGauss(1, 1, PREC)] + cs[1:]
    s = laurent(low, cs)
    one = s * s.inverse()
    assert one.coefficient(0) == 1
    assert all(one.coefficient(n).is_zero() for n in range(1, one.order + 1))


def test_laurent_inverse_needs_unit_leading_term():
    with pytest.raises(NonUnitLeading):
        laurent(0, [PadicGauss(3, 0, PREC), PadicGauss(1, 0, PREC)]).inverse()


@given(st.lists(pad, min_size=1, max_size=4), st.integers(0, 4))
def test_laurent_power_matches_repeated_product(cs, n):
    s = laurent(1, cs)
    expected = laurent(0, [PadicGauss(1, 0, PREC)], s.order)
    for _ in range(n):
        expected = expected * s
    assert s**n == expected


def test_integer_coefficients():
    s = laurent(-1, [PadicGauss(-5, 0, PREC), PadicGauss(7, 0, PREC)], 0)
    assert s.integer_coefficients() == {-1: -5, 0: 7}
