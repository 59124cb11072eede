import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from power_ops.scalar import (
    DivisionByNonUnit,
    NonsimpleRoot,
    NoRoot,
    PadicGauss,
    balanced,
    hensel_lift_root,
    rational_mod,
    valuation,
)

PREC = 8
M = 3**PREC
residues = st.integers(min_value=0, max_value=M - 1)
gauss = st.builds(lambda r, s: PadicGauss(r, s, PREC), residues, residues)


@given(gauss, gauss, gauss)
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(gauss)
def test_inverse_of_units(x):
    if x.is_unit():
        assert x * x.inverse() == 1
    else:
        with pytest.raises(DivisionByNonUnit):
            x.inverse()


@given(gauss)
def test_unit_iff_norm_prime_to_three(x):
    # oracle: brute-force search for an inverse mod 3
    r, s = x.re % 3, x.im % 3
    has_inverse = any((r * a - s * b) % 3 == 1 and (r * b + s * a) % 3 == 0
                      for a in range(3) for b in range(3))
    assert x.is_unit() == has_inverse


def test_i_squared():
    i = PadicGauss.i(PREC)
    assert i * i == -1


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(1, 50))
def test_rational_mod_inverts_denominator(n, d):
    q = mpq(n, d)
    num, den = int(q.numerator), int(q.denominator)
    if den % 3 == 0:
        with pytest.raises(DivisionByNonUnit):
            rational_mod(q, 27)
    else:
        assert rational_mod(q, 27) * den % 27 == num % 27


@given(st.integers(-10**9, 10**9).filter(bool))
def test_valuation(n):
    v = valuation(n, 3)
    assert n % 3**v == 0 and (n // 3**v) % 3 != 0


@given(st.integers(), st.integers(2, 10**6))
def test_balanced_range(r, m):
    b = balanced(r, m)
    assert (b - r) % m == 0 and -m // 2 <= b <= m // 2


@given(gauss)
def test_integer_lift_round_trip(x):
    re, im = x.lift()
    assert PadicGauss(re, im, PREC) == x


def test_hensel_lifts_square_root_of_minus_two():
    # x^2 + 2 = (x - 1)(x + 1) mod 3, both roots simple
    for seed in (1, -1):
        r = hensel_lift_root([2, 0, 1], PadicGauss.of(seed, 20), 20)
        assert r * r == -2
        assert (r.re - seed) % 3 == 0


def test_hensel_lift_matches_brute_force():
    # x^3 + x + 1 has the single simple root 1 mod 3
    root = hensel_lift_root([1, 1, 0, 1], PadicGauss.of(1, 6), 6)
    brute = [x for x in range(3**6) if (x**3 + x + 1) % 3**6 == 0]
    assert brute == [root.integer_lift() % 3**6]


def test_hensel_refuses_bad_seeds():
    with pytest.raises(NoRoot):
        hensel_lift_root([1, 0, 1], PadicGauss.of(0, 5), 5)
    with pytest.raises(NonsimpleRoot):
        hensel_lift_root([0, 0, 1], PadicGauss.of(0, 5), 5)


def test_precision_is_min_of_operands():
    x = PadicGauss(1, 2, 5) + PadicGauss(1, 0, 3)
    assert x.precision == 3
