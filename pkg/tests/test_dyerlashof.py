import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from power_ops.dyerlashof import (
    BoundExceeded,
    GammaElement,
    GammaSyntaxError,
    adem_table,
    h_matrix,
    is_admissible,
    normalize,
    normalize_leftmost,
    normalize_text,
    omega_action,
    parse_gamma,
    rank_in_degree,
    relation_identities,
    to_text,
)
from power_ops.polyring import Poly, var

h, i = var("h"), var("i")

coefficients = st.builds(
    lambda n, k, j: Poly.const(n) * h**k * i**j,
    st.integers(-5, 5).filter(bool), st.integers(0, 2), st.integers(0, 1))


def words(max_len=4):
    return st.lists(st.integers(0, 3), max_size=max_len).map(tuple)


@st.composite
def gamma_elements(draw, max_terms=3, max_len=4):
    d = {}
    for _ in range(draw(st.integers(1, max_terms))):
        d[draw(words(max_len))] = draw(coefficients)
    return GammaElement.from_dict(d)


def test_defining_relations_are_rewrite_identities():
    ids = relation_identities()
    assert len(ids) == 11
    for name, (lhs, rhs) in ids.items():
        assert lhs == rhs, name


@pytest.mark.parametrize("d", range(7))
def test_rank(d):
    assert rank_in_degree(d) == sum(3**k for k in range(d + 1))


def test_rank_bound():
    with pytest.raises(BoundExceeded):
        rank_in_degree(7)
    with pytest.raises(ValueError):
        rank_in_degree(-1)


@given(words(6))
def test_admissible_means_no_descent_to_zero(w):
    # oracle: admissible words are q0^m followed by nonzero letters
    m = 0
    while m < len(w) and w[m] == 0:
        m += 1
    assert is_admissible(w) == all(k != 0 for k in w[m:])


@settings(max_examples=120)
@given(gamma_elements())
def test_normalization_is_idempotent_and_admissible(e):
    n = normalize(e)
    assert n.is_normal()
    assert normalize(n) == n


@settings(max_examples=60)
@given(gamma_elements(), gamma_elements())
def test_normalization_is_linear(x, y):
    assert normalize(x + y) == normalize(x) + normalize(y)


@settings(max_examples=30)
@given(gamma_elements(max_terms=2, max_len=2), gamma_elements(max_terms=2, max_len=2))
def test_normal_form_is_compatible_with_products(x, y):
    assert normalize(normalize(x) * y) == normalize(x * y)
    assert normalize(x * normalize(y)) == normalize(x * y)


def test_two_strategies_agree_on_short_words():
    for n in (2, 3):
        for w in itertools.product(range(4), repeat=n):
            e = GammaElement.word(*w) * GammaElement.scalar(h)
            assert normalize_leftmost(e) == normalize(e), w


def test_scalars_twist_through_q():
    M = h_matrix()
    for k in range(4):
        e = GammaElement.word(k) * GammaElement.scalar(h)
        assert e == GammaElement.from_dict({(j,): M[k][j] for j in range(4)})
        assert GammaElement.word(k) * GammaElement.scalar(i) == GammaElement.word(k, coeff=-i)


def test_integers_are_central():
    e = GammaElement.word(2, 1)
    assert e * GammaElement.scalar(7) == GammaElement.scalar(7) * e


def test_adem_table_has_only_admissible_or_q0_leading_words():
    for k, row in adem_table().items():
        assert row, k
        for (a, b) in row:
            assert (a, b) != (k, 0)


@settings(max_examples=60)
@given(gamma_elements())
def test_text_round_trip(e):
    n = normalize(e)
    assert parse_gamma(to_text(n)) == n


def test_normalize_text():
    assert normalize_text("q0 i") == "(-i)*q0"
    assert normalize_text("q1 q2 - q1*q2") == "0"
    assert normalize_text("2 (q1 + q2)^2") == normalize_text("2 q1 q1 + 2 q1 q2 + 2 q2 q1 + 2 q2 q2")


@pytest.mark.parametrize("text", ["", "q4", "q1 +", "(q1", "q1 ^ h", "x"])
def test_syntax_errors(text):
    with pytest.raises(GammaSyntaxError):
        parse_gamma(text)


def test_omega_action():
    assert omega_action(GammaElement.word(1)) == 1
    assert omega_action(GammaElement.word(1, 1, 1)) == 1
    for k in (0, 2, 3):
        assert omega_action(GammaElement.word(k)) == 0
