import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from power_ops.k1local import (
    PSI_F_C_PRINTED,
    PSI_F_H_PRINTED,
    PrecisionInsufficient,
    alpha_is_zero_mod3,
    certified_expansion,
    h_c_agreement,
    integer_coefficients,
    newton_alpha,
    odd_in_c,
    precision_coherence,
    printed_match,
    psiF_c,
    psiF_h,
    residual_vanishes,
    solve_alpha,
    truncate_solution,
    unique_root_check,
)
from power_ops.powerops import PSI_H_PRINTED


def exact_alpha(terms):
    """alpha in Z[[t]], t = 1/h, from alpha = t (3 + 6 alpha^2 - alpha^4) / (1 - 9t)."""
    n = terms + 1

    def mul(x, y):
        out = [0] * n
        for i, xi in enumerate(x):
            for j in range(n - i):
                out[i + j] += xi * y[j]
        return out

    geo = [0] + [9 ** (k - 1) for k in range(1, n)]  # t / (1 - 9t)
    alpha = [0] * n
    for _ in range(n + 1):
        a2 = mul(alpha, alpha)
        inner = [3 * (k == 0) + 6 * a2[k] - mul(a2, a2)[k] for k in range(n)]
        alpha = mul(inner, geo)
    return alpha


def exact_psi_h(terms):
    """psi_F^3(h) with integer coefficients, as {exponent of h: coeff}."""
    alpha = exact_alpha(terms)
    n = terms + 1
    out = {}
    powers = [[1] + [0] * (n - 1)]
    for j in range(1, 4):
        prev = powers[-1]
        powers.append([sum(prev[i] * alpha[k - i] for i in range(k + 1)) for k in range(n)])
    for j, cj in enumerate(PSI_H_PRINTED.coefficients("alpha")):
        for eh, c in cj.laurent_coefficients("h").items():
            value = int(c.constant_value())
            for k, a in enumerate(powers[j]):
                out[eh - k] = out.get(eh - k, 0) + value * a
    return {e: v for e, v in out.items() if e >= 3 - terms}


def test_printed_coefficients():
    sol_h = solve_alpha(10, 24)
    sol_c = solve_alpha(10, 24, variable="c")
    assert all(printed_match(sol_h, sol_c).values())


def test_certified_h_expansion_matches_exact_integer_oracle():
    got = certified_expansion("h", 10, 24)
    oracle = exact_psi_h(12)
    for e, v in got.items():
        assert oracle[e] == v, e
    for e, v in PSI_F_H_PRINTED.items():
        assert oracle[e] == v


def test_c_expansion_printed_and_odd():
    got = certified_expansion("c", 6, 24)
    for e, v in PSI_F_C_PRINTED.items():
        assert got[e] == v
    assert odd_in_c(solve_alpha(6, 24, variable="c"))


def test_newton_oracle_agrees_with_fixed_point():
    sol = solve_alpha(12, 20)
    newton = newton_alpha(12, 20)
    for k, r in newton.items():
        assert sol.alpha.coefficient(k) == r, k


def test_alpha_exact_integers_reduce_to_padic_solution():
    sol = solve_alpha(8, 16)
    for k, a in enumerate(exact_alpha(8)):
        assert sol.alpha.coefficient(k) == a


def test_residual_and_mod3():
    for var in ("h", "c"):
        sol = solve_alpha(8, 16, variable=var)
        assert residual_vanishes(sol)
        assert alpha_is_zero_mod3(sol)


def test_precision_coherence():
    assert precision_coherence((6, 12), (10, 24))


@settings(max_examples=10)
@given(st.integers(2, 6), st.integers(3, 10), st.integers(0, 4), st.integers(0, 8))
def test_truncation_commutes_with_solving(m, n, dm, dn):
    big = solve_alpha(m + dm, n + dn)
    assert truncate_solution(big, m, n).alpha == solve_alpha(m, n).alpha


def test_truncation_cannot_raise_precision():
    with pytest.raises(PrecisionInsufficient):
        truncate_solution(solve_alpha(4, 8), 5, 8)


def test_h_and_c_expansions_agree():
    assert h_c_agreement(solve_alpha(8, 16), solve_alpha(8, 16, variable="c"))


def test_unique_root():
    assert all(unique_root_check().values())


def test_through_bound_is_enforced():
    sol = solve_alpha(4, 10)
    with pytest.raises(PrecisionInsufficient):
        psiF_h(sol, through=40)
    with pytest.raises(ValueError):
        psiF_c(sol)


def test_too_little_precision_is_detected():
    # 3^3 cannot hold 1674 in balanced form, and 3^6 can
    with pytest.raises(PrecisionInsufficient):
        certified_expansion("h", 5, 3)
    assert integer_coefficients(psiF_h(solve_alpha(5, 8)))[-2] == 1674
