import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from power_ops.polyring import Poly, var

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_ints = st.integers(min_value=-9, max_value=9)


@st.composite
def polys(draw, names=("a", "b"), max_terms=4, max_exp=3, laurent=False):
    """Small sparse polynomials, optionally with negative exponents."""
    lo = -2 if laurent else 0
    out = Poly.const(0)
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(small_ints.filter(bool))
        term = Poly.const(c)
        for n in names:
            term = term * var(n) ** draw(st.integers(lo, max_exp))
        out = out + term
    return out
