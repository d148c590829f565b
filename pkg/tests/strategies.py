"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from powerstreams.exppoly import ExpPoly
from powerstreams.spatial import TrigPoly

betas = st.sampled_from([0.0, 0.5, 1.0, 2.5])
coefs = st.floats(-2.0, 2.0, allow_nan=False).filter(lambda c: abs(c) > 1e-3)


@st.composite
def exppolys(draw, beta=None, max_k=4, max_m=3, max_terms=5):
    b = draw(betas) if beta is None else beta
    terms = draw(
        st.dictionaries(
            st.tuples(st.integers(0, max_k), st.integers(0, max_m)), coefs, min_size=1, max_size=max_terms
        )
    )
    return ExpPoly(b, terms)


@st.composite
def trigpolys(draw, max_h=5):
    cos = draw(st.dictionaries(st.integers(0, max_h), coefs, max_size=4))
    sin = draw(st.dictionaries(st.integers(1, max_h), coefs, max_size=4))
    return TrigPoly(cos, sin)
