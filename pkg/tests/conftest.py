from hypothesis import strategies as st

from scalars import QScalar, Scalar

EXPONENT = st.integers(min_value=-3, max_value=3)
COEFF = st.integers(min_value=-5, max_value=5)


@st.composite
def scalars(draw, max_terms: int = 4):
    terms = draw(
        st.dictionaries(st.tuples(EXPONENT, EXPONENT), COEFF, max_size=max_terms)
    )
    return Scalar(terms)


@st.composite
def qscalars(draw, max_terms: int = 4):
    terms = draw(st.dictionaries(st.tuples(EXPONENT), COEFF, max_size=max_terms))
    return QScalar(terms)
