from fractions import Fraction

from hypothesis import strategies as st

from carleman_ibp.terms import Deriv, Schema, Term, parse_row


def P(*rows: str) -> list[Term]:
    return [parse_row(r, Schema.POLY) for r in rows]


def E(*rows: str) -> list[Term]:
    return [parse_row(r, Schema.EXP) for r in rows]


def PU(*rows: str) -> list[Term]:
    return [parse_row(r, Schema.POLY, unary=True) for r in rows]


def EU(*rows: str) -> list[Term]:
    return [parse_row(r, Schema.EXP, unary=True) for r in rows]


coeffs = st.builds(
    Fraction,
    st.integers(-50, 50).filter(bool),
    st.integers(1, 12),
)
small = st.integers(0, 8)


@st.composite
def bilinear_terms(draw, schema: Schema | None = None, flags: bool = False):
    """Rewritable rows: x-orders <= 4, at most one t-derivative, exponents <= 8."""
    schema = schema or draw(st.sampled_from(list(Schema)))
    first = Deriv(draw(st.integers(0, 1)), draw(st.integers(0, 4)))
    second = Deriv(0, draw(st.integers(0, 4)))
    if schema is Schema.POLY:
        factors = {"mu": draw(small)}
        s = 0
    else:
        factors = {k: draw(st.integers(0, 3)) for k in ("phi1", "phi2", "phi3", "phi4")}
        factors["vphi"] = draw(small)
        s = draw(small)
    dt = dx = 0
    if flags:
        which = draw(st.sampled_from(["", "t", "x"]))
        dt, dx = int(which == "t"), int(which == "x")
    return Term(draw(coeffs), draw(small), s, draw(st.integers(0, 1)), factors, first, second, dt, dx, schema)


def term_lists(schema: Schema, max_size: int = 6):
    return st.lists(bilinear_terms(schema), min_size=1, max_size=max_size)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
