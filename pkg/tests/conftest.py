from fractions import Fraction

import pytest
from hypothesis import strategies as st

from symcontain import linalg
from symcontain.numberfield import FieldElement, cyclotomic_spec
from symcontain.polyring import HomogeneousForm, monomial_basis

SPECS = {n: cyclotomic_spec(n) for n in (3, 5, 6, 8, 12)}

small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(spec, rationals=small_rationals):
    return st.lists(rationals, min_size=spec.degree, max_size=spec.degree).map(
        lambda cs: FieldElement(spec, cs))


def nonzero_elements(spec):
    return elements(spec).filter(lambda u: not u.is_zero())


def small_elements(spec):
    # integer coefficients in [-3, 3]: keeps products of forms cheap
    return st.lists(st.integers(-3, 3), min_size=spec.degree, max_size=spec.degree).map(
        lambda cs: FieldElement(spec, [Fraction(c) for c in cs]))


@st.composite
def forms(draw, spec, degree=None, max_degree=4, max_terms=6):
    d = draw(st.integers(0, max_degree)) if degree is None else degree
    basis = monomial_basis(d)
    monos = draw(st.lists(st.sampled_from(basis), max_size=max_terms, unique=True))
    return HomogeneousForm(spec, d, {m: draw(small_elements(spec)) for m in monos})


@st.composite
def matrices(draw, spec, max_rows=5, max_cols=5, rank_deficient=True):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = [draw(st.lists(small_elements(spec), min_size=c, max_size=c)) for _ in range(r)]
    if rank_deficient and r > 1 and draw(st.booleans()):
        # force a dependency: last row is a combination of two others
        i, j = draw(st.integers(0, r - 2)), draw(st.integers(0, r - 2))
        u, v = draw(small_elements(spec)), draw(small_elements(spec))
        rows[-1] = [u * a + v * b for a, b in zip(rows[i], rows[j])]
    return rows


@pytest.fixture(params=["python", "flint"])
def backend(request):
    old = linalg.get_backend()
    linalg.set_backend(request.param)
    yield request.param
    linalg.set_backend(old)


# --- acceptance summary -------------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
