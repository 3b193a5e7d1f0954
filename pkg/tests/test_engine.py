import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcontain import linalg
from symcontain.catalog import fermat, yoshinaga
from symcontain.engine import (VERDICT_IN_ORDINARY, VERDICT_NONCONTAINMENT, VERDICT_NOT_SYMBOLIC, FatPointScheme,
                               alpha, check_noncontainment, compositions, condition_matrix, expected_dimension,
                               fat_graded_piece, graded_containment, ordinary_power_piece, scheme_from_locus,
                               symbolic_membership, witness_search)
from symcontain.geometry import ProjPoint
from symcontain.numberfield import cyclotomic_spec
from symcontain.polyring import monomial_basis, vanishes_to_order, variables

K6 = cyclotomic_spec(6)


def pts(*coords):
    return tuple(ProjPoint.of(K6, [K6(c) for c in p]) for p in coords)


COORD = pts((1, 0, 0), (0, 1, 0), (0, 0, 1))


def coord_scheme(m=1):
    return FatPointScheme(K6, COORD, (m,) * 3, "coordinate")


def monomial_span(d, pred):
    return {mono for mono in monomial_basis(d) if pred(mono)}


def support(piece):
    """Monomials appearing in a monomial-spanned piece (all basis rows are single monomials)."""
    out = set()
    for f in piece.forms():
        assert len(f) == 1
        out |= set(f.terms)
    return out


@pytest.fixture(scope="module")
def hesse():
    arr = fermat(3)
    return arr, scheme_from_locus(arr.locus(), "triple-only")


def test_compositions():
    assert list(compositions(18, 2, 8)) == [(8, 10), (9, 9)]
    assert list(compositions(5, 3, 1)) == [(1, 1, 3), (1, 2, 2)]
    assert list(compositions(3, 2, 2)) == []
    with pytest.raises(ValueError):
        list(compositions(3, 0, 1))


@pytest.mark.parametrize("m,d", [(1, 2), (2, 3), (2, 4), (3, 5), (3, 6)])
def test_coordinate_points_monomial_oracle(m, d):
    # x^i y^j z^k vanishes to order m at (1:0:0) iff j + k >= m, i.e. i <= d - m
    piece = fat_graded_piece(coord_scheme(m), d)
    expected = monomial_span(d, lambda t: all(e <= d - m for e in t))
    assert piece.dim == len(expected)
    assert support(piece) == expected


def test_coordinate_points_cubic():
    piece = fat_graded_piece(coord_scheme(2), 3)
    x, y, z = variables(K6)
    assert piece.dim == 1 and piece.forms()[0] == x * y * z


def test_ordinary_square_of_coordinate_ideal():
    # I = (xy, yz, zx); (I^2)_4 is spanned by the six products of generators
    sq = ordinary_power_piece(coord_scheme(), 2, 4)
    assert support(sq) == {(2, 2, 0), (1, 2, 1), (2, 1, 1), (0, 2, 2), (1, 1, 2), (2, 0, 2)}
    assert graded_containment(coord_scheme(), 2, 2, 4)


def test_r_equals_one_is_fat_piece():
    s = coord_scheme()
    for d in range(1, 5):
        assert ordinary_power_piece(s, 1, d).subspace.basis == fat_graded_piece(s, d).subspace.basis


def test_condition_matrix_shape():
    s = coord_scheme(3)
    m = condition_matrix(s, 5)
    assert len(m.rows) == s.n_conditions == 18
    assert m.ncols == comb(7, 2)


def test_expected_dimension_lower_bound(hesse):
    _, s = hesse
    for m in (1, 2, 3):
        for d in range(0, 12):
            assert expected_dimension(s.scaled(m), d) == comb(d + 2, 2) - s.scaled(m).n_conditions
            assert fat_graded_piece(s.scaled(m), d).dim >= max(0, expected_dimension(s.scaled(m), d))


def test_alpha_values(hesse):
    _, s = hesse
    assert alpha(s) == 4
    assert alpha(coord_scheme()) == 2
    assert alpha(coord_scheme(2)) == 3


def test_dimension_monotone_beyond_alpha(hesse):
    _, s = hesse
    dims = [fat_graded_piece(s.scaled(2), d).dim for d in range(alpha(s.scaled(2)), 12)]
    assert dims == sorted(dims)


def test_fat_basis_vanishes(hesse):
    _, s = hesse
    for f in fat_graded_piece(s.scaled(2), 7).forms():
        assert all(vanishes_to_order(f, p, 2, full=True) for p in s.points)


def test_ordinary_inside_symbolic(hesse):
    _, s = hesse
    for r in (1, 2):
        for d in range(r * alpha(s), r * alpha(s) + 3):
            assert linalg.contains(fat_graded_piece(s.scaled(r), d).subspace, ordinary_power_piece(s, r, d).subspace)


def test_products_are_in_ordinary_piece(hesse):
    _, s = hesse
    f, g = fat_graded_piece(s, 4).forms()[0], fat_graded_piece(s, 5).forms()[-1]
    assert f * g in ordinary_power_piece(s, 2, 9)


def test_dual_hesse_noncontainment(hesse):
    arr, s = hesse
    lines = arr.defining_form()
    rep = check_noncontainment(s, 3, 2, lines)
    assert rep.verdict == VERDICT_NONCONTAINMENT
    assert rep.conditions_checked == 12 * 6
    assert rep.dim_symbolic == 1 and rep.dim_ordinary == 18
    assert lines not in ordinary_power_piece(s, 2, 9)


def test_verdict_invariance(hesse):
    arr, s = hesse
    lines = arr.defining_form()
    rng = random.Random(7)
    base = check_noncontainment(s, 3, 2, lines).verdict
    spec = arr.spec
    for scalar in (spec(-3), spec.gen(), spec(2) + spec.gen()):
        assert check_noncontainment(s, 3, 2, lines.scale(scalar)).verdict == base
    order = list(range(len(s)))
    rng.shuffle(order)
    assert check_noncontainment(s.permuted(order), 3, 2, lines).verdict == base


def test_other_verdicts(hesse):
    arr, s = hesse
    lines = arr.defining_form()
    x, y, z = variables(arr.spec)
    # one extra linear factor: order 4 fails at the points off the extra line
    rep = check_noncontainment(s, 4, 2, lines * x)
    assert rep.verdict == VERDICT_NOT_SYMBOLIC
    assert any(not c.ok for c in rep.certificates)
    # products of two elements of I are in I^2
    g = fat_graded_piece(s, 4).forms()[0]
    assert check_noncontainment(s, 2, 2, g * g).verdict == VERDICT_IN_ORDINARY


def test_graded_containment_directions(hesse):
    _, s = hesse
    for d in (4, 6, 9):
        assert graded_containment(s, 1, 1, d)
    # m >= 2r: symbolic inside ordinary
    for d in (9, 12):
        assert graded_containment(s, 4, 2, d)
    assert not graded_containment(s, 3, 2, 9)
    # m = r > 1 is not automatic: the symbolic square is strictly bigger at degree 8
    assert fat_graded_piece(s.scaled(2), 8).dim > ordinary_power_piece(s, 2, 8).dim


def test_witness_search_dual_hesse(hesse):
    arr, s = hesse
    found = witness_search(s, 3, 2, 9)
    assert len(found) == 1
    lines = arr.defining_form()
    both = linalg.subspace_sum([ordinary_power_piece(s, 2, 9).subspace,
                                linalg.span(arr.spec, [found[0].coefficient_vector()], 55)])
    assert linalg.in_span(both, lines.coefficient_vector()) is not None
    assert witness_search(s, 1, 1, 6) == []
    assert witness_search(s, 4, 2, 12) == []


def test_symbolic_membership_certificates(hesse):
    arr, s = hesse
    ok, certs = symbolic_membership(arr.defining_form(), s, 3)
    assert ok and len(certs) == 12 and all(c.ok for c in certs)
    ok, certs = symbolic_membership(arr.defining_form(), s, 4)
    assert not ok
    assert all(sum(c.failing_derivative) == 3 for c in certs if not c.ok)


def test_lines_fail_at_yoshinaga_doubles():
    arr = yoshinaga(15)
    s = scheme_from_locus(arr.locus(), "all-singular")
    ok, certs = symbolic_membership(arr.defining_form(), s, 3)
    assert not ok
    failing = [c for c in certs if not c.ok]
    assert len(failing) == 9
    assert all(s.mults[c.index] == 1 and sum(c.failing_derivative) == 2 for c in failing)


def test_scheme_selectors():
    locus = yoshinaga(15).locus()
    assert len(scheme_from_locus(locus, "all-singular")) == 57
    assert len(scheme_from_locus(locus, "triple-only")) == 48
    assert len(scheme_from_locus(locus, "triple-plus-doubles:0,3")) == 50
    assert len(scheme_from_locus(locus, "triple-plus-doubles:all")) == 57
    for bad in ("triple-plus-doubles:9", "triple-plus-doubles:x", "nonsense"):
        with pytest.raises(ValueError):
            scheme_from_locus(locus, bad)


def test_radical_only_for_ordinary_powers():
    with pytest.raises(ValueError):
        ordinary_power_piece(coord_scheme(2), 2, 6)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(0, 7))
def test_fat_piece_matches_brute_force_vanishing(m, d):
    # every basis element vanishes, and the dimension agrees with the monomial oracle
    piece = fat_graded_piece(coord_scheme(m), d)
    assert piece.dim == len(monomial_span(d, lambda t: all(e <= d - m for e in t)))
