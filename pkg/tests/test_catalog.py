import json
import warnings
from fractions import Fraction

import pytest

from symcontain.catalog import (ArrangementFileError, DegenerateParameterWarning, DeformationParams, HESSE_XYZ,
                                YOSHINAGA_PROFILE, arrangement_from_json, construction_identity_holds,
                                deformation_factors, deformation_sextic, fermat, fermat_form, hesse_cubic,
                                load_arrangement, proportional, reference_lines, reference_triples,
                                save_arrangement, tau, yoshinaga)
from symcontain.geometry import DuplicateLineError
from symcontain.numberfield import FieldMismatchError, cyclotomic_spec
from symcontain.polyring import HomogeneousForm, evaluate, expand_product, variables

K6 = cyclotomic_spec(6)


@pytest.fixture(scope="module")
def yosh():
    return yoshinaga(15)


def test_sextic_factors_multiply_back():
    for c in (1, 3, 7, 15, Fraction(1, 2)):
        assert proportional(expand_product([l.form() for l in deformation_factors(c)]), deformation_sextic(c))


def test_sextic_literal_expansion_at_15():
    expected = HomogeneousForm(K6, 6, {(6, 0, 0): 1, (0, 6, 0): -1, (4, 1, 1): 45, (1, 4, 1): -45,
                                        (3, 0, 3): -3375, (0, 3, 3): 3375})
    assert deformation_sextic(15) == expected


def test_tau_images():
    p = deformation_sextic(15)
    x, y, z = variables(K6)
    assert tau(p, 1) == p.substitute_permutation((1, 2, 0))
    assert tau(p, 3) == p
    assert tau(x, 1) == y


def test_yoshinaga_profile_and_identity(yosh):
    assert len(yosh) == 18
    assert yosh.locus().profile() == YOSHINAGA_PROFILE
    assert len(yosh.locus()) == 57
    assert construction_identity_holds(yosh, 15)


def test_yoshinaga_matches_bundled_lines(yosh):
    ref = reference_lines()
    assert len(ref) == 18
    assert yosh.label_map(ref) is not None
    assert sorted(yosh.label_map(ref).values()) == list(range(18))


def test_reference_triples_shape():
    triples = reference_triples()
    assert len(triples) == 48
    assert len({frozenset(t) for t in triples}) == 48
    # every line lies on eight triple points
    counts = [sum(1 for t in triples if k in t) for k in range(1, 19)]
    assert counts == [8] * 18


def test_degenerate_parameter_warns():
    with pytest.warns(DegenerateParameterWarning):
        arr = yoshinaga(2)
    assert arr.locus().profile() != YOSHINAGA_PROFILE


def test_coincident_lines_rejected():
    with pytest.raises(DuplicateLineError):
        yoshinaga(-1)


@pytest.mark.parametrize("c", [1, 3, 7])
def test_other_parameters_generic(c):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateParameterWarning)
        arr = yoshinaga(c)
    assert arr.locus().profile() == YOSHINAGA_PROFILE


def test_zero_parameter_rejected():
    with pytest.raises(ValueError):
        DeformationParams(0)


def test_fermat_products():
    for n in (3, 4, 6):
        arr = fermat(n)
        assert len(arr) == 3 * n
        assert arr.spec.conductor == n
        assert proportional(arr.defining_form(), fermat_form(n))


def test_fermat_small_n():
    with pytest.raises(ValueError):
        fermat(2)


def test_hesse_cubic_at_doubles(yosh):
    cubic = hesse_cubic()
    assert cubic.coefficient((1, 1, 1)) == HESSE_XYZ
    doubles = yosh.locus().of_multiplicity(2)
    assert len(doubles) == 9
    assert all(evaluate(cubic, lp.point.coords) == 0 for lp in doubles)


def test_arrangement_roundtrip(tmp_path, yosh):
    path = tmp_path / "y.json"
    save_arrangement(yosh, path)
    back = load_arrangement(path, K6)
    assert back.lines == yosh.lines and back.labels == yosh.labels


def test_file_field_mismatch(tmp_path, yosh):
    path = tmp_path / "y.json"
    save_arrangement(yosh, path)
    with pytest.raises(FieldMismatchError):
        load_arrangement(path, cyclotomic_spec(5))


def test_file_parse_error_location():
    data = {"field": K6.to_json(), "lines": [{"label": "l1", "coeffs": ["1", "2*a +", "0"]}]}
    with pytest.raises(ArrangementFileError, match=r"lines\[0\]\.coeffs\[1\]"):
        arrangement_from_json(data)


def test_file_malformed():
    with pytest.raises(ArrangementFileError):
        arrangement_from_json({"lines": []})
    with pytest.raises(ArrangementFileError):
        arrangement_from_json({"field": K6.to_json(), "lines": [{"coeffs": ["0", "0", "0"]}]})
    with pytest.raises(ArrangementFileError):
        arrangement_from_json({"field": K6.to_json(), "lines": [{"coeffs": ["1", "0"]}]})


def test_bundled_json_is_marked_as_transcription():
    from importlib import resources

    data = json.loads(resources.files("symcontain").joinpath("data", "yoshinaga_c15_lines.json").read_text())
    assert "transcription" in json.dumps(data["provenance"])
