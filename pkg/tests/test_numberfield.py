import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from symcontain.numberfield import (FieldElement, FieldMismatchError, FieldSpec, ParseError, cyclotomic_spec,
                                    format_element, mul_integral, parse_element, power_of_generator)

from conftest import SPECS, elements, nonzero_elements

K6 = SPECS[6]


def embed(u: FieldElement) -> complex:
    """Complex embedding a -> exp(2 pi i / n): an independent numeric oracle."""
    z = cmath.exp(2j * cmath.pi / u.spec.conductor)
    return sum(float(c) * z ** k for k, c in enumerate(u.coeffs))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 30])
def test_cyclotomic_modulus_matches_sympy(n):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_spec(n).modulus) == [int(c) for c in expected]


def test_small_moduli():
    assert cyclotomic_spec(1).modulus == (-1, 1)
    assert cyclotomic_spec(3).modulus == (1, 1, 1)
    assert cyclotomic_spec(6).modulus == (1, -1, 1)
    assert cyclotomic_spec(6).degree == 2


def test_generator_identities_q6():
    a = K6.gen()
    assert a * a == a - 1
    assert a ** 3 == -1
    assert a ** 6 == 1
    assert (1 + a) * (1 - a) == 2 - a
    assert a.inverse() == 1 - a
    assert a ** 5 == 1 - a
    assert a ** -1 == a ** 5


def test_norm_identity():
    # N(p + q a) = p^2 + pq + q^2 in Q(zeta_6)
    for p in range(-6, 7):
        for q in range(-6, 7):
            u = K6(p) + K6(q) * K6.gen()
            assert u.conjugates_product() == p * p + p * q + q * q
    assert (K6(3) + 5 * K6.gen()).conjugates_product() == 49


@settings(max_examples=300)
@given(st.sampled_from([3, 5, 8, 12]).flatmap(lambda n: st.tuples(elements(SPECS[n]), elements(SPECS[n]))))
def test_arithmetic_matches_complex_embedding(pair):
    u, v = pair
    assert abs(embed(u * v) - embed(u) * embed(v)) < 1e-6 * (1 + abs(embed(u)) * abs(embed(v)))
    assert abs(embed(u + v) - embed(u) - embed(v)) < 1e-9 * (1 + abs(embed(u)) + abs(embed(v)))
    if not v.is_zero():
        q = embed(u / v)
        assert abs(q * embed(v) - embed(u)) < 1e-6 * (1 + abs(embed(u)))


@settings(max_examples=1000)
@given(st.sampled_from([5, 6, 12]).flatmap(
    lambda n: st.tuples(elements(SPECS[n]), elements(SPECS[n]), elements(SPECS[n]))))
def test_field_axioms(triple):
    u, v, w = triple
    spec = u.spec
    assert u + v == v + u
    assert u * v == v * u
    assert (u + v) + w == u + (v + w)
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u + spec.zero() == u
    assert u * spec.one() == u
    assert u - u == 0
    if not u.is_zero():
        assert u * u.inverse() == 1
        assert (v / u) * u == v
        assert u.inverse().inverse() == u


@settings(max_examples=200)
@given(st.sampled_from([5, 6, 12]).flatmap(lambda n: nonzero_elements(SPECS[n])))
def test_norm_is_multiplicative_and_nonzero(u):
    assert u.conjugates_product() != 0
    assert (u * u).conjugates_product() == u.conjugates_product() ** 2


@settings(max_examples=200)
@given(st.sampled_from([5, 6, 12]).flatmap(lambda n: st.tuples(elements(SPECS[n]), elements(SPECS[n]))))
def test_galois_is_ring_homomorphism(pair):
    u, v = pair
    n = u.spec.conductor
    k = n - 1
    assert (u * v).galois(k) == u.galois(k) * v.galois(k)
    assert (u + v).galois(k) == u.galois(k) + v.galois(k)


@settings(max_examples=300)
@given(st.sampled_from([3, 6, 12]).flatmap(lambda n: elements(SPECS[n])))
def test_format_parse_roundtrip(u):
    assert parse_element(format_element(u), u.spec) == u


def test_format_examples():
    a = K6.gen()
    assert format_element(1 - a) == "-a + 1"
    assert format_element(K6(0)) == "0"
    assert format_element(K6(Fraction(-3379, 225))) == "-3379/225"
    assert format_element((1 - a) / 15) == "-1/15*a + 1/15"


@pytest.mark.parametrize("text,expected", [
    ("a^2", "a - 1"),
    ("a**5", "-a + 1"),
    ("2a + 3", "2*a + 3"),
    ("(1 + a)(1 - a)", "-a + 2"),
    ("1/(1 - a)", "a"),
    ("−1", "-1"),
    ("-3379/225", "-3379/225"),
])
def test_parse_examples(text, expected):
    assert format_element(parse_element(text, K6)) == expected


@pytest.mark.parametrize("text,pos", [("1 + ", 4), ("a +* 2", 3), ("(1 + a", 6), ("b", 0), ("1/0", None)])
def test_parse_errors(text, pos):
    with pytest.raises((ParseError, ZeroDivisionError)) as info:
        parse_element(text, K6)
    if pos is not None and isinstance(info.value, ParseError):
        assert info.value.position == pos


def test_parse_exponent_limit():
    with pytest.raises(ParseError):
        parse_element("a^100000000", K6)


def test_zero_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        K6.zero().inverse()


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        K6.gen() + SPECS[5].gen()
    with pytest.raises(FieldMismatchError):
        K6(SPECS[5].gen())


def test_power_of_generator_wraps():
    for n in (1, 2, 5, 6):
        spec = cyclotomic_spec(n)
        for k in range(-2 * n, 2 * n):
            assert power_of_generator(spec, k) == spec.gen() ** k


def test_mul_integral_agrees():
    spec = SPECS[12]
    u, v = (1, -2, 0, 3), (4, 0, -1, 2)
    expected = FieldElement(spec, u) * FieldElement(spec, v)
    assert FieldElement(spec, mul_integral(spec, u, v)) == expected


def test_spec_json_roundtrip():
    assert FieldSpec.from_json(K6.to_json()) == K6


def test_equality_with_plain_numbers():
    assert K6(Fraction(1, 2)) == Fraction(1, 2)
    assert K6(3) == 3
    assert K6.gen() != 1
    assert hash(K6(3)) == hash(K6(3))
