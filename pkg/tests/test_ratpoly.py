import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from moyal_kahler import ratpoly
from moyal_kahler.errors import DegreeError, ParseError
from moyal_kahler.ratpoly import P, PB, Q, QB, ONE, ZERO, PolyField, d, p, pb, q, qb

from conftest import polys, rationals


def test_canonical_drops_zeros():
    f = PolyField({(1, 0, 0, 0): 0, (0, 0, 0, 0): 3})
    assert f == 3
    assert f.terms == {(0, 0, 0, 0): Fraction(3)}


def test_degree_cap():
    with pytest.raises(DegreeError):
        PolyField({(13, 0, 0, 0): 1})
    assert PolyField({(13, 0, 0, 0): 1}, max_degree=20).degree() == 13
    with pytest.raises(DegreeError):
        p ** 7 * q ** 6


def test_partial_examples():
    f = p ** 2 * pb + 3 * q * qb ** 2
    assert ratpoly.partial(f, P) == 2 * p * pb
    assert ratpoly.partial(f, QB, 2) == 6 * q
    assert d(f, P, PB) == 2 * p
    assert ratpoly.partial(f, Q, 3) == ZERO
    with pytest.raises(ValueError):
        ratpoly.partial(f, 4)


def test_conj_swap_and_evaluate():
    f = p * qb ** 2 - Fraction(1, 2) * q
    assert ratpoly.conj_swap(f) == pb * q ** 2 - Fraction(1, 2) * qb
    assert ratpoly.evaluate(f, (1, 2, 3, Fraction(1, 3))) == Fraction(1, 9) - 1


def test_to_str_format():
    f = pb ** 2 * qb - Fraction(2, 3) * p * q + 5
    assert ratpoly.to_str(f) == "1 * pb^2 qb - 2/3 * p q + 5"
    assert ratpoly.to_str(ZERO) == "0"
    assert ratpoly.to_str(-ONE) == "-1"


def test_parse_errors():
    for bad in ["", "p +", "x^2", "2 ** p"]:
        with pytest.raises(ParseError):
            ratpoly.parse(bad)


def test_substitute():
    f = p * q + pb
    assert ratpoly.substitute(f, [q, p, ONE * 2, qb]) == q * p + 2


def test_random_poly_seeded():
    a = ratpoly.random_poly(random.Random(7))
    b = ratpoly.random_poly(random.Random(7))
    assert a == b and a.degree() <= 4


@given(polys(), polys(), polys())
def test_ring_laws(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == ZERO


@given(polys(), polys(), st.sampled_from(ratpoly.COORDS))
def test_leibniz(f, g, v):
    assert ratpoly.partial(f * g, v) == ratpoly.partial(f, v) * g + f * ratpoly.partial(g, v)


@given(polys(), st.sampled_from(ratpoly.COORDS), st.sampled_from(ratpoly.COORDS))
def test_partials_commute(f, u, v):
    assert d(f, u, v) == d(f, v, u)


@given(polys(4, 6))
def test_parse_round_trip(f):
    assert ratpoly.parse(ratpoly.to_str(f)) == f


@given(polys())
def test_conj_swap_involution(f):
    assert ratpoly.conj_swap(ratpoly.conj_swap(f)) == f


@given(polys(), polys(), st.tuples(*[rationals] * 4))
def test_evaluate_homomorphism(f, g, pt):
    assert ratpoly.evaluate(f * g, pt) == ratpoly.evaluate(f, pt) * ratpoly.evaluate(g, pt)
    assert ratpoly.evaluate(f + g, pt) == ratpoly.evaluate(f, pt) + ratpoly.evaluate(g, pt)


@given(polys(), polys(), st.integers(0, 3))
def test_bidifferential_antisymmetry_parity(f, g, r):
    # the contraction picks up (-1)^r under f <-> g
    assert ratpoly.bidifferential(f, g, r) == ratpoly.bidifferential(g, f, r) * (-1) ** r
