from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from involution_embed.errors import DomainError
from involution_embed.places import (INF, Place, class_vector, hilbert_symbol, is_local_square,
                                     local_rep, product_formula_places, square_class_reps)

from oracles import hilbert_by_norms, naive_is_square
from strategies import nonzero_rationals

P = Place


@pytest.mark.parametrize("a,b,v,expected", [
    (13, 17, P(17), 1),
    (-1, -1, INF, -1),
    (-1, -1, P(2), -1),
])
def test_hilbert_examples(a, b, v, expected):
    assert hilbert_symbol(a, b, v) == expected


@pytest.mark.parametrize("a,v,expected", [(13, P(3), True), (17, P(3), False), (4, P(7), True)])
def test_local_square_examples(a, v, expected):
    assert is_local_square(a, v) is expected


def test_zero_argument_rejected():
    with pytest.raises(DomainError):
        hilbert_symbol(0, 3, P(3))


@given(nonzero_rationals(80, 9), nonzero_rationals(80, 9), st.sampled_from([2, 3, 5, 7, 11]))
def test_hilbert_matches_norm_criterion(a, b, p):
    assert hilbert_symbol(a, b, P(p)) == hilbert_by_norms(a, b, p)


@given(nonzero_rationals(10 ** 4, 10 ** 4), st.sampled_from([2, 3, 5, 7, 13, 101]))
def test_local_square_matches_residue_search(a, p):
    assert is_local_square(a, P(p)) == naive_is_square(a, p)


@given(nonzero_rationals(10 ** 4, 10 ** 4), nonzero_rationals(10 ** 4, 10 ** 4))
def test_product_formula(a, b):
    prod = 1
    for v in product_formula_places(a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


@given(nonzero_rationals(), nonzero_rationals(), nonzero_rationals(),
       st.sampled_from([INF, P(2), P(3), P(5), P(7)]))
def test_symbol_is_bimultiplicative_and_symmetric(a, b, c, v):
    assert hilbert_symbol(a, b * c, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a, c, v)
    assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
    assert hilbert_symbol(a, -a, v) == 1
    if a != 1:
        assert hilbert_symbol(a, 1 - a, v) == 1


@given(nonzero_rationals(), st.sampled_from([INF, P(2), P(3), P(5), P(7)]))
def test_class_vector_is_a_homomorphism_and_reps_are_complete(a, v):
    reps = square_class_reps(v)
    assert len({class_vector(r, v) for r in reps}) == len(reps) == 2 ** len(class_vector(1, v))
    r = local_rep(a, v)
    assert is_local_square(Fraction(a) / r, v)
    b = Fraction(3, 7)
    assert class_vector(a * b, v) == tuple(x ^ y for x, y in zip(class_vector(a, v), class_vector(b, v)))


def test_place_parsing():
    assert Place.parse("inf") == INF
    assert Place.parse("17") == P(17)
    assert P(2).is_dyadic and INF.is_infinite
    with pytest.raises((DomainError, ValueError)):
        Place.parse("15")
