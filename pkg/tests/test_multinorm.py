from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from involution_embed.errors import DomainError, PreconditionError
from involution_embed.multinorm import (PHI_EXPRESSIONS, BiquadraticDatum, check_local_degree_hypothesis,
                                        local_product_contains, multinorm_witness, norm_form_indefinite, phi,
                                        phi_expression, two_field_search)
from involution_embed.places import INF, Place

from oracles import naive_is_square
from strategies import nonzero_rationals

B1317 = BiquadraticDatum(13, 17)
GOOD = [BiquadraticDatum(13, 17), BiquadraticDatum(17, 53), BiquadraticDatum(5, 41), BiquadraticDatum(13, 17 * 13)]


def test_hypothesis_examples():
    h = check_local_degree_hypothesis(B1317, 200)
    assert h.holds and h.structural and h.sampled > 0
    h = check_local_degree_hypothesis(BiquadraticDatum(2, 5))
    assert not h.holds and h.failing_place == Place(2)
    with pytest.raises(DomainError):
        BiquadraticDatum(-1, -1)
    with pytest.raises(DomainError):
        BiquadraticDatum(12, 5)


@given(st.sampled_from([-1, 2, 3, 5, -3, 13, 17, -7]), st.sampled_from([-1, 2, 5, 7, 13, 17, -5]))
def test_hypothesis_matches_naive_squares(a, b):
    if a == b:
        return
    B = BiquadraticDatum(a, b)
    expected = all(any(naive_is_square(g, None if v == INF else v.p) for g in (a, b, a * b))
                   for v in B.special_places())
    assert check_local_degree_hypothesis(B, 50).holds == expected


def test_phi_examples():
    assert phi(B1317, 1) == 1
    assert phi(B1317, 47) == 1          # 8^2 - 17, a norm from Q(sqrt 17)
    with pytest.raises(PreconditionError):
        phi(BiquadraticDatum(2, 5), 3)


def test_witness_for_13_17():
    w = multinorm_witness(B1317, sample_bound=300)
    assert w.s == 15 and w.phi_value == -1 and phi(B1317, w.s) == -1
    assert all(w.local_checks.values()) and INF in w.local_checks
    # s times a norm from Q(sqrt 17) is still a witness, a norm from Q(sqrt 13) is not
    assert phi(B1317, w.s * 47) == -1
    assert phi(B1317, 3 ** 2 - 13) == 1
    with pytest.raises(PreconditionError):
        multinorm_witness(BiquadraticDatum(2, 5))


@given(st.sampled_from(GOOD), nonzero_rationals(200, 30), nonzero_rationals(200, 30))
def test_phi_is_multiplicative(B, x, y):
    assert phi(B, x * y) == phi(B, x) * phi(B, y)


@given(st.sampled_from(GOOD), st.integers(1, 3), st.integers(-30, 30), st.integers(-30, 30))
def test_phi_kills_norm_groups(B, i, u, w):
    g = B.generators[i - 1]
    n = Fraction(u) ** 2 - g * Fraction(w) ** 2
    if n == 0:
        return
    assert phi(B, n) == 1


@given(st.sampled_from(GOOD), nonzero_rationals(500, 50))
def test_six_expressions_agree(B, x):
    assert len({phi_expression(B, x, i, j) for i, j in PHI_EXPRESSIONS}) == 1


@given(st.sampled_from(GOOD), nonzero_rationals(100, 10), st.sampled_from([2, 3, 5, 7, 11, 13, 17, 53, 41]))
def test_local_products_are_everything(B, x, p):
    # some K_i splits at p, so its local norm group is all of Q_p^x
    assert any(naive_is_square(g, p) for g in B.generators)
    assert local_product_contains(B, x, Place(p))


def test_local_product_is_everything_even_at_degree_4():
    # two different index-2 norm subgroups already generate Q_2^x
    B = BiquadraticDatum(2, 5)
    assert all(local_product_contains(B, x, Place(2)) for x in (1, 3, 5, 7, 2, 6, 10, 14))


def test_norm_form_indefinite():
    assert norm_form_indefinite(1, 1, 13)
    assert not norm_form_indefinite(-1, -1, 13)
    assert norm_form_indefinite(3, -2, 13) and norm_form_indefinite(-5, 7, 2)
    with pytest.raises(DomainError):
        norm_form_indefinite(1, 1, -13)


@given(nonzero_rationals(50, 10), nonzero_rationals(50, 10), st.integers(1, 50))
def test_norm_form_indefinite_matches_diagonal_signs(al, be, a):
    diag = [1, -a * al, -a * be, a * al * be]
    assert norm_form_indefinite(al, be, a) == (min(diag) < 0 < max(diag))


@pytest.mark.parametrize("a,b", [(13, 17), (-1, 2), (3, 7)])
def test_two_field_search_finds_no_candidates_on_small_fields(a, b):
    out = two_field_search(BiquadraticDatum(a, b), x_bound=30)
    assert out["locally_in_N1N2"] + out["not_local"] == 60
    assert out["decomposed"] == out["locally_in_N1N2"] and out["candidates"] == []

