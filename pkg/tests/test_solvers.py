from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from involution_embed.arith import legendre, prime_support
from involution_embed.errors import InfeasibleError, PreconditionError
from involution_embed.localext import decompose, ext_hilbert_symbol
from involution_embed.numfield import FieldFactor
from involution_embed.places import INF, Place, hilbert_symbol, is_local_square
from involution_embed.solvers import (diamond_condition, find_checkpoint_place, lemma_hs, lemma_hs1,
                                      prescribe_symbols)

from oracles import hilbert_by_norms, naive_is_square

P = Place
QQ = FieldFactor.rational()


def _places_of(*xs):
    out = {INF, P(2)}
    for x in xs:
        out |= {P(p) for p in prime_support(x)}
    return sorted(out)


# --- prescribe_symbols / lemma_hs ----------------------------------------------------------

def test_prescribe_examples():
    x = prescribe_symbols(17, {3: -1, 23: -1})
    assert hilbert_by_norms(17, x, 3) == hilbert_by_norms(17, x, 23) == -1
    for v in _places_of(17, x):
        if v not in (P(3), P(23)):
            assert hilbert_symbol(17, x, v) == 1
    assert prescribe_symbols(-1, {P(2): -1, INF: -1}) == -1
    assert prescribe_symbols(1, {}) == 1


def test_lemma_hs_examples():
    s = lemma_hs(1, {}, {INF: 5})
    assert s > 0
    s = lemma_hs(17, {3: -1, 23: -1}, {INF: 1})
    assert s > 0 and hilbert_symbol(s, 17, P(3)) == hilbert_symbol(s, 17, P(23)) == -1
    assert lemma_hs(-1, {P(2): -1, INF: -1}, {}) == -1


@pytest.mark.parametrize("a,targets,reason", [
    (17, {3: -1}, "product-formula"),
    (13, {3: -1, 5: -1}, "local-square"),
])
def test_prescribe_infeasible(a, targets, reason):
    with pytest.raises(InfeasibleError) as exc:
        prescribe_symbols(a, targets)
    assert exc.value.constraint == reason


@given(st.sampled_from([-1, 2, 3, 5, -6, 7, 13, 17, -15, 21]), st.data())
def test_lemma_hs_property(t, data):
    cand = [v for v in [INF, P(2), P(3), P(5), P(7), P(11), P(13)] if not is_local_square(t, v)]
    chosen = data.draw(st.lists(st.sampled_from(cand), unique=True, max_size=4))
    signs = [data.draw(st.sampled_from([1, -1])) for _ in chosen]
    if chosen and len([s for s in signs if s == -1]) % 2:
        signs[0] = -signs[0]
    targets = dict(zip(chosen, signs))
    rest = [v for v in [P(19), P(29), P(3), INF] if v not in targets]
    pins = {v: data.draw(st.sampled_from([1, -1, 2, 3, 5, 19, 29])) for v in rest[:data.draw(st.integers(0, 2))]}
    prod = 1
    for v in set(targets) | set(pins):
        prod *= hilbert_symbol(pins[v], t, v) if v in pins else targets[v]
    if prod != 1:
        with pytest.raises(InfeasibleError):
            lemma_hs(t, targets, pins)
        return
    s = lemma_hs(t, targets, pins)
    for v in _places_of(t, s, *pins.values()):
        want = hilbert_symbol(pins[v], t, v) if v in pins else targets.get(v, 1)
        p = None if v.is_infinite else v.p
        assert hilbert_by_norms(s, t, p) == want
        if v in pins:
            assert naive_is_square(Fraction(s) / pins[v], p)


# --- lemma_hs1 ------------------------------------------------------------------------------

def test_lemma_hs1_single_factor_reduces_to_lemma_hs():
    v0 = find_checkpoint_place([QQ], [(17,)], avoid={P(3), INF})
    s = lemma_hs1([QQ], [(17,)], {P(3): (2,), INF: (1,)}, v0)[0][0]
    assert is_local_square(s / 2, P(3)) and s > 0
    for v in _places_of(17, s):
        if v not in (P(3), INF, v0):
            assert hilbert_symbol(s, 17, v) == 1


def test_lemma_hs1_squares_give_one():
    F = [QQ, FieldFactor.quadratic(13)]
    s = lemma_hs1(F, [(4,), (9, 0)], {}, P(3))
    assert s == ((Fraction(1),), (Fraction(1), Fraction(0)))


def test_lemma_hs1_checkpoint_hypothesis():
    F = [QQ, FieldFactor.quadratic(13)]
    with pytest.raises(PreconditionError):
        lemma_hs1(F, [(13,), (17, 0)], {}, P(3))     # 13 is a square at 3


@given(st.sampled_from([2, 5, 13, -1, 3]), st.sampled_from([-1, 3, 7, 17, 6]),
       st.sampled_from([1, -1, 2, 3, 5]), st.sampled_from([(1, 0), (0, 1), (2, 1), (-1, 0)]))
def test_lemma_hs1_property(m, t1, pin_q, pin_f):
    F = [QQ, FieldFactor.quadratic(m)]
    t = [(t1,), (t1, 0)]
    pins = {P(3): ((pin_q,), pin_f), INF: ((1,), (1, 0))}
    try:
        v0 = find_checkpoint_place(F, t, avoid=set(pins))
    except InfeasibleError:
        assume(False)
    s = lemma_hs1(F, t, pins, v0)
    for j, Fj in enumerate(F):
        for v in _places_of(t1, Fj.norm(s[j]), pin_q, F[1].norm(F[1].elt(pin_f)), m):
            if v in pins or v == v0:
                continue
            for w in decompose(Fj, v, j):
                assert ext_hilbert_symbol(Fj, s[j], Fj.elt(t[j]), w) == 1


# --- checkpoints --------------------------------------------------------------------------

def test_checkpoint_examples():
    assert find_checkpoint_place([QQ], [(13,)], avoid={3, 23}) == P(5)
    assert find_checkpoint_place([QQ], [(4,)], avoid={3}) == P(5)
    assert find_checkpoint_place([QQ], [(4,)]) == P(3)


def test_checkpoint_two_factor_example_is_infeasible():
    # 13 must stay nonsquare on Q while 13 splits the second factor Q(sqrt 13): impossible
    F = [QQ, FieldFactor.quadratic(13)]
    assert diamond_condition(F, [(13,), (17, 0)]) == "fails"
    with pytest.raises(InfeasibleError):
        find_checkpoint_place(F, [(13,), (17, 0)])


def test_checkpoint_joint_search():
    F = [QQ, FieldFactor.quadratic(5)]
    v0 = find_checkpoint_place(F, [(13,), (17, 0)])
    # 17 stays a nonsquare in Q(sqrt 5) (x) Q_v0 only if v0 does not make that algebra inert
    assert legendre(13, v0.p) == -1 and legendre(17, v0.p) == -1 and legendre(5, v0.p) != -1


@given(st.lists(st.sampled_from([-1, 2, 3, 5, 6, 7, 10, 11, 13, 17, -3]), min_size=1, max_size=3),
       st.sampled_from([None, -1, 5, 13]))
def test_diamond_decision_agrees_with_search(ts, zd):
    F = [QQ] * len(ts)
    t = [(x,) for x in ts]
    verdict = diamond_condition(F, t, zd)
    assert verdict in ("holds", "fails")
    if verdict == "holds":
        v0 = find_checkpoint_place(F, t, Z_is_field=zd is not None, Z_disc=zd, avoid={3, 5, 7})
        assert v0.p not in (3, 5, 7)
        assert not any(naive_is_square(x, v0.p) for x in ts)
        if zd is not None:
            assert not naive_is_square(zd, v0.p)
    else:
        # only primes dividing the data can still qualify; avoiding them leaves nothing
        support = set(prime_support(*ts, zd or 1))
        try:
            v0 = find_checkpoint_place(F, t, Z_is_field=zd is not None, Z_disc=zd)
            assert v0.p in support
            assert not any(naive_is_square(x, v0.p) for x in ts)
        except InfeasibleError:
            pass
        with pytest.raises(InfeasibleError):
            find_checkpoint_place(F, t, Z_is_field=zd is not None, Z_disc=zd, avoid=support)
