import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from involution_embed.errors import DomainError, InfeasibleError, PreconditionError, VerificationError
from involution_embed.places import INF, Place, hilbert_symbol, is_local_square
from involution_embed.quadform import local_witt_index
from involution_embed.quaternion import (CliffordShift, DeltaVector, QuaternionAlgebra, SkewHermitianForm,
                                         ZDescriptor, bad_set, bad_set_V, check_sharp, check_star, clifford_center,
                                         clifford_shift, delta_classes, delta_difference, disc_involution,
                                         nonsplit_global_a, pure, quaternion_from_ramset, ram_set,
                                         sharp_failures, split_place_form)

from instances import nonsplit_instance
from oracles import hilbert_by_norms
from strategies import nonzero_rationals

P = Place
SQF = [-1, 2, -2, 3, -3, 5, -5, 6, 7, -7, 10, 11, -11, 13, 17, 23]
Q1 = [{"kind": "Q"}]


# --- ramification -----------------------------------------------------------------------------

def test_ram_set_examples():
    assert ram_set(-1, -1) == [P(2), INF]
    assert ram_set(1, 7) == [] and ram_set(5, -5) == []
    assert QuaternionAlgebra(-1, 69).ram == [P(3), P(23)]


@given(nonzero_rationals(300, 30), nonzero_rationals(300, 30))
def test_ram_set_has_even_size(a, b):
    assert len(ram_set(a, b)) % 2 == 0


@given(st.sampled_from(SQF), st.sampled_from(SQF), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_ramification_matches_norm_oracle(a, b, p):
    assert QuaternionAlgebra(a, b).ramified_at(P(p)) == (hilbert_by_norms(a, b, p) == -1)


def test_quaternion_from_ramset():
    D = quaternion_from_ramset({"3", "23"})
    assert D.ram == [P(3), P(23)] and not D.ramified_at(INF)
    assert quaternion_from_ramset([]).is_split
    with pytest.raises(InfeasibleError) as exc:
        quaternion_from_ramset(["3"])
    assert exc.value.constraint == "brauer-parity"


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, "inf"]), min_size=1, max_size=4, unique=True))
def test_from_ramset_round_trip(R):
    if len(R) % 2:
        R = R[:-1]
    D = quaternion_from_ramset(R)
    assert D.ram == sorted(Place.parse(v) for v in R)
    assert quaternion_from_ramset(D.ram).ram == D.ram


quats = st.tuples(*(st.integers(-5, 5) for _ in range(4))).map(lambda t: tuple(Fraction(c) for c in t))


@given(st.sampled_from(SQF), st.sampled_from(SQF), quats, quats, quats)
def test_algebra_axioms(a, b, x, y, z):
    D = QuaternionAlgebra(a, b)
    assert D.mul(D.mul(x, y), z) == D.mul(x, D.mul(y, z))
    assert D.nrd(D.mul(x, y)) == D.nrd(x) * D.nrd(y)
    i, j = pure(1, 0, 0), pure(0, 1, 0)
    assert D.mul(i, i)[0] == a and D.mul(j, j)[0] == b
    assert D.mul(i, j) == pure(0, 0, 1) and D.mul(j, i) == pure(0, 0, -1)


# --- discriminants and the bad set ------------------------------------------------------------

def test_disc_examples():
    H = QuaternionAlgebra(-1, -1)
    assert disc_involution(SkewHermitianForm(H, ((1, 0, 0),))) == -1
    h2 = SkewHermitianForm(H, ((1, 0, 0), (0, 1, 0)))
    assert disc_involution(h2) == 1 and clifford_center(h2).is_split
    with pytest.raises(DomainError):
        SkewHermitianForm(H, ((0, 0, 0),))
    with pytest.raises(DomainError):
        SkewHermitianForm(H, ((1, 1, 0, 0),))


@given(st.sampled_from(SQF), st.sampled_from(SQF),
       st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3),
       nonzero_rationals(20, 5), st.randoms())
def test_disc_is_invariant_under_scaling_and_permutation(a, b, diag, lam, rnd):
    D = QuaternionAlgebra(a, b)
    try:
        h = SkewHermitianForm(D, tuple(diag))
    except DomainError:
        return
    scaled = [tuple(lam * c for c in q) for q in diag]
    scaled[0], scaled[-1] = scaled[-1], scaled[0]
    rnd.shuffle(scaled)
    assert disc_involution(SkewHermitianForm(D, tuple(scaled))) == disc_involution(h)


def test_bad_set_examples():
    D0 = quaternion_from_ramset([3, 23])
    assert bad_set(D0, ZDescriptor(13)) == [P(3), P(23)]
    assert bad_set(D0, ZDescriptor(1)) == D0.ram
    assert bad_set(D0, ZDescriptor(5)) == []          # 5 is a nonsquare at 3 and 23
    h = SkewHermitianForm(QuaternionAlgebra(1, 3), ((1, 0, 0),))
    assert bad_set_V(h) == []


# --- explicit splitting --------------------------------------------------------------------------

@given(st.sampled_from(SQF), st.sampled_from(SQF),
       st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2)), min_size=1, max_size=3),
       st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_disc_convention_matches_split_forms(a, b, diag, p):
    D = QuaternionAlgebra(a, b)
    try:
        h = SkewHermitianForm(D, tuple(diag))
    except DomainError:
        return
    v = P(p)
    if D.ramified_at(v):
        with pytest.raises(DomainError):
            split_place_form(h, v)
        return
    s = split_place_form(h, v)
    assert s.form.rank == 2 * h.m
    # the signed discriminant of the rank-2m form is the discriminant of the involution
    assert is_local_square(s.form.disc() * disc_involution(h), v)
    assert s.hasse_by_symbols == s.form.hasse(v)


@pytest.mark.parametrize("a,b,q,p", [(-1, -1, (1, 0, 0), 3), (-1, -1, (1, 2, 1), 5), (2, 5, (0, 1, 1), 7),
                                     (-3, 13, (1, 1, 0), 2)])
def test_split_form_of_q_minus_q_is_hyperbolic(a, b, q, p):
    D = QuaternionAlgebra(a, b)
    h = SkewHermitianForm(D, (q, tuple(-c for c in q)))
    assert local_witt_index(split_place_form(h, P(p)).form, P(p)) >= h.m


# --- Clifford shifts and delta vectors ------------------------------------------------------------

def test_clifford_shift_examples():
    sh = clifford_shift(Q1, [1], [13], ZDescriptor(1), [3, 5])
    assert sh.support() == []
    # (5, 13)_5 = -1 and Z split at 5
    assert clifford_shift(Q1, [5], [13], ZDescriptor(1)).bit(P(5)) == 1
    assert clifford_shift(Q1, [5], [13], ZDescriptor(1)).component(P(5)) == (1, 1)
    # 13 is a square at 3, so no a moves the class there
    assert all(clifford_shift(Q1, [a], [13], ZDescriptor(1), [3]).bit(P(3)) == 0 for a in (2, 3, 6, -1))
    # Z a field at 5: the restriction kills everything
    sh = clifford_shift(Q1, [5], [13], ZDescriptor(2))
    assert sh.bit(P(5)) == 0 and sh.component(P(5)) == (0,)


F_CHOICES = [(Q1, [13]), ([{"kind": "quad", "m": 5}], [(2, 1)]), ([{"kind": "Q"}, {"kind": "quad", "m": -1}], [3, (1, 1)])]


def _elt(F, rng):
    return [rng.choice([1, -1, 2, 3, 5, 7, 13]) if f["kind"] == "Q" else (rng.randint(-4, 4) or 1, rng.randint(-3, 3))
            for f in F]


@given(st.sampled_from(F_CHOICES), st.sampled_from([1, 2, 13, -3]), st.integers(0, 10 ** 6))
def test_clifford_shift_is_bilinear(Fd, z, seed):
    F, d = Fd
    rng = random.Random(seed)
    Z = ZDescriptor(z)
    a1, a2 = _elt(F, rng), _elt(F, rng)
    from involution_embed.etale import EtaleInvolutionAlgebra
    A = EtaleInvolutionAlgebra(F, d)
    x, y = A.f_elt(a1), A.f_elt(a2)
    if not (A.f_invertible(x) and A.f_invertible(y)):
        return
    s1, s2 = clifford_shift(F, x, d, Z), clifford_shift(F, y, d, Z)
    places = set(s1.support()) | set(s2.support())
    s12 = clifford_shift(F, A.f_mul(x, y), d, Z, places)
    both = s1 ^ s2
    for v in places | set(s12.support()):
        assert s12.bit(v) == both.bit(v)


def test_delta_vector_quotient():
    V = (P(3), P(23))
    assert DeltaVector.all_ones(V).is_zero()
    x = DeltaVector(V, (1, 0))
    assert not x.is_zero() and x == DeltaVector(V, (0, 1)) and x + DeltaVector.all_ones(V) == x
    assert len(delta_classes(V)) == 2 and len(delta_classes([2, 3, 5])) == 4 and len(delta_classes([])) == 1
    with pytest.raises(DomainError):
        x + DeltaVector((P(3),), (1,))


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17]), min_size=1, max_size=4, unique=True),
       st.data())
def test_delta_vectors_respect_the_all_ones_quotient(V, data):
    V = tuple(sorted(P(p) for p in V))
    bits = tuple(data.draw(st.lists(st.integers(0, 1), min_size=len(V), max_size=len(V))))
    x = DeltaVector(V, bits)
    ones = DeltaVector.all_ones(V)
    assert x + ones == x and (x + ones).normalized() == x.normalized()
    assert x.is_zero() == (len(set(bits)) <= 1)


@given(st.integers(0, 10 ** 6))
def test_shift_off_v_leaves_the_class(seed):
    rng = random.Random(seed)
    V = [P(3), P(23)]
    Z = ZDescriptor(13)
    base = clifford_shift(Q1, [rng.choice([1, 5, 7, 10])], [5], Z, V)
    off = CliffordShift(tuple((P(p), rng.randint(0, 1)) for p in (5, 7, 11, 17)), ())
    assert delta_difference(base ^ off, V) == delta_difference(base, V)


# --- conditions (*) and (#) -------------------------------------------------------------------

def test_check_star_and_sharp():
    v0 = check_star(Q1, [13], ZDescriptor(1), avoid=[3, 5, 7])
    assert v0 not in (P(3), P(5), P(7)) and not is_local_square(13, v0)
    D = QuaternionAlgebra(-1, -1)
    assert not check_sharp(Q1, [4], D, ZDescriptor(1))
    assert sharp_failures(Q1, [4], D, ZDescriptor(1)) == [P(2), INF]
    assert check_sharp(Q1, [-1], D, ZDescriptor(1))
    # Z a field at every ramified place: nothing to check
    assert check_sharp(Q1, [1], D, ZDescriptor(-1))
    # d a square on V exactly: the special case
    D0 = quaternion_from_ramset([3, 23])
    assert not check_sharp(Q1, [13], D0, ZDescriptor(13))


@given(st.sampled_from(SQF), st.sampled_from([1, 2, 13, -3, 5]), st.lists(st.sampled_from([2, 3, 5, 7]), max_size=3))
def test_star_is_automatic_for_q(d, z, avoid):
    v0 = check_star(Q1, [d], ZDescriptor(z), avoid=avoid)
    assert v0 not in {P(p) for p in avoid}
    if d != 1:
        assert not is_local_square(d, v0)
    if z != 1:
        assert not is_local_square(z, v0)


# --- the nonsplit construction ----------------------------------------------------------------

def test_nonsplit_trivial_pins():
    D = QuaternionAlgebra(-1, -1)
    a, cert = nonsplit_global_a(D, 1, Q1, [-1], {"2": [1], "inf": [1]})
    assert a == ((Fraction(1),),)
    assert cert.to_json()["checks"]["cor_trivial_off_S"]


def test_nonsplit_twist_place():
    D = QuaternionAlgebra(-1, -1)
    a, cert = nonsplit_global_a(D, 1, Q1, [-1], {"2": [1], "inf": [1]}, ["2"])
    assert P(2) in cert.corrections and hilbert_symbol(cert.corrections[P(2)][0][0], -1, P(2)) == -1
    assert cert.verify()["delta_difference"]["class"] == [0, 0]


def test_nonsplit_preconditions():
    D = QuaternionAlgebra(-1, -1)
    with pytest.raises(PreconditionError, match="#"):
        nonsplit_global_a(D, 1, Q1, [3], {"2": [1], "inf": [1]})
    with pytest.raises(PreconditionError, match="missing"):
        nonsplit_global_a(D, 1, Q1, [-1], {"2": [1]})
    with pytest.raises(DomainError):
        nonsplit_global_a(D, 2, Q1, [-1], {"2": [1], "inf": [1]})


@pytest.mark.parametrize("seed", range(12))
def test_nonsplit_odd_degree_field_instances(seed):
    D, m, F, d, pins, Z = nonsplit_instance(seed, field_only=True)
    assert m == 1 and check_sharp(F, d, D, Z)
    a, cert = nonsplit_global_a(D, m, F, d, pins, (), Z)
    assert cert.verify()["pinned_classes"]


@pytest.mark.parametrize("seed", range(20))
def test_nonsplit_odd_rank_products(seed):
    """Odd m: (#) follows from local embeddability; (*) can fail when F is not a field,
    and then the failure must be genuine."""
    D, m, F, d, pins, Z = nonsplit_instance(seed)
    assert m % 2 == 1 and check_sharp(F, d, D, Z)
    try:
        a, cert = nonsplit_global_a(D, m, F, d, pins, (), Z)
    except PreconditionError as exc:
        assert "(*)" in str(exc) and len(F) > 1
        with pytest.raises(InfeasibleError):
            check_star(F, d, Z, avoid=sorted(Place.parse(v) for v in pins))
        return
    cert.verify()


def test_tampered_certificate_is_rejected():
    D, m, F, d, pins, Z = nonsplit_instance(3)
    a, cert = nonsplit_global_a(D, m, F, d, pins, (), Z)
    cert.a = ((-7 * cert.a[0][0],),) + tuple(cert.a[1:])
    with pytest.raises(VerificationError):
        cert.verify()
