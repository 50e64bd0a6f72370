from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, strategies as st

from involution_embed import arith, kernels
from involution_embed import _kernels_py as pure
from involution_embed.errors import BoundExceededError, DomainError

from oracles import naive_vp


def _trial(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@given(st.integers(2, 10 ** 6))
def test_factor_matches_trial_division(n):
    assert arith.factor(n) == _trial(n)


def test_factor_bound_reported():
    big = 1000000007 * 998244353
    with pytest.raises(BoundExceededError):
        arith.factor(big, bound=10)
    assert arith.factor(big) == {998244353: 1, 1000000007: 1}


@given(st.integers(2, 2 ** 40), st.integers(2, 2 ** 40), st.integers(1, 2 ** 20))
def test_factor_large_products(a, b, c):
    n = a * b * c
    f = arith.factor(n)
    assert all(arith.is_prime(p) for p in f)
    assert n == prod(p ** e for p, e in f.items())


@given(st.integers(-10 ** 6, 10 ** 6).filter(bool), st.sampled_from([3, 5, 7, 11, 13, 101, 1009]))
def test_legendre_is_euler_criterion(a, p):
    if a % p == 0:
        assert arith.legendre(a, p) == 0
    else:
        e = pow(a % p, (p - 1) // 2, p)
        assert arith.legendre(a, p) == (1 if e == 1 else -1)


@given(st.integers(1, 10 ** 5), st.integers(1, 10 ** 5), st.sampled_from([2, 3, 5, 7]))
def test_vp_matches_naive(n, d, p):
    assert arith.vp(Fraction(n, d), p) == naive_vp(Fraction(n, d), p)


@given(st.integers(-5000, 5000).filter(bool))
def test_squarefree_part(n):
    s = arith.squarefree_part(n)
    assert arith.is_squarefree(abs(s))
    assert arith.is_rational_square(Fraction(n, s))


def test_primes_from_excludes_endpoints():
    assert list(arith.primes_from(2, 13)) == [3, 5, 7, 11]
    assert list(arith.primes_from(1, 12)) == [2, 3, 5, 7, 11]


@given(st.integers(1, 500), st.sampled_from([3, 5, 7, 13]), st.integers(1, 4))
def test_sqrt_mod_prime_power(r, p, k):
    if r % p == 0:
        return
    a = r * r % p ** k
    x = arith.sqrt_mod_prime_power(a, p, k)
    assert (x * x - a) % p ** k == 0


def test_zero_rejected():
    with pytest.raises(DomainError):
        arith.nonzero(0)


compiled = pytest.mark.skipif(kernels._c is None, reason="compiled kernels not built")


@compiled
@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6))
def test_compiled_jacobi_matches_pure(a, n):
    n = 2 * n + 1
    assert kernels._c.jacobi(a, n) == pure.jacobi(a, n)


@compiled
@given(st.integers(2, 10 ** 9), st.integers(2, 3000))
def test_compiled_trial_factor_matches_pure(n, bound):
    assert tuple(map(tuple, kernels._c.trial_factor(n, bound)[0])) == tuple(map(tuple, pure.trial_factor(n, bound)[0]))
    assert kernels._c.trial_factor(n, bound)[1] == pure.trial_factor(n, bound)[1]


@compiled
def test_compiled_sieve_and_scan_match_pure():
    assert kernels._c.primes_below(20000) == pure.primes_below(20000)
    for vals, signs in [([13, 17], [-1, -1]), ([5], [1]), ([2, 3, 7], [-1, 1, 0])]:
        assert (kernels._c.scan_legendre_pattern(vals, signs, 2, 5000, frozenset({3}))
                == pure.scan_legendre_pattern(vals, signs, 2, 5000, frozenset({3})))


def test_wrapper_matches_pure_on_big_arguments():
    big = 2 ** 70 + 1
    assert kernels.jacobi(7, big) == pure.jacobi(7, big)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")
