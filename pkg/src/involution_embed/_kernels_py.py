"""Pure-Python integer kernels.  Reference semantics for the compiled module."""

from math import isqrt


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi needs odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def trial_factor(n: int, bound: int):
    """Strip prime factors <= bound from |n| >= 1.  Returns (factors, cofactor)."""
    n = abs(n)
    factors = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    p, step = 5, 2
    while p <= bound and p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        p += step
        step = 6 - step
    return factors, n


def primes_below(n: int) -> list:
    if n < 3:
        return []
    sieve = bytearray([1]) * n
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n - 1) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, n, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def scan_legendre_pattern(values, signs, start: int, limit: int, avoid):
    """First odd prime p > start (p < limit, p not in avoid, p coprime to values)
    with jacobi(values[i], p) == signs[i] for every nonzero sign.  -1 if none."""
    lo = max(start + 1, 3)
    for p in primes_below(limit):
        if p < lo or p in avoid:
            continue
        ok = True
        for c, s in zip(values, signs):
            j = jacobi(c, p)
            if j == 0 or (s and j != s):
                ok = False
                break
        if ok:
            return p
    return -1
