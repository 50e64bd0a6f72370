# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer kernels (64-bit).  Callers fall back to _kernels_py for
arguments that do not fit a signed 64-bit word."""

from libc.stdlib cimport malloc, free


cdef inline long long _mod(long long a, long long n):
    cdef long long r = a % n
    return r + n if r < 0 else r


def jacobi(long long a, long long n):
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi needs odd positive modulus")
    cdef long long t
    cdef int result = 1
    a = _mod(a, n)
    while a:
        while a % 2 == 0:
            a //= 2
            t = n % 8
            if t == 3 or t == 5:
                result = -result
        t = a
        a = n
        n = t
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a = a % n
    return result if n == 1 else 0


def trial_factor(long long n, long long bound):
    if n < 0:
        n = -n
    factors = []
    cdef long long p
    cdef int e
    cdef long long step = 2
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    p = 5
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


def primes_below(long long n):
    if n < 3:
        return []
    cdef unsigned char *sieve = <unsigned char *> malloc(n)
    cdef long long i, j
    if sieve == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            sieve[i] = 1
        sieve[0] = 0
        sieve[1] = 0
        i = 2
        while i * i < n:
            if sieve[i]:
                j = i * i
                while j < n:
                    sieve[j] = 0
                    j += i
            i += 1
        return [i for i in range(n) if sieve[i]]
    finally:
        free(sieve)


cdef int _jac(long long a, long long n):
    cdef long long t
    cdef int result = 1
    a = _mod(a, n)
    while a:
        while a % 2 == 0:
            a //= 2
            t = n % 8
            if t == 3 or t == 5:
                result = -result
        t = a
        a = n
        n = t
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a = a % n
    return result if n == 1 else 0


def scan_legendre_pattern(values, signs, long long start, long long limit, avoid):
    cdef Py_ssize_t k = len(values)
    cdef long long *vals = <long long *> malloc(max(k, 1) * sizeof(long long))
    cdef int *sg = <int *> malloc(max(k, 1) * sizeof(int))
    cdef unsigned char *sieve
    cdef long long p, j, lo
    cdef Py_ssize_t i
    cdef int ok, jj
    if vals == NULL or sg == NULL:
        raise MemoryError()
    for i in range(k):
        vals[i] = values[i]
        sg[i] = signs[i]
    lo = start + 1 if start + 1 > 3 else 3
    sieve = <unsigned char *> malloc(limit if limit > 0 else 1)
    try:
        for p in range(limit):
            sieve[p] = 1
        p = 2
        while p * p < limit:
            if sieve[p]:
                j = p * p
                while j < limit:
                    sieve[j] = 0
                    j += p
            p += 1
        for p in range(lo, limit):
            if not sieve[p] or p in avoid:
                continue
            ok = 1
            for i in range(k):
                jj = _jac(vals[i], p)
                if jj == 0 or (sg[i] != 0 and jj != sg[i]):
                    ok = 0
                    break
            if ok:
                return p
        return -1
    finally:
        free(vals)
        free(sg)
        free(sieve)
