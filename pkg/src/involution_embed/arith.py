"""Exact integer/rational helpers: factorization, valuations, square-free parts,
primality and p-adic square roots."""

from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Dict, Iterator, Tuple, Union

from . import kernels
from .config import DEFAULT
from .errors import BoundExceededError, DomainError

Rational = Union[int, Fraction]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


def to_fraction(x) -> Fraction:
    """Accept int, Fraction or a string "p/q"; reject floats (inexact)."""
    if isinstance(x, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {x!r}") from exc
    raise DomainError(f"expected an exact rational, got {type(x).__name__}")


def nonzero(x) -> Fraction:
    q = to_fraction(x)
    if q == 0:
        raise DomainError("argument must be nonzero")
    return q


def fmt(q: Rational) -> str:
    """Canonical "p/q" string (lowest terms, "p" when q == 1)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24 with these bases)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise DomainError(f"primality of {n} beyond the deterministic range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_TRIAL_LIMIT = 1 << 16


def _rho(n: int, budget: int):
    """A nontrivial factor of the odd composite n by Brent's variant of Pollard rho,
    or None after ``budget`` steps."""
    steps = 0
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        f = lambda x: (x * x + c) % n
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += 128
            r *= 2
            steps += r
            if steps > budget:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


@lru_cache(maxsize=8192)
def _factor_int(n: int, bound: int) -> Tuple[Tuple[int, int], ...]:
    """Trial division by small primes, then Pollard rho with ``bound`` steps per split."""
    factors, rest = kernels.trial_factor(n, min(bound, _TRIAL_LIMIT))
    counts = dict(factors)
    stack = [rest] if rest > 1 else []
    while stack:
        m = stack.pop()
        small = m < _MR_LIMIT
        if small and is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = _rho(m, bound)
        if r is None and not small:
            raise BoundExceededError(f"could not split {m} (a factor of {n}) nor certify it prime", bound)
        if r is None:
            raise BoundExceededError(f"could not split the composite {m} (a factor of {n})", bound)
        stack += [r, m // r]
    return tuple(sorted(counts.items()))


def factor(n: int, bound: int = DEFAULT.factor_bound) -> Dict[int, int]:
    """Prime factorization of a nonzero integer (sign dropped)."""
    if n == 0:
        raise DomainError("cannot factor zero")
    return dict(_factor_int(abs(n), bound))


def prime_support(*xs: Rational) -> set:
    """Primes dividing a numerator or denominator of any argument."""
    out = set()
    for x in xs:
        q = Fraction(x)
        if q == 0:
            continue
        out.update(factor(q.numerator))
        out.update(factor(q.denominator))
    return out


def vp(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    q = Fraction(x)
    if q == 0:
        raise DomainError("valuation of zero")
    v = 0
    n, d = q.numerator, q.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def unit_part(x: Rational, p: int) -> Fraction:
    q = Fraction(x)
    return q / Fraction(p) ** vp(q, p)


def unit_mod(x: Rational, p: int, k: int) -> int:
    """Residue mod p**k of a p-adic unit given as a rational."""
    q = Fraction(x)
    mod = p**k
    if q.numerator % p == 0 or q.denominator % p == 0:
        raise DomainError(f"{q} is not a {p}-adic unit")
    return q.numerator * pow(q.denominator, -1, mod) % mod


def squarefree_part(x: Rational) -> int:
    """Signed square-free integer in the square class of x."""
    q = nonzero(x)
    sign = -1 if q < 0 else 1
    n = abs(q.numerator) * q.denominator  # same class as n/d
    fac = factor(n)
    return sign * prod(p for p, e in fac.items() if e % 2)


def is_rational_square(x: Rational) -> bool:
    q = Fraction(x)
    if q < 0:
        return False
    if q == 0:
        return True
    return _is_square_int(q.numerator) and _is_square_int(q.denominator)


def _is_square_int(n: int) -> bool:
    from math import isqrt
    return n >= 0 and isqrt(n) ** 2 == n


def rational_sqrt(x: Rational) -> Fraction:
    from math import isqrt
    q = Fraction(x)
    if not is_rational_square(q):
        raise DomainError(f"{q} is not a rational square")
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factor(n).values())


def legendre(a: Rational, p: int) -> int:
    """Legendre symbol of a p-adic unit rational (odd prime p)."""
    q = Fraction(a)
    return kernels.jacobi(q.numerator, p) * kernels.jacobi(q.denominator, p)


def primes_from(start: int, limit: int = None) -> Iterator[int]:
    """Primes > start in increasing order, sieved in windows."""
    lo = start + 1
    window = 4096
    while limit is None or lo < limit:
        hi = lo + window if limit is None else min(lo + window, limit)
        for p in _primes_in(lo, hi):
            yield p
        lo = hi
        window = min(window * 2, 1 << 20)


def _primes_in(lo: int, hi: int):
    from math import isqrt
    if hi <= 2:
        return []
    lo = max(lo, 2)
    small = kernels.primes_below(isqrt(hi) + 2)
    mark = bytearray([1]) * (hi - lo)
    for p in small:
        first = max(p * p, (lo + p - 1) // p * p)
        if first >= hi:
            continue
        mark[first - lo::p] = bytearray(len(range(first, hi, p)))
    return [lo + i for i, f in enumerate(mark) if f]


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int:
    """Some s with s*s == a mod p**k, for a a unit square mod p**k (p odd) or
    a == 1 mod 8 (p == 2, k >= 3).  Hensel lifting from a root mod p (resp. 8)."""
    mod = p**k
    a %= mod
    if p == 2:
        if a % 8 != 1:
            raise DomainError("2-adic unit square roots need a == 1 mod 8")
        s = 1
        for j in range(3, k):
            # s*s == a mod 2**j; fix modulo 2**(j+1)
            if (s * s - a) % (1 << (j + 1)):
                s += 1 << (j - 1)
        assert (s * s - a) % mod == 0
        return s % mod
    r = _tonelli(a % p, p)
    s = r
    for j in range(1, k):
        pj1 = p ** (j + 1)
        # s <- s - (s^2 - a)/(2s)
        s = (s - (s * s - a) * pow(2 * s, -1, pj1)) % pj1
    assert (s * s - a) % mod == 0
    return s


def _tonelli(a: int, p: int) -> int:
    if a == 0:
        raise DomainError("zero has no unit square root")
    if kernels.jacobi(a, p) != 1:
        raise DomainError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while kernels.jacobi(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def crt_lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out
