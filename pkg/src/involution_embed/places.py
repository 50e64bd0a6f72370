"""Places of Q, square classes and the Hilbert symbol at every place."""

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, List, Optional, Tuple

from .arith import (Rational, is_prime, legendre, nonzero, prime_support, squarefree_part,
                    unit_mod, unit_part, vp)
from .errors import DomainError


@total_ordering
@dataclass(frozen=True)
class Place:
    """A place of Q: ``Place(p)`` for a prime p, ``Place(None)`` for the real place."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if isinstance(self.p, bool) or not isinstance(self.p, int) or not is_prime(self.p):
                raise DomainError(f"{self.p!r} is not a prime")

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def is_dyadic(self) -> bool:
        return self.p == 2

    @classmethod
    def parse(cls, s) -> "Place":
        if isinstance(s, Place):
            return s
        if isinstance(s, int):
            return cls(s)
        t = str(s).strip().lower()
        if t in ("inf", "infinity", "oo", "real", "∞"):
            return INF
        try:
            return cls(int(t))
        except ValueError as exc:
            raise DomainError(f"cannot parse place {s!r}") from exc

    def _key(self):
        return (1, 0) if self.p is None else (0, self.p)

    def __lt__(self, other):
        return self._key() < other._key()

    def __str__(self):
        return "inf" if self.p is None else str(self.p)

    def __repr__(self):
        return f"Place({self})"


INF = Place(None)


def place_set(*xs: Rational, extra: Iterable[Place] = ()) -> List[Place]:
    """Sorted places where a symbol involving the xs can be nontrivial:
    primes of the xs, 2 and the real place."""
    ps = prime_support(*xs) | {2}
    out = {Place(p) for p in ps} | {INF} | set(extra)
    return sorted(out)


@dataclass(frozen=True)
class SquareClass:
    """Element of Q^x / Q^x2 stored as sign and positive square-free part."""

    sign: int
    squarefree_part: int

    @classmethod
    def of(cls, x: Rational) -> "SquareClass":
        s = squarefree_part(x)
        return cls(-1 if s < 0 else 1, abs(s))

    @property
    def value(self) -> int:
        return self.sign * self.squarefree_part

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.of(self.value * other.value)

    def is_square(self) -> bool:
        return self.value == 1

    def __str__(self):
        return str(self.value)


def _check(a: Rational, b: Rational) -> Tuple[Fraction, Fraction]:
    return nonzero(a), nonzero(b)


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """(a, b)_v in {+1, -1}: +1 iff z^2 = a x^2 + b y^2 has a nonzero Q_v point."""
    a, b = _check(a, b)
    if v.is_infinite:
        return -1 if (a < 0 and b < 0) else 1
    p = v.p
    alpha, beta = vp(a, p), vp(b, p)
    u, w = unit_part(a, p), unit_part(b, p)
    if p == 2:
        u8, w8 = unit_mod(u, 2, 3), unit_mod(w, 2, 3)
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u8) * eps(w8) + alpha * omega(w8) + beta * omega(u8)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(u, p)
    if alpha % 2:
        sign *= legendre(w, p)
    return sign


def is_local_square(a: Rational, v: Place) -> bool:
    a = nonzero(a)
    if v.is_infinite:
        return a > 0
    p = v.p
    if vp(a, p) % 2:
        return False
    u = unit_part(a, p)
    if p == 2:
        return unit_mod(u, 2, 3) == 1
    return legendre(u, p) == 1


def class_vector(a: Rational, v: Place) -> Tuple[int, ...]:
    """Coordinates of a in Q_v^x / Q_v^x2 as an F2-vector.

    inf: (sign bit,); odd p: (valuation parity, nonresidue bit);
    p = 2: (valuation parity, (u-1)/2 mod 2, (u^2-1)/8 mod 2) for the unit part u."""
    a = nonzero(a)
    if v.is_infinite:
        return (1 if a < 0 else 0,)
    p = v.p
    val = vp(a, p) % 2
    u = unit_part(a, p)
    if p == 2:
        u8 = unit_mod(u, 2, 3)
        return (val, ((u8 - 1) // 2) % 2, ((u8 * u8 - 1) // 8) % 2)
    return (val, 0 if legendre(u, p) == 1 else 1)


def class_dimension(v: Place) -> int:
    return 1 if v.is_infinite else (3 if v.p == 2 else 2)


def nonresidue(p: int) -> int:
    n = 2
    while legendre(n, p) != -1:
        n += 1
    return n


def square_class_reps(v: Place) -> List[int]:
    """Integer representatives of every class in Q_v^x / Q_v^x2."""
    if v.is_infinite:
        return [1, -1]
    p = v.p
    if p == 2:
        return [1, 3, 5, 7, 2, 6, 10, 14]
    n = nonresidue(p)
    return [1, n, p, n * p]


def local_rep(a: Rational, v: Place) -> int:
    """The representative from square_class_reps(v) in the class of a."""
    target = class_vector(a, v)
    for r in square_class_reps(v):
        if class_vector(r, v) == target:
            return r
    raise AssertionError("square class representatives are incomplete")


def product_formula_places(a: Rational, b: Rational) -> List[Place]:
    """All places where (a, b)_v may differ from +1."""
    return place_set(a, b)
