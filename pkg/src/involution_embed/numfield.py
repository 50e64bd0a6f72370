"""The factor fields allowed in an etale algebra: Q, Q(sqrt m), Q(sqrt a, sqrt b).

Elements are tuples of Fractions in the fixed power basis
(1,), (1, sqrt m) or (1, sqrt a, sqrt b, sqrt a*sqrt b)."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import List, Tuple

from . import linalg
from .arith import (is_rational_square, is_squarefree, rational_sqrt, squarefree_part,
                    to_fraction)
from .errors import DomainError

Elt = Tuple[Fraction, ...]


@dataclass(frozen=True)
class FieldFactor:
    kind: str                # "Q" | "quad" | "biquad"
    m: int = 0
    a: int = 0
    b: int = 0
    _table: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "Q":
            pass
        elif self.kind == "quad":
            if self.m in (0, 1) or not is_squarefree(self.m):
                raise DomainError(f"quadratic factor needs square-free m != 0, 1 (got {self.m})")
        elif self.kind == "biquad":
            for t in (self.a, self.b):
                if t in (0, 1) or not is_squarefree(t):
                    raise DomainError(f"biquadratic generators must be square-free, not 0/1 (got {t})")
            if self.a == self.b or is_rational_square(self.a * self.b):
                raise DomainError("biquadratic factor needs a, b, ab all nonsquare")
        else:
            raise DomainError(f"unknown factor kind {self.kind!r}")
        object.__setattr__(self, "_table", _structure(self))

    @classmethod
    def rational(cls):
        return cls("Q")

    @classmethod
    def quadratic(cls, m: int):
        return cls("quad", m=m)

    @classmethod
    def biquadratic(cls, a: int, b: int):
        return cls("biquad", a=a, b=b)

    @property
    def degree(self) -> int:
        return {"Q": 1, "quad": 2, "biquad": 4}[self.kind]

    @property
    def quadratic_subfields(self) -> Tuple[int, ...]:
        if self.kind == "quad":
            return (self.m,)
        if self.kind == "biquad":
            return (self.a, self.b, squarefree_part(self.a * self.b))
        return ()

    def to_json(self) -> dict:
        if self.kind == "Q":
            return {"kind": "Q"}
        if self.kind == "quad":
            return {"kind": "quad", "m": self.m}
        return {"kind": "biquad", "a": self.a, "b": self.b}

    def __str__(self):
        if self.kind == "Q":
            return "Q"
        if self.kind == "quad":
            return f"Q(sqrt({self.m}))"
        return f"Q(sqrt({self.a}),sqrt({self.b}))"

    # --- element arithmetic -------------------------------------------------

    def elt(self, x) -> Elt:
        """Coerce a rational or a coordinate sequence into an element."""
        if isinstance(x, (list, tuple)):
            if len(x) != self.degree:
                raise DomainError(f"{self} element needs {self.degree} coordinates")
            return tuple(to_fraction(c) for c in x)
        q = to_fraction(x)
        return (q,) + (Fraction(0),) * (self.degree - 1)

    def one(self) -> Elt:
        return self.elt(1)

    def gen(self) -> Elt:
        """sqrt(m) for a quadratic factor."""
        if self.kind != "quad":
            raise DomainError("gen() is only defined for quadratic factors")
        return (Fraction(0), Fraction(1))

    def is_zero(self, x: Elt) -> bool:
        return all(c == 0 for c in x)

    def is_rational(self, x: Elt) -> bool:
        return all(c == 0 for c in x[1:])

    def add(self, x: Elt, y: Elt) -> Elt:
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x: Elt) -> Elt:
        return tuple(-a for a in x)

    def scale(self, x: Elt, c) -> Elt:
        c = Fraction(c)
        return tuple(c * a for a in x)

    def mul(self, x: Elt, y: Elt) -> Elt:
        n = self.degree
        out = [Fraction(0)] * n
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                k, c = self._table[i][j]
                out[k] += c * xi * yj
        return tuple(out)

    def power(self, x: Elt, e: int) -> Elt:
        if e < 0:
            return self.power(self.inv(x), -e)
        out, base = self.one(), x
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def mult_matrix(self, x: Elt) -> linalg.Matrix:
        """Matrix of y -> x*y in the power basis (columns = images of basis vectors)."""
        n = self.degree
        cols = []
        for j in range(n):
            e = tuple(Fraction(int(i == j)) for i in range(n))
            cols.append(self.mul(x, e))
        return linalg.transpose([list(c) for c in cols])

    def norm(self, x: Elt) -> Fraction:
        if self.kind == "Q":
            return x[0]
        if self.kind == "quad":
            return x[0] ** 2 - self.m * x[1] ** 2
        return linalg.det(self.mult_matrix(x))

    def trace(self, x: Elt) -> Fraction:
        return self.degree * x[0]  # the non-identity basis vectors have trace 0

    def inv(self, x: Elt) -> Elt:
        if self.is_zero(x):
            raise DomainError("zero is not invertible")
        if self.kind == "Q":
            return (1 / x[0],)
        if self.kind == "quad":
            n = self.norm(x)
            return (x[0] / n, -x[1] / n)
        sol = linalg.solve(self.mult_matrix(x), self.one())
        return tuple(sol)

    def div(self, x: Elt, y: Elt) -> Elt:
        return self.mul(x, self.inv(y))

    def conjugates(self, x: Elt) -> List[Elt]:
        """Images of x under every Galois automorphism (sign flips of the roots)."""
        if self.kind == "Q":
            return [x]
        if self.kind == "quad":
            return [x, (x[0], -x[1])]
        out = []
        for s1, s2 in product((1, -1), repeat=2):
            out.append((x[0], s1 * x[1], s2 * x[2], s1 * s2 * x[3]))
        return out

    # --- real embeddings ------------------------------------------------------

    @cached_property
    def real_embeddings(self) -> List[Tuple[int, ...]]:
        """Sign choices (for the square roots) giving real embeddings."""
        if self.kind == "Q":
            return [()]
        if self.kind == "quad":
            return [(1,), (-1,)] if self.m > 0 else []
        if self.a > 0 and self.b > 0:
            return [(s1, s2) for s1, s2 in product((1, -1), repeat=2)]
        return []

    def real_sign(self, x: Elt, emb: Tuple[int, ...]) -> int:
        """Exact sign of x under a real embedding."""
        if self.kind == "Q":
            return _sgn(x[0])
        if self.kind == "quad":
            return _sign_u_plus_w_root(x[0], emb[0] * x[1], self.m)
        s1, s2 = emb
        # x = (x0 + s1 x1 sqrt a) + sqrt b * s2 (x2 + s1 x3 sqrt a) = P + Q sqrt b
        P = (x[0], s1 * x[1])
        Q = (s2 * x[2], s2 * s1 * x[3])
        sp = _sign_u_plus_w_root(P[0], P[1], self.a)
        sq = _sign_u_plus_w_root(Q[0], Q[1], self.a)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        # opposite signs: compare P^2 with b Q^2 inside Q(sqrt a)
        P2 = (P[0] ** 2 + self.a * P[1] ** 2, 2 * P[0] * P[1])
        Q2 = (self.b * (Q[0] ** 2 + self.a * Q[1] ** 2), self.b * 2 * Q[0] * Q[1])
        diff = _sign_u_plus_w_root(P2[0] - Q2[0], P2[1] - Q2[1], self.a)
        return sp if diff > 0 else (sq if diff < 0 else 0)

    # --- squares ----------------------------------------------------------------

    def sqrt(self, x: Elt):
        """A square root of x inside the field, or None."""
        if self.is_zero(x):
            return self.elt(0)
        if self.kind == "Q":
            return (rational_sqrt(x[0]),) if is_rational_square(x[0]) else None
        if self.kind == "quad":
            return _quad_sqrt(x[0], x[1], self.m)
        return _biquad_sqrt(self, x)

    def is_square(self, x: Elt) -> bool:
        return self.sqrt(x) is not None


def _sgn(q) -> int:
    return (q > 0) - (q < 0)


def _sign_u_plus_w_root(u, w, m) -> int:
    """Sign of u + w sqrt(m) for m > 0."""
    su, sw = _sgn(u), _sgn(w)
    if sw == 0:
        return su
    if su == 0 or su == sw:
        return sw if su == 0 else su
    d = u * u - w * w * m
    return su if d > 0 else (sw if d < 0 else 0)


def _quad_sqrt(u, w, m):
    u, w = Fraction(u), Fraction(w)
    if w == 0:
        if is_rational_square(u):
            return (rational_sqrt(u), Fraction(0))
        if is_rational_square(u / m):
            return (Fraction(0), rational_sqrt(u / m))
        return None
    n = u * u - m * w * w
    if not is_rational_square(n):
        return None
    r = rational_sqrt(n)
    for t in ((u + r) / 2, (u - r) / 2):
        if t != 0 and is_rational_square(t):
            e = rational_sqrt(t)
            f = w / (2 * e)
            if e * e + m * f * f == u and 2 * e * f == w:
                return (e, f)
    return None


def _biquad_sqrt(F: FieldFactor, x: Elt):
    # x is a square in F iff it is a square of an element y = P + Q sqrt b with
    # P, Q in K = Q(sqrt a); solve P^2 + b Q^2 = X, 2 P Q = Y in K.
    K = FieldFactor.quadratic(F.a)
    X = (x[0], x[1])
    Y = (x[2], x[3])
    if K.is_zero(Y):
        P = K.sqrt(X)
        if P is not None:
            return (P[0], P[1], Fraction(0), Fraction(0))
        Q = K.sqrt(K.scale(X, Fraction(1, F.b)))
        if Q is not None:
            return (Fraction(0), Fraction(0), Q[0], Q[1])
        return None
    # P^2 is a root of z^2 - X z + b Y^2 / 4 = 0 in K
    disc = K.add(K.mul(X, X), K.scale(K.mul(Y, Y), -F.b))
    r = K.sqrt(disc)
    if r is None:
        return None
    for z in (K.scale(K.add(X, r), Fraction(1, 2)), K.scale(K.add(X, K.neg(r)), Fraction(1, 2))):
        if K.is_zero(z):
            continue
        P = K.sqrt(z)
        if P is None:
            continue
        Q = K.div(Y, K.scale(P, 2))
        y = (P[0], P[1], Q[0], Q[1])
        if F.mul(y, y) == tuple(x):
            return y
    return None


def _structure(F: FieldFactor):
    """table[i][j] = (k, c): e_i e_j = c e_k."""
    one = Fraction(1)
    if F.kind == "Q":
        return (((0, one),),)
    if F.kind == "quad":
        return (((0, one), (1, one)), ((1, one), (0, Fraction(F.m))))
    a, b = Fraction(F.a), Fraction(F.b)
    return (
        ((0, one), (1, one), (2, one), (3, one)),
        ((1, one), (0, a), (3, one), (2, a)),
        ((2, one), (3, one), (0, b), (1, b)),
        ((3, one), (2, a), (1, b), (0, a * b)),
    )


def parse_factor(spec) -> FieldFactor:
    if isinstance(spec, FieldFactor):
        return spec
    if not isinstance(spec, dict):
        raise DomainError(f"factor spec must be an object, got {spec!r}")
    kind = spec.get("kind")
    allowed = {"Q": {"kind"}, "quad": {"kind", "m"}, "biquad": {"kind", "a", "b"}}
    if kind not in allowed:
        raise DomainError(f"unknown factor kind {kind!r}")
    extra = set(spec) - allowed[kind]
    if extra:
        raise DomainError(f"unknown fields in factor spec: {sorted(extra)}")
    try:
        if kind == "Q":
            return FieldFactor.rational()
        if kind == "quad":
            return FieldFactor.quadratic(int(spec["m"]))
        return FieldFactor.biquadratic(int(spec["a"]), int(spec["b"]))
    except KeyError as exc:
        raise DomainError(f"factor spec missing {exc}") from exc
