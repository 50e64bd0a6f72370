"""Completions of the factor fields above a place of Q.

For a quadratic factor Q(sqrt m) every completion F_w is handled exactly:
split places through a p-adic square root of m, tame nonsplit places through
the residue field, and the dyadic nonsplit place through the square classes of
(O/8O)^x.  Biquadratic factors only support rational arguments (for those the
local symbol is the base symbol raised to the local degree)."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm
from typing import Dict, List, Tuple

from .arith import factor, legendre, sqrt_mod_prime_power, vp
from .errors import DomainError, UnsupportedExtensionError
from .numfield import Elt, FieldFactor
from .places import INF, Place, class_vector, hilbert_symbol, is_local_square


@dataclass(frozen=True)
class ExtPlace:
    """A place w of a factor field above the place ``base`` of Q."""

    base: Place
    factor_index: int
    local_kind: str              # split-copy | inert | ramified | complex
    residue_size: int            # 0 at archimedean places
    local_degree: int
    root_sign: int = 0           # which copy, for split places of Q(sqrt m)
    field: FieldFactor = field(default=None, compare=False, repr=False)

    def __str__(self):
        tag = {1: "+", -1: "-", 0: ""}[self.root_sign]
        return f"{self.base}[{self.factor_index}:{self.local_kind}{tag}]"


def decompose(F: FieldFactor, v: Place, index: int = 0) -> List[ExtPlace]:
    """The places of F above v; local degrees add up to deg F."""
    mk = lambda kind, q, deg, s=0: ExtPlace(v, index, kind, q, deg, s, F)
    q0 = 0 if v.is_infinite else v.p
    if F.kind == "Q":
        return [mk("split-copy", q0, 1)]
    if F.kind == "quad":
        m = F.m
        if v.is_infinite:
            return [mk("split-copy", 0, 1, 1), mk("split-copy", 0, 1, -1)] if m > 0 else [mk("complex", 0, 2)]
        p = v.p
        if p == 2:
            r = m % 8
            if r == 1:
                return [mk("split-copy", 2, 1, 1), mk("split-copy", 2, 1, -1)]
            if r == 5:
                return [mk("inert", 4, 2)]
            return [mk("ramified", 2, 2)]
        if m % p == 0:
            return [mk("ramified", p, 2)]
        if legendre(m, p) == 1:
            return [mk("split-copy", p, 1, 1), mk("split-copy", p, 1, -1)]
        return [mk("inert", p * p, 2)]
    # biquadratic: local degree = size of the subgroup <a, b> in Q_v^x / Q_v^x2
    gens = [F.a, F.b, F.a * F.b]
    if v.is_infinite:
        if F.a > 0 and F.b > 0:
            return [mk("split-copy", 0, 1, s) for s in (1, 2, 3, 4)]
        return [mk("complex", 0, 2, s) for s in (1, 2)]
    nontriv = sum(1 for g in gens if not is_local_square(g, v))
    deg = {0: 1, 2: 2, 3: 4}[nontriv]
    p = v.p
    if deg == 1:
        return [mk("split-copy", p, 1, s) for s in (1, 2, 3, 4)]
    if p == 2:
        unram = all(is_local_square(g, v) or class_vector(g, v)[:2] == (0, 0) for g in gens)
    else:
        unram = all(vp(g, p) % 2 == 0 for g in gens)
    if deg == 2:
        kind = "inert" if unram else "ramified"
        return [mk(kind, p ** (2 if unram else 1), 2, s) for s in (1, 2)]
    f = 2 if p != 2 else _biquad_dyadic_f(gens)
    return [mk("ramified", p ** f, 4)]


def _biquad_dyadic_f(gens) -> int:
    # some quadratic subfield is unramified iff one generator is 5 times a square
    return 2 if any(class_vector(g, Place(2)) == (0, 0, 1) for g in gens) else 1


def places_over(F: FieldFactor, v: Place, index: int = 0) -> List[ExtPlace]:
    return decompose(F, v, index)


def relevant_base_places(F: FieldFactor, *elts: Elt) -> List[Place]:
    """Places of Q outside which every symbol of the elts over F is tame and trivial:
    2, inf, primes ramified in F, and primes in the norms / denominators."""
    ps = set(_disc_primes(F)) | {2}
    for x in elts:
        _require_quad_or_rational(F, x)
        if F.is_zero(x):
            raise DomainError("zero element has no local data")
        U, W, D = _integral(F, x)
        n = U * U - F.m * W * W if F.kind == "quad" else x[0].numerator
        ps.update(factor(n))
        ps.update(factor(D))
    return sorted({Place(p) for p in ps} | {INF})


def _disc_primes(F: FieldFactor):
    out = set()
    for m in F.quadratic_subfields:
        out.update(factor(m))
    return out


def _integral(F: FieldFactor, x: Elt):
    """(U, W, D) with x = (U + W sqrt m)/D for quadratic F; for other kinds
    only D (common denominator) is meaningful."""
    D = lcm(*(Fraction(c).denominator for c in x))
    if F.kind == "quad":
        return int(x[0] * D), int(x[1] * D), D
    return 0, 0, D


def _require_quad_or_rational(F: FieldFactor, x: Elt):
    if F.kind == "biquad" and not F.is_rational(x):
        raise UnsupportedExtensionError(
            "local computations over a biquadratic factor need rational arguments")


# --- p-adic roots of m --------------------------------------------------------

@lru_cache(maxsize=4096)
def padic_root(m: int, p: int, k: int, sign: int) -> int:
    """The root of m in Z_p selected by sign, reduced mod p**k.

    Odd p: sign +1 lifts the smaller root of m mod p.  p = 2: sign +1 is the root
    congruent to 1 mod 4."""
    mod = p**k
    if p == 2:
        s = sqrt_mod_prime_power(m, 2, max(k + 1, 3)) % mod
        if s % 4 != 1:
            s = (-s) % mod
        return s if sign == 1 else (-s) % mod
    r0 = sqrt_mod_prime_power(m % p, p, 1) % p
    r0 = min(r0, p - r0)
    s = _lift_root(m, p, k, r0)
    return s if sign == 1 else (-s) % mod


def _lift_root(m: int, p: int, k: int, r0: int) -> int:
    s, mod = r0, p
    for _ in range(1, k):
        mod *= p
        s = (s - (s * s - m) * pow(2 * s, -1, mod)) % mod
    return s


def _split_image(F: FieldFactor, x: Elt, w: ExtPlace) -> Tuple[int, int]:
    """(valuation, unit residue mod p**3 or mod 8) of the image of x in Q_p."""
    p = w.base.p
    U, W, D = _integral(F, x)
    n = U * U - F.m * W * W
    k = vp(n, p) + 4 if n else 64
    mod = p**k
    r = padic_root(F.m, p, k, w.root_sign)
    img = (U + W * r) % mod
    val = 0
    while img % p == 0:
        img //= p
        val += 1
        if val >= k:
            raise AssertionError("insufficient p-adic precision")
    # divide by D (a rational number) afterwards
    dv = vp(D, p)
    du = (D // p**dv) % mod
    unit = img * pow(du, -1, mod) % mod
    return val - dv, unit


# --- dyadic nonsplit square classes -------------------------------------------

@lru_cache(maxsize=64)
def _dyadic_table(c0: int, c1: int, norm_key: Tuple[int, int, int]):
    """Square classes of (O/8O)^x for O = Z2[theta], theta^2 = c0 + c1 theta.

    Returns a dict residue (a, b) -> 3-bit class vector."""
    na, nab, nb = norm_key

    def mul(x, y):
        a1, b1 = x
        a2, b2 = y
        bb = b1 * b2
        return ((a1 * a2 + bb * c0) % 8, (a1 * b2 + a2 * b1 + bb * c1) % 8)

    units = [(a, b) for a, b in product(range(8), repeat=2) if (na * a * a + nab * a * b + nb * b * b) % 2]
    squares = {mul(u, u) for u in units}
    gens, span = [], {(1, 0): ()}
    for u in units:
        in_span = any(mul(t, s) == u for t in span for s in squares)
        if not in_span:
            gens.append(u)
            new = {}
            for t, bits in span.items():
                new[t] = bits + (0,)
                new[mul(t, u)] = bits + (1,)
            span = new
    table = {}
    for t, bits in span.items():
        for s in squares:
            table[mul(t, s)] = bits
    if len(gens) != 3 or len(table) != len(units):
        raise AssertionError("dyadic square-class table has the wrong size")
    return table


def _mod8(q: Fraction) -> int:
    q = Fraction(q)
    if q.denominator % 2 == 0:
        raise AssertionError("expected a 2-adic integer")
    return q.numerator * pow(q.denominator, -1, 8) % 8


def _uniformizer(F: FieldFactor, w: ExtPlace) -> Elt:
    p = w.base.p
    if w.local_kind == "inert":
        return F.elt(p)
    if p != 2:
        return F.gen()
    return F.gen() if F.m % 4 == 2 else F.add(F.one(), F.gen())


def ext_valuation(F: FieldFactor, x: Elt, w: ExtPlace) -> int:
    """Normalized valuation v_w(x) (uniformizer has valuation 1); 0 at infinite w."""
    _require_quad_or_rational(F, x)
    if w.base.is_infinite:
        return 0
    p = w.base.p
    if F.kind == "Q":
        return vp(x[0], p)
    if F.kind == "biquad":
        e = _ramification_index(w)
        return vp(x[0], p) * e
    if w.local_kind == "split-copy":
        return _split_image(F, x, w)[0]
    nv = vp(F.norm(x), p)
    return nv // 2 if w.local_kind == "inert" else nv


def _ramification_index(w: ExtPlace) -> int:
    if w.local_kind == "split-copy":
        return 1
    if w.local_kind == "inert":
        return 1
    f = 1
    q = w.residue_size
    while q > w.base.p:
        q //= w.base.p
        f += 1
    return w.local_degree // f


def ext_class_vector(F: FieldFactor, x: Elt, w: ExtPlace) -> Tuple[int, ...]:
    """Coordinates of x in F_w^x / F_w^x2 (empty at complex places)."""
    _require_quad_or_rational(F, x)
    if F.is_zero(x):
        raise DomainError("zero has no square class")
    if w.local_kind == "complex":
        return ()
    v = w.base
    if F.kind == "biquad":
        raise UnsupportedExtensionError("square-class coordinates over biquadratic factors")
    if F.kind == "Q":
        return class_vector(x[0], v)
    if w.local_kind == "split-copy":
        if v.is_infinite:
            s = F.real_sign(x, (w.root_sign,))
            return (1 if s < 0 else 0,)
        val, unit = _split_image(F, x, w)
        if v.p == 2:
            u8 = unit % 8
            return (val % 2, ((u8 - 1) // 2) % 2, ((u8 * u8 - 1) // 8) % 2)
        return (val % 2, 0 if legendre(unit, v.p) == 1 else 1)
    p = v.p
    val = ext_valuation(F, x, w)
    unit = F.div(x, F.power(_uniformizer(F, w), val))
    if p != 2:
        if w.local_kind == "inert":
            return (val % 2, 0 if legendre(F.norm(unit), p) == 1 else 1)
        return (val % 2, 0 if legendre(unit[0], p) == 1 else 1)
    if w.local_kind == "inert":
        # basis (1, theta), theta = (1 + sqrt m)/2
        a, b = unit[0] - unit[1], 2 * unit[1]
        c0, c1 = ((F.m - 1) // 4) % 8, 1
        key = (1, 1, ((1 - F.m) // 4) % 8)
    else:
        a, b = unit[0], unit[1]
        c0, c1 = F.m % 8, 0
        key = (1, 0, (-F.m) % 8)
    bits = _dyadic_table(c0, c1, key)[(_mod8(a), _mod8(b))]
    return (val % 2,) + bits


def ext_class_dimension(w: ExtPlace) -> int:
    if w.local_kind == "complex":
        return 0
    if w.base.is_infinite:
        return 1
    if w.base.p == 2:
        return 2 + w.local_degree
    return 2


def ext_is_local_square(F: FieldFactor, x: Elt, w: ExtPlace) -> bool:
    if F.kind == "biquad":
        _require_quad_or_rational(F, x)
        # rational t is a square in F_w iff its class lies in the span of a, b
        v = w.base
        if w.local_kind == "complex":
            return True
        t = x[0]
        return any(is_local_square(t * g, v) for g in (1, F.a, F.b, F.a * F.b))
    return not any(ext_class_vector(F, x, w))


def _tame_bit(va, vb, w: ExtPlace) -> int:
    alpha, ca = va
    beta, cb = vb
    q = w.residue_size
    return (alpha * beta * ((q - 1) // 2) + beta * ca + alpha * cb) % 2


def _q2_bit(va, vb) -> int:
    a0, a1, a2 = va
    b0, b1, b2 = vb
    return (a1 * b1 + a0 * b2 + b0 * a2) % 2


def ext_hilbert_symbol(F: FieldFactor, a: Elt, b: Elt, w: ExtPlace) -> int:
    """Hilbert symbol (a, b) over the completion F_w."""
    if F.is_zero(a) or F.is_zero(b):
        raise DomainError("Hilbert symbol of zero")
    if F.kind == "Q":
        return hilbert_symbol(a[0], b[0], w.base)
    if w.local_kind == "complex":
        return 1
    if F.kind == "biquad":
        _require_quad_or_rational(F, a)
        _require_quad_or_rational(F, b)
        # restriction multiplies local invariants by the local degree
        s = hilbert_symbol(a[0], b[0], w.base)
        return s ** w.local_degree
    v = w.base
    if v.is_infinite:
        sa = F.real_sign(a, (w.root_sign,))
        sb = F.real_sign(b, (w.root_sign,))
        return -1 if sa < 0 and sb < 0 else 1
    if v.p == 2 and w.local_kind != "split-copy":
        return _dyadic_by_product_formula(F, a, b, w)
    va, vb = ext_class_vector(F, a, w), ext_class_vector(F, b, w)
    bit = _q2_bit(va, vb) if v.p == 2 else _tame_bit(va, vb, w)
    return -1 if bit else 1


def _dyadic_by_product_formula(F: FieldFactor, a: Elt, b: Elt, w: ExtPlace) -> int:
    # the dyadic place is unique here, so it is determined by all the others
    out = 1
    for v in relevant_base_places(F, a, b):
        if v.p == 2:
            continue
        for w2 in decompose(F, v, w.factor_index):
            out *= ext_hilbert_symbol(F, a, b, w2)
    return out


def all_places_over(F: FieldFactor, base_places, index: int = 0) -> List[ExtPlace]:
    out = []
    for v in base_places:
        out.extend(decompose(F, v, index))
    return out


def symbol_table(F: FieldFactor, a: Elt, b: Elt, index: int = 0) -> Dict[ExtPlace, int]:
    """All possibly nontrivial symbols (a, b)_w, keyed by ExtPlace."""
    return {w: ext_hilbert_symbol(F, a, b, w)
            for w in all_places_over(F, relevant_base_places(F, a, b), index)}
