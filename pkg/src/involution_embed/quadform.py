"""Diagonal quadratic forms over Q and their local invariants.

Hasse invariants are multiplicative signs h_v(q) = prod_{i<j} (a_i, a_j)_v.
In additive notation (values in 1/2 Z / Z) +1 corresponds to 0 and -1 to 1/2."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import linalg
from .arith import fmt, is_rational_square, nonzero, prime_support, squarefree_part, to_fraction
from .config import DEFAULT, Bounds
from .errors import DegenerateFormError, DomainError, InfeasibleError, VerificationError
from .places import (INF, Place, SquareClass, hilbert_symbol, is_local_square, square_class_reps)


@dataclass(frozen=True)
class QuadraticForm:
    diag: Tuple[Fraction, ...]

    def __init__(self, diag):
        entries = tuple(to_fraction(a) for a in diag)
        if not entries:
            raise DomainError("a quadratic form needs rank >= 1")
        if any(a == 0 for a in entries):
            raise DegenerateFormError("diagonal entries must be nonzero")
        object.__setattr__(self, "diag", entries)

    @property
    def rank(self) -> int:
        return len(self.diag)

    def det(self) -> Fraction:
        out = Fraction(1)
        for a in self.diag:
            out *= a
        return out

    def det_class(self) -> SquareClass:
        return SquareClass.of(self.det())

    def disc(self) -> Fraction:
        """delta(q) = (-1)^(n(n-1)/2) det(q)."""
        n = self.rank
        return (-1) ** (n * (n - 1) // 2) * self.det()

    def disc_class(self) -> SquareClass:
        return SquareClass.of(self.disc())

    def support(self) -> List[Place]:
        """Places where h_v may be nontrivial: 2, inf and primes of the entries."""
        return sorted({Place(p) for p in prime_support(*self.diag) | {2}} | {INF})

    def hasse(self, v: Place) -> int:
        h = 1
        for a, b in combinations(self.diag, 2):
            h *= hilbert_symbol(a, b, v)
        return h

    def hasse_map(self) -> Dict[Place, int]:
        return {v: self.hasse(v) for v in self.support()}

    def signature(self) -> Tuple[int, int]:
        neg = sum(1 for a in self.diag if a < 0)
        return (self.rank - neg, neg)

    def scaled(self, lam) -> "QuadraticForm":
        lam = nonzero(lam)
        return QuadraticForm([lam * a for a in self.diag])

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        """Orthogonal sum."""
        return QuadraticForm(self.diag + other.diag)

    def gram(self) -> linalg.Matrix:
        return linalg.block_diag(*[[[a]] for a in self.diag])

    def to_json(self) -> dict:
        return {"diag": [fmt(a) for a in self.diag]}

    def __str__(self):
        return "<" + ", ".join(fmt(a) for a in self.diag) + ">"


FormLike = Union[QuadraticForm, Sequence]


def as_form(q: FormLike) -> QuadraticForm:
    return q if isinstance(q, QuadraticForm) else QuadraticForm(q)


@dataclass(frozen=True)
class LocalInvariants:
    rank: int
    det_class: SquareClass
    disc_class: SquareClass
    hasse: Dict[Place, int]
    signature: Tuple[int, int]

    def to_json(self) -> dict:
        return {"rank": self.rank, "det": str(self.det_class.value), "disc": str(self.disc_class.value),
                "hasse": {str(v): h for v, h in sorted(self.hasse.items())},
                "signature": list(self.signature)}


def invariants(q: FormLike) -> LocalInvariants:
    q = as_form(q)
    return LocalInvariants(q.rank, q.det_class(), q.disc_class(), q.hasse_map(), q.signature())


# --- Gram matrices ----------------------------------------------------------------

def diagonalize(G) -> QuadraticForm:
    """Diagonal form congruent to the symmetric nonsingular matrix G."""
    a = [[to_fraction(x) for x in r] for r in G]
    n = len(a)
    if any(len(r) != n for r in a):
        raise DomainError("Gram matrix must be square")
    if not linalg.is_symmetric(a):
        raise DomainError("Gram matrix must be symmetric")
    diag = []
    for i in range(n):
        if a[i][i] == 0:
            j = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if j is not None:
                _swap(a, i, j)
            else:
                j = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if j is None:
                    raise DegenerateFormError("Gram matrix is singular")
                # x_i <- x_i + x_j makes the pivot 2 a_ij
                for k in range(n):
                    a[i][k] += a[j][k]
                for k in range(n):
                    a[k][i] += a[k][j]
        piv = a[i][i]
        for j in range(i + 1, n):
            if a[j][i]:
                f = a[j][i] / piv
                for k in range(n):
                    a[j][k] -= f * a[i][k]
                for k in range(n):
                    a[k][j] -= f * a[k][i]
        diag.append(piv)
    return QuadraticForm(diag)


def _swap(a, i, j):
    a[i], a[j] = a[j], a[i]
    for r in a:
        r[i], r[j] = r[j], r[i]


def congruent(G, U) -> linalg.Matrix:
    """U^t G U."""
    return linalg.matmul(linalg.matmul(linalg.transpose(U), G), U)


# --- scaling -------------------------------------------------------------------------

def scaling_hasse_factor(q: FormLike, lam, v: Place) -> int:
    """h_v(lam q) / h_v(q) = (lam, (-1)^(n(n-1)/2) d^(n-1))_v.

    For even n this is (lam, delta(q))_v; for odd n it is (lam, (-1)^(n(n-1)/2))_v."""
    q = as_form(q)
    n = q.rank
    c = (-1) ** (n * (n - 1) // 2) * (q.det() ** (n - 1) if n > 1 else 1)
    return hilbert_symbol(lam, c, v)


def disc_scaling_factor(q: FormLike, lam, v: Place) -> int:
    """(lam, delta(q))_v, the Hasse shift of lam*q for forms of even rank."""
    return hilbert_symbol(lam, as_form(q).disc(), v)


def scale(q: FormLike, lam) -> QuadraticForm:
    """lam * q, checked against the determinant and Hasse scaling laws."""
    q = as_form(q)
    lam = nonzero(lam)
    out = q.scaled(lam)
    if SquareClass.of(out.det()) != SquareClass.of(lam ** q.rank * q.det()):
        raise VerificationError("determinant scaling law failed")
    for v in sorted(set(q.support()) | set(out.support())):
        if out.hasse(v) != scaling_hasse_factor(q, lam, v) * q.hasse(v):
            raise VerificationError(f"Hasse scaling law failed at {v}")
    return out


# --- local classification ------------------------------------------------------------

def locally_equivalent(q1: FormLike, q2: FormLike, v: Place) -> bool:
    q1, q2 = as_form(q1), as_form(q2)
    if q1.rank != q2.rank:
        return False
    if v.is_infinite:
        return q1.signature() == q2.signature()
    return is_local_square(q1.det() / q2.det(), v) and q1.hasse(v) == q2.hasse(v)


def globally_equivalent(q1: FormLike, q2: FormLike) -> bool:
    """Hasse-Minkowski: equal rank, det class, signature and Hasse invariants."""
    q1, q2 = as_form(q1), as_form(q2)
    if q1.rank != q2.rank or not is_rational_square(q1.det() / q2.det()):
        return False
    if q1.signature() != q2.signature():
        return False
    # with equal det classes the Hasse invariants agree at every tame place
    places = sorted(set(q1.support()) | set(q2.support()))
    return all(q1.hasse(v) == q2.hasse(v) for v in places if v.is_finite)


def _isotropic_inv(r: int, d: Fraction, h: int, v: Place) -> bool:
    """Isotropy over Q_v (v finite) of a form with rank r, det d, Hasse h."""
    if r <= 1:
        return False
    if r == 2:
        return is_local_square(-d, v)
    if r == 3:
        return hilbert_symbol(-1, -d, v) == h
    if r == 4:
        return not is_local_square(d, v) or h == hilbert_symbol(-1, -1, v)
    return True


def is_isotropic(q: FormLike, v: Place) -> bool:
    q = as_form(q)
    if v.is_infinite:
        p, m = q.signature()
        return p > 0 and m > 0
    return _isotropic_inv(q.rank, q.det(), q.hasse(v), v)


def represents(q: FormLike, c, v: Union[Place, str] = "global") -> bool:
    """Does q take the value c (over Q_v, or over Q for v = "global")?"""
    q = as_form(q)
    c = nonzero(c)
    if isinstance(v, str) and v == "global":
        if q.rank == 1:
            return is_rational_square(c / q.diag[0])
        places = sorted(set(q.support()) | {Place(p) for p in prime_support(c)})
        return all(represents(q, c, w) for w in places)
    return is_isotropic(q + QuadraticForm([-c]), v)


def local_witt_index(q: FormLike, v: Place) -> int:
    q = as_form(q)
    if v.is_infinite:
        return min(q.signature())
    r, d, h = q.rank, q.det(), q.hasse(v)
    idx = 0
    while r >= 2 and _isotropic_inv(r, d, h, v):
        # q = H + q' with det q' = -d and h(q) = h(q') (-1, -d)
        h = h * hilbert_symbol(-1, -d, v)
        d = -d
        r -= 2
        idx += 1
    return idx


# --- synthesis --------------------------------------------------------------------------

def _normalize_hasse(hasse) -> Dict[Place, int]:
    out = {}
    for k, e in (hasse or {}).items():
        e = int(e)
        if e not in (1, -1):
            raise InfeasibleError(f"Hasse value at {k} must be +1 or -1", "sign")
        out[Place.parse(k)] = e
    return out


def check_invariant_vector(n: int, d, hasse, signature) -> Dict[Place, int]:
    """Validate (n, d, h, signature) and return the full Hasse map (inf included)."""
    d = nonzero(d.value if isinstance(d, SquareClass) else d)
    hasse = _normalize_hasse(hasse)
    p, m = signature
    if n < 1 or p < 0 or m < 0 or p + m != n:
        raise InfeasibleError(f"signature {signature} does not have rank {n}", "signature-rank")
    if (d < 0) != (m % 2 == 1):
        raise InfeasibleError("the sign of the determinant must be (-1)^q", "signature-det")
    h_inf = (-1) ** (m * (m - 1) // 2)
    if hasse.get(INF, h_inf) != h_inf:
        raise InfeasibleError("the real Hasse invariant is fixed by the signature", "real-hasse")
    hasse[INF] = h_inf
    prod = 1
    for e in hasse.values():
        prod *= e
    if prod != 1:
        raise InfeasibleError("the Hasse invariants violate the product formula", "product-formula")
    if n == 1 and any(e == -1 for e in hasse.values()):
        raise InfeasibleError("rank-1 forms have trivial Hasse invariants", "rank-1")
    if n == 2:
        for v, e in hasse.items():
            if e == -1 and is_local_square(-d, v):
                raise InfeasibleError(f"binary forms with -det a square at {v} are hyperbolic there",
                                      "binary-symbol")
    return hasse


def build_form_with_invariants(n: int, d, hasse, signature, bounds: Bounds = DEFAULT) -> QuadraticForm:
    """A diagonal form with rank n, det class d, the given Hasse invariants
    (+1 at unlisted places) and the given real signature."""
    from .solvers import lemma_hs
    dval = nonzero(d.value if isinstance(d, SquareClass) else d)
    d = Fraction(squarefree_part(dval))
    hasse = check_invariant_vector(n, d, hasse, signature)
    p_sig, m_sig = signature
    if n == 1:
        out = QuadraticForm([d])
    elif n == 2:
        # <a, a d> has Hasse invariant (a, -d)
        sign_a = -1 if (d > 0 and m_sig == 2) else 1
        if is_rational_square(-d):
            out = QuadraticForm([sign_a, sign_a * d])
        else:
            a = lemma_hs(-d, hasse, {INF: sign_a}, bounds)
            out = QuadraticForm([a, a * d])
    else:
        out = _build_high_rank(n, d, hasse, signature, bounds)
    got = invariants(out)
    want_h = {v: hasse.get(v, 1) for v in set(got.hasse) | set(hasse)}
    if (got.det_class != SquareClass.of(d) or got.signature != tuple(signature)
            or any(out.hasse(v) != e for v, e in want_h.items())):
        raise VerificationError("synthesized form does not have the requested invariants")
    return out


def _small_squarefree(limit: int):
    yield 1
    yield -1
    for k in range(2, limit):
        if all(k % (p * p) for p in range(2, int(k ** 0.5) + 1)):
            yield k
            yield -k


def _build_high_rank(n, d, hasse, signature, bounds):
    from .solvers import lemma_hs
    p_sig, m_sig = signature
    base_places = set(hasse) | {Place(p) for p in prime_support(d)} | {Place(2), INF}
    for c in _small_squarefree(200):
        for k in range(0, n - 2):       # number of -1 among the n-3 unit entries
            if k > n - 3:
                continue
            units = [Fraction(-1)] * k + [Fraction(1)] * (n - 3 - k)
            f = QuadraticForm(units + [Fraction(c)])
            det_f = f.det()
            e = d / det_f
            for sign_a in (1, -1):
                neg = k + (c < 0) + (1 if e < 0 else (2 if sign_a < 0 else 0))
                if neg != m_sig:
                    continue
                places = sorted(base_places | {Place(p) for p in prime_support(c)})
                targets = {}
                ok = True
                for v in places:
                    tv = hasse.get(v, 1) * f.hasse(v) * hilbert_symbol(det_f, e, v)
                    if v.is_infinite:
                        if tv != hilbert_symbol(sign_a, -e, v):
                            ok = False
                        continue
                    if tv == -1 and is_local_square(-e, v):
                        ok = False
                        break
                    targets[v] = tv
                if not ok:
                    continue
                targets[INF] = hilbert_symbol(sign_a, -e, INF)
                if is_rational_square(-e):
                    if any(t == -1 for t in targets.values()):
                        continue
                    a = Fraction(sign_a)
                else:
                    a = lemma_hs(-e, targets, {INF: sign_a}, bounds)
                return f + QuadraticForm([a, a * e])
    raise InfeasibleError("no synthesis found in the search range", "search")


# --- similarity -------------------------------------------------------------------------

def similar(f: FormLike, g: FormLike, bounds: Bounds = DEFAULT) -> Optional[Fraction]:
    """Some lam with lam*f equivalent to g over Q, or None when f, g are not similar."""
    from .solvers import find_checkpoint_place, lemma_hs1
    f, g = as_form(f), as_form(g)
    n = f.rank
    if n != g.rank:
        return None
    if n % 2 == 1:
        lam = Fraction(squarefree_part(g.det() / f.det()))
        return lam if globally_equivalent(f.scaled(lam), g) else None
    if not is_rational_square(f.det() / g.det()):
        return None
    sig_f, sig_g = f.signature(), g.signature()
    if sig_g == sig_f:
        s = 1
    elif sig_g == sig_f[::-1]:
        s = -1
    else:
        return None
    delta = f.disc()
    places = sorted(set(f.support()) | set(g.support()))
    eps = {v: f.hasse(v) * g.hasse(v) for v in places if v.is_finite}
    if is_rational_square(delta):
        lam = Fraction(s)
        if any(e == -1 for e in eps.values()):
            return None
    else:
        pins = {INF: Fraction(s)}
        for v, e in eps.items():
            if e == -1:
                rep = next((r for r in square_class_reps(v) if hilbert_symbol(r, delta, v) == -1), None)
                if rep is None:
                    return None
                pins[v] = Fraction(rep)
        from .numfield import FieldFactor
        QQ = FieldFactor.rational()
        v0 = find_checkpoint_place([QQ], [delta], avoid=set(places), bounds=bounds)
        lam = lemma_hs1([QQ], [delta], {v: [x] for v, x in pins.items()}, v0, bounds)[0][0]
    if not globally_equivalent(scale(f, lam), g):
        raise VerificationError("similarity factor failed re-verification")
    return lam
