"""Quaternion algebras over Q, skew-hermitian forms and the nonsplit construction.

Only relative Clifford data are tracked: the shift Res_{Z/Q} Cor_{F/Q}((a, d)_F)
per place, and its restriction to the set V of places where D ramifies while Z
splits, taken modulo the all-ones vector."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .arith import fmt, is_squarefree, nonzero, prime_support, squarefree_part
from .config import DEFAULT, Bounds
from .errors import (BoundExceededError, DomainError, InfeasibleError, PreconditionError,
                     VerificationError)
from .etale import EtaleInvolutionAlgebra, FElt, _elt_json, cor_support, cor_term, cor_term_by_symbols
from .localext import decompose, ext_class_vector, ext_hilbert_symbol
from .numfield import FieldFactor
from .places import INF, Place, class_vector, hilbert_symbol, is_local_square, square_class_reps
from .quadform import QuadraticForm
from .solvers import find_checkpoint_place, lemma_hs1, locally_square, prescribe_symbols

Quat = Tuple[Fraction, Fraction, Fraction, Fraction]     # scalar, i, j, k


# --- quaternion algebras ------------------------------------------------------------------

def ram_set(alpha, beta) -> List[Place]:
    """Places where the quaternion algebra (alpha, beta) does not split."""
    alpha, beta = nonzero(alpha), nonzero(beta)
    places = {INF, Place(2)} | {Place(p) for p in prime_support(alpha, beta)}
    return sorted(v for v in places if hilbert_symbol(alpha, beta, v) == -1)


@dataclass(frozen=True)
class QuaternionAlgebra:
    """i^2 = alpha, j^2 = beta, ij = k = -ji."""

    alpha: int
    beta: int

    def __post_init__(self):
        for x in (self.alpha, self.beta):
            if not isinstance(x, int) or x == 0 or not is_squarefree(abs(x)):
                raise DomainError(f"{x} is not a nonzero squarefree integer")

    @property
    def ram(self) -> List[Place]:
        return ram_set(self.alpha, self.beta)

    @property
    def is_split(self) -> bool:
        return not self.ram

    def ramified_at(self, v: Place) -> bool:
        return hilbert_symbol(self.alpha, self.beta, v) == -1

    def mul(self, x: Quat, y: Quat) -> Quat:
        a, b = self.alpha, self.beta
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return (a1 * a2 + a * b1 * b2 + b * c1 * c2 - a * b * d1 * d2,
                a1 * b2 + b1 * a2 - b * c1 * d2 + b * d1 * c2,
                a1 * c2 + c1 * a2 + a * b1 * d2 - a * d1 * b2,
                a1 * d2 + d1 * a2 + b1 * c2 - c1 * b2)

    def conj(self, x: Quat) -> Quat:
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x: Quat) -> Fraction:
        return self.mul(x, self.conj(x))[0]

    def pure_square(self, x: Quat) -> Fraction:
        """u^2 for pure u = x i + y j + z k: alpha x^2 + beta y^2 - alpha beta z^2."""
        _, p, q, r = x
        return self.alpha * p * p + self.beta * q * q - self.alpha * self.beta * r * r

    def polar(self, x: Quat, y: Quat) -> Fraction:
        """(uw + wu)/2 for pure u, w."""
        return (self.alpha * x[1] * y[1] + self.beta * x[2] * y[2]
                - self.alpha * self.beta * x[3] * y[3])

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "ram": [str(v) for v in self.ram]}


def pure(x, y, z) -> Quat:
    return (Fraction(0), Fraction(x), Fraction(y), Fraction(z))


def _squarefree_ints(limit: int):
    yield -1
    for n in range(2, limit + 1):
        if is_squarefree(n):
            yield n
            yield -n


def quaternion_from_ramset(R: Iterable, alpha: Optional[int] = None,
                           bounds: Bounds = DEFAULT) -> QuaternionAlgebra:
    """Some (alpha, beta) ramified exactly at R.  alpha is searched among small squarefree
    integers that are nonsquares at every place of R; beta comes from prescribing
    the symbols (alpha, beta)_v = -1 on R and +1 elsewhere."""
    R = sorted({Place.parse(v) for v in R})
    if len(R) % 2:
        raise InfeasibleError(f"a ramification set has even size, got {len(R)}", "brauer-parity")
    if not R:
        return QuaternionAlgebra(1, 1)
    cands = [alpha] if alpha is not None else _squarefree_ints(bounds.ramset_search)
    for a in cands:
        if any(is_local_square(a, v) for v in R):
            continue
        b = prescribe_symbols(a, {v: -1 for v in R}, bounds)
        b = squarefree_part(b)
        D = QuaternionAlgebra(a, b)
        if D.ram != R:
            raise VerificationError(f"({a}, {b}) is ramified at {D.ram}, not {R}")
        return D
    if alpha is not None:
        raise InfeasibleError(f"alpha = {alpha} is a square at some place of {R}", "alpha-square")
    raise BoundExceededError(f"no alpha with |alpha| <= {bounds.ramset_search} is a nonsquare on {R}",
                             bounds.ramset_search)


# --- skew-hermitian forms and their discriminants -----------------------------------------------

@dataclass(frozen=True)
class ZDescriptor:
    """The quadratic etale algebra Q[x]/(x^2 - disc); disc squarefree."""

    disc: int

    @property
    def is_split(self) -> bool:
        return self.disc == 1

    def is_field_at(self, v: Place) -> bool:
        return not is_local_square(self.disc, v)

    def to_json(self):
        return "split" if self.is_split else f"field(sqrt {self.disc})"


@dataclass(frozen=True)
class SkewHermitianForm:
    D: QuaternionAlgebra
    diag: Tuple[Quat, ...]

    def __post_init__(self):
        diag = []
        for q in self.diag:
            q = tuple(Fraction(c) for c in q)
            if len(q) == 3:
                q = (Fraction(0),) + q
            if len(q) != 4 or q[0] != 0:
                raise DomainError("diagonal entries must be pure quaternions (x, y, z)")
            if self.D.nrd(q) == 0:
                raise DomainError("diagonal entries must have nonzero reduced norm")
            diag.append(q)
        if not diag:
            raise DomainError("empty skew-hermitian form")
        object.__setattr__(self, "diag", tuple(diag))

    @property
    def m(self) -> int:
        return len(self.diag)

    @classmethod
    def from_json(cls, D: QuaternionAlgebra, data) -> "SkewHermitianForm":
        return cls(D, tuple(tuple(Fraction(str(c)) for c in q) for q in data))

    def to_json(self) -> dict:
        return {"quaternion": [self.D.alpha, self.D.beta],
                "diag": [[fmt(c) for c in q[1:]] for q in self.diag]}


def disc_involution(h: SkewHermitianForm) -> int:
    """Squarefree representative of (-1)^m prod Nrd(q_i)."""
    x = Fraction((-1) ** h.m)
    for q in h.diag:
        x *= h.D.nrd(q)
    return squarefree_part(x)


def clifford_center(h: SkewHermitianForm) -> ZDescriptor:
    return ZDescriptor(disc_involution(h))


def bad_set_V(h: SkewHermitianForm) -> List[Place]:
    """Places where D ramifies and the Clifford center splits."""
    Z = clifford_center(h)
    return [v for v in h.D.ram if not Z.is_field_at(v)]


def bad_set(D: QuaternionAlgebra, Z: ZDescriptor) -> List[Place]:
    return [v for v in D.ram if not Z.is_field_at(v)]


# --- explicit splitting at unramified places -------------------------------------------------

@dataclass
class SplitPlaceForm:
    place: Place
    splitting_field: int            # m with the splitting defined over Q(sqrt m) inside Q_v
    entries: List                   # diagonal entries over Q(sqrt m)
    form: QuadraticForm             # rational form with the same invariants over Q_v
    hasse_by_symbols: int           # Hasse invariant from the entries, symbols over Q(sqrt m)

    def to_json(self) -> dict:
        L = _field(self.splitting_field)
        return {"place": str(self.place), "splitting_field": self.splitting_field,
                "entries": [_elt_json(L, x) for x in self.entries],
                "local_model": self.form.to_json(), "hasse": self.hasse_by_symbols}


def _field(m: int) -> FieldFactor:
    return FieldFactor.rational() if m == 1 else FieldFactor.quadratic(m)


def _find_split_frame(D: QuaternionAlgebra, v: Place, bounds: Bounds):
    """Pure u, w with uw = -wu, u^2 a nonzero square in Q_v and w^2 != 0."""
    H = bounds.element_height
    while H <= 64:
        for x, y, z in product(range(-H, H + 1), repeat=3):
            u = pure(x, y, z)
            c = D.pure_square(u)
            if c == 0 or not is_local_square(c, v):
                continue
            # orthogonal complement of u under the polar form
            for w in (pure(-D.beta * y, D.alpha * x, 0), pure(D.beta * z, 0, x),
                      pure(0, D.alpha * z, y)):
                if any(w[1:]) and D.polar(u, w) == 0 and D.pure_square(w) != 0:
                    return u, w
        H *= 2
    raise BoundExceededError(f"no splitting frame found at {v}", 64)


def split_place_form(h: SkewHermitianForm, v, bounds: Bounds = DEFAULT) -> SplitPlaceForm:
    """The rank-2m quadratic form corresponding to h under D (x) Q_v = M_2(Q_v).

    With u^2 = c, w^2 = e, D is (c, e) and rho(u) = diag(s, -s), rho(w) = [[0, e], [1, 0]],
    s = sqrt c.  The form is the orthogonal sum of J rho(q_i), J = [[0, 1], [-1, 0]]."""
    v = Place.parse(v)
    D = h.D
    if D.ramified_at(v):
        raise DomainError(f"D is ramified at {v}")
    u, w = _find_split_frame(D, v, bounds)
    uw = D.mul(u, w)
    c, e = D.pure_square(u), D.pure_square(w)
    m = squarefree_part(c)
    L = _field(m)
    if m == 1:
        s = L.elt(_rsqrt(c))
    else:
        s = L.scale(L.gen(), _rsqrt(c / m))
    basis = [[u[k] for k in (1, 2, 3)], [w[k] for k in (1, 2, 3)], [uw[k] for k in (1, 2, 3)]]
    entries = []
    for q in h.diag:
        X, Y, Zc = linalg.solve(linalg.transpose(basis), [q[1], q[2], q[3]])
        # J rho(q) = [[Y - Z s, -X s], [-X s, -Y e - Z s e]]
        p00 = L.add(L.elt(Y), L.scale(s, -Zc))
        p01 = L.scale(s, -X)
        p11 = L.add(L.elt(-Y * e), L.scale(s, -Zc * e))
        det = L.add(L.mul(p00, p11), L.neg(L.mul(p01, p01)))
        if not L.is_zero(p00):
            entries += [p00, L.div(det, p00)]
        elif not L.is_zero(p11):
            entries += [p11, L.div(det, p11)]
        else:
            entries += [L.scale(p01, 2), L.scale(p01, -2)]
    w_place = next(x for x in decompose(L, v, 0) if x.local_degree == 1)
    reps = {class_vector(r, v): r for r in square_class_reps(v)}
    local = QuadraticForm([reps[ext_class_vector(L, x, w_place)] for x in entries])
    hasse = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            hasse *= ext_hilbert_symbol(L, entries[i], entries[j], w_place)
    if hasse != local.hasse(v):
        raise VerificationError(f"Hasse invariant of the splitting disagrees with its local model at {v}")
    return SplitPlaceForm(v, m, entries, local, hasse)


def _rsqrt(x: Fraction) -> Fraction:
    from .arith import rational_sqrt
    return rational_sqrt(x)


# --- relative Clifford invariants ----------------------------------------------------------------

@dataclass(frozen=True)
class CliffordShift:
    """Res_{Z/Q} Cor_{F/Q}((a, d)_F) place by place, as bits; 0 where Z_v is a field."""

    bits: Tuple[Tuple[Place, int], ...]
    z_split: Tuple[Tuple[Place, bool], ...]

    def bit(self, v: Place) -> int:
        return dict(self.bits).get(v, 0)

    def component(self, v: Place) -> Tuple[int, ...]:
        """The class in Br(Z (x) Q_v)_2: one bit per factor of Z_v."""
        split = dict(self.z_split).get(v, True)
        b = self.bit(v)
        return (b, b) if split else (0,)

    def support(self) -> List[Place]:
        return [v for v, b in self.bits if b]

    def __xor__(self, other: "CliffordShift") -> "CliffordShift":
        places = sorted(set(dict(self.bits)) | set(dict(other.bits)))
        split = dict(other.z_split)
        split.update(dict(self.z_split))
        return CliffordShift(tuple((v, self.bit(v) ^ other.bit(v)) for v in places),
                             tuple(sorted(split.items())))

    def to_json(self) -> dict:
        return {str(v): list(self.component(v)) for v, _ in self.bits}


def clifford_shift(F: Sequence, a, d, Z: ZDescriptor, places: Iterable = ()) -> CliffordShift:
    A = EtaleInvolutionAlgebra(F, d)
    a = A.f_elt(a)
    vs = sorted(set(cor_support(A, a)) | {Place.parse(v) for v in places})
    bits, split = [], []
    for v in vs:
        zs = not Z.is_field_at(v)
        b = 1 if (zs and cor_term(A, a, v) == -1) else 0
        bits.append((v, b))
        split.append((v, zs))
    return CliffordShift(tuple(bits), tuple(split))


@dataclass(frozen=True)
class DeltaVector:
    """Bits on V, compared modulo the all-ones vector."""

    V_set: Tuple[Place, ...]
    bits: Tuple[int, ...]

    def normalized(self) -> Tuple[int, ...]:
        if self.bits and self.bits[0]:
            return tuple(1 - b for b in self.bits)
        return self.bits

    def is_zero(self) -> bool:
        return not any(self.normalized())

    def __eq__(self, other):
        return (isinstance(other, DeltaVector) and self.V_set == other.V_set
                and self.normalized() == other.normalized())

    def __hash__(self):
        return hash((self.V_set, self.normalized()))

    def __add__(self, other: "DeltaVector") -> "DeltaVector":
        if self.V_set != other.V_set:
            raise DomainError("delta vectors on different sets")
        return DeltaVector(self.V_set, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    @classmethod
    def all_ones(cls, V_set) -> "DeltaVector":
        V = tuple(sorted(V_set))
        return cls(V, tuple(1 for _ in V))

    def to_json(self) -> dict:
        return {"V": [str(v) for v in self.V_set], "bits": list(self.bits),
                "class": list(self.normalized())}


def delta_difference(shift: CliffordShift, V_set: Iterable) -> DeltaVector:
    V = tuple(sorted({Place.parse(v) for v in V_set}))
    return DeltaVector(V, tuple(shift.bit(v) for v in V))


def delta_classes(V_set: Iterable) -> List[DeltaVector]:
    """One representative per class of F2^V modulo the all-ones vector."""
    V = tuple(sorted({Place.parse(v) for v in V_set}))
    seen = {}
    for bits in product((0, 1), repeat=len(V)):
        x = DeltaVector(V, bits)
        seen.setdefault(x, x)
    return list(seen)


# --- conditions (*) and (#) ----------------------------------------------------------------------

def check_star(F: Sequence, d, Z: ZDescriptor, avoid: Iterable = (),
               bounds: Bounds = DEFAULT) -> Place:
    """A place v0 outside ``avoid`` where every nonsquare d_j stays a nonsquare and Z
    stays a field (if it is one)."""
    A = EtaleInvolutionAlgebra(F, d)
    auto = len(A.factors) == 1 and A.factors[0].degree % 2 == 1
    try:
        return find_checkpoint_place(A.factors, A.d, Z_is_field=not Z.is_split,
                                     Z_disc=None if Z.is_split else Z.disc,
                                     avoid=avoid, bounds=bounds)
    except InfeasibleError:
        if auto:
            raise AssertionError("condition (*) must hold for an odd-degree field")
        raise


def sharp_failures(F: Sequence, d, D: QuaternionAlgebra, Z: ZDescriptor) -> List[Place]:
    """Places of ram(D) with Z split where every component of d is a local square."""
    A = EtaleInvolutionAlgebra(F, d)
    out = []
    for v in D.ram:
        if Z.is_field_at(v):
            continue
        if all(locally_square(Fj, dj, v, j) for j, (Fj, dj) in enumerate(zip(A.factors, A.d))):
            out.append(v)
    return out


def check_sharp(F: Sequence, d, D: QuaternionAlgebra, Z: ZDescriptor) -> bool:
    return not sharp_failures(F, d, D, Z)


def locally_embeddable_at_ram(F: Sequence, d, D: QuaternionAlgebra) -> List[Place]:
    """Ramified places where E (x) Q_v cannot sit inside M_m(D_v): some place w | v of
    odd local degree has d_w a square (then D stays division over F_w)."""
    A = EtaleInvolutionAlgebra(F, d)
    bad = []
    for v in D.ram:
        for j, (Fj, dj) in enumerate(zip(A.factors, A.d)):
            if any(w.local_degree % 2 == 1 and _ext_square(Fj, dj, w) for w in decompose(Fj, v, j)):
                bad.append(v)
                break
    return bad


def _ext_square(Fj: FieldFactor, x, w) -> bool:
    return not any(ext_class_vector(Fj, x, w))


# --- the nonsplit construction --------------------------------------------------------------------

@dataclass
class NonsplitCertificate:
    D: QuaternionAlgebra
    Z: ZDescriptor
    factors: Tuple[FieldFactor, ...]
    d: FElt
    a: FElt
    pins: Dict[Place, FElt]          # corrected pins c_v
    corrections: Dict[Place, FElt]   # b_v at twist places
    v0: Place

    def verify(self) -> dict:
        """Recompute every claim from scratch; raise VerificationError on any failure."""
        A = EtaleInvolutionAlgebra(self.factors, self.d)
        S = set(self.pins)
        # (i) a / c_v is a local square at each pinned place
        for v, c in self.pins.items():
            for j, Fj in enumerate(A.factors):
                if not locally_square(Fj, Fj.div(self.a[j], c[j]), v, j):
                    raise VerificationError(f"a misses the pinned class at {v}")
        # (ii) the corestriction is trivial outside S and v0
        places = sorted(set(cor_support(A, self.a, *self.pins.values())) | S | {self.v0})
        cor = {v: cor_term_by_symbols(A, self.a, v) for v in places}
        for v in places:
            if v not in S and v != self.v0 and cor[v] != 1:
                raise VerificationError(f"corestriction of (a, d) is nontrivial at {v}")
        if _prod(cor.values()) != 1:
            raise VerificationError("the corestriction violates the product formula")
        # (iii) the relative Clifford class agrees with the corrected local data on V
        V = bad_set(self.D, self.Z)
        got = delta_difference(clifford_shift(self.factors, self.a, self.d, self.Z, places), V)
        want = DeltaVector(tuple(V), tuple(
            clifford_shift(self.factors, self.pins[v], self.d, self.Z, [v]).bit(v) if v in self.pins else 0
            for v in got.V_set))
        diff = got + want
        if not diff.is_zero():
            raise VerificationError("the delta vector of a differs from the local data")
        # (iv) where Z splits, the bits off V and v0 match the pins too
        for v in places:
            if v in S and not self.Z.is_field_at(v):
                if cor[v] != cor_term_by_symbols(A, self.pins[v], v):
                    raise VerificationError(f"corestriction at {v} differs from the pin")
        return {"pinned_classes": True, "cor_trivial_off_S": True,
                "delta_difference": diff.to_json(), "checkpoint": str(self.v0)}

    def to_json(self) -> dict:
        A = EtaleInvolutionAlgebra(self.factors, self.d)
        el = lambda x: [_elt_json(Fj, c) for Fj, c in zip(A.factors, x)]
        return {"a": el(self.a), "checkpoint": str(self.v0), "Z": self.Z.to_json(),
                "quaternion": self.D.to_json(),
                "pins": {str(v): el(x) for v, x in sorted(self.pins.items())},
                "corrections": {str(v): el(x) for v, x in sorted(self.corrections.items())},
                "checks": self.verify()}


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def nonsplit_global_a(D: QuaternionAlgebra, m: int, F: Sequence, d, local_pins: Dict,
                      twist_places: Iterable = (), Z: ZDescriptor = ZDescriptor(1),
                      bounds: Bounds = DEFAULT) -> Tuple[FElt, NonsplitCertificate]:
    """A global a in F^x realizing the local data, for A = M_m(D).

    local_pins maps each place of ram(D), infinity and the twist places to a_v.
    At a twist place (where the local Clifford classes differ by Res [A (x) Q_v])
    the pin is multiplied by a b_v with nontrivial corestriction."""
    from .split_embedding import local_flipper
    A = EtaleInvolutionAlgebra(F, d)
    if A.dim_F != m:
        raise DomainError(f"F has degree {A.dim_F}, expected m = {m}")
    fails = sharp_failures(A.factors, A.d, D, Z)
    if fails:
        raise PreconditionError(f"condition (#) fails at {', '.join(map(str, fails))}")
    twist = {Place.parse(v) for v in twist_places}
    pins = {Place.parse(v): A.f_elt(x) for v, x in local_pins.items()}
    need = set(D.ram) | {INF} | twist
    missing = sorted(need - set(pins))
    if missing:
        raise PreconditionError(f"missing local pins at {', '.join(map(str, missing))}")
    corrections = {}
    for v in sorted(twist):
        if not D.ramified_at(v) or Z.is_field_at(v):
            continue           # Res [A (x) Q_v] vanishes: no correction needed
        b = local_flipper(A, v, bounds)
        if b is None:
            raise AssertionError(f"condition (#) holds at {v} but no flipper exists")
        corrections[v] = b
        pins[v] = A.f_mul(pins[v], b)
    try:
        v0 = check_star(A.factors, A.d, Z, avoid=sorted(pins), bounds=bounds)
    except (InfeasibleError, BoundExceededError) as exc:
        raise PreconditionError(f"condition (*) fails: {exc}")
    a = lemma_hs1(A.factors, A.d, pins, v0, bounds)
    cert = NonsplitCertificate(D, Z, tuple(A.factors), A.d, a, pins, corrections, v0)
    cert.verify()
    return a, cert
