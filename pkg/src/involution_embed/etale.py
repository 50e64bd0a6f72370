"""Etale algebras with involution in normal form E = F[x]/(x^2 - d), sigma(x) = -x.

An element of F is a tuple with one coordinate tuple per factor; an element of E
is a tuple of pairs (y0, y1) meaning y0 + y1 x on each factor."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Sequence, Tuple

from . import linalg
from .arith import fmt
from .errors import DomainError, PreconditionError
from .localext import decompose, ext_hilbert_symbol
from .numfield import Elt, FieldFactor, parse_factor
from .places import Place
from .quadform import QuadraticForm, diagonalize

FElt = Tuple[Elt, ...]
EElt = Tuple[Tuple[Elt, Elt], ...]


@dataclass(frozen=True)
class EtaleInvolutionAlgebra:
    factors: Tuple[FieldFactor, ...]
    d: FElt

    def __init__(self, factors: Sequence, d: Sequence):
        fs = tuple(parse_factor(f) for f in factors)
        if not fs:
            raise DomainError("an etale algebra needs at least one factor")
        if len(d) != len(fs):
            raise DomainError(f"d needs {len(fs)} components")
        dd = tuple(Fj.elt(x) for Fj, x in zip(fs, d))
        if any(Fj.is_zero(x) for Fj, x in zip(fs, dd)):
            raise DomainError("every component of d must be nonzero")
        object.__setattr__(self, "factors", fs)
        object.__setattr__(self, "d", dd)

    @classmethod
    def from_json(cls, spec: dict) -> "EtaleInvolutionAlgebra":
        if not isinstance(spec, dict):
            raise DomainError("etale algebra spec must be an object")
        extra = set(spec) - {"factors", "d"}
        if extra:
            raise DomainError(f"unknown fields in etale spec: {sorted(extra)}")
        try:
            return cls(spec["factors"], spec["d"])
        except KeyError as exc:
            raise DomainError(f"etale spec missing {exc}") from exc

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors],
                "d": [_elt_json(Fj, x) for Fj, x in zip(self.factors, self.d)]}

    @property
    def dim_F(self) -> int:
        return sum(f.degree for f in self.factors)

    @property
    def dim(self) -> int:
        return 2 * self.dim_F

    def fixed_dimension(self) -> int:
        """dim E^sigma, computed from the action of sigma on the rational basis."""
        return sum(1 for _, part in self.basis() if part == 0)

    def basis(self) -> List[Tuple[int, int]]:
        """Rational basis of E as (factor-basis index, 0 for b_k / 1 for b_k x)."""
        out = []
        k = 0
        for Fj in self.factors:
            for i in range(Fj.degree):
                out.append((k + i, 0))
            for i in range(Fj.degree):
                out.append((k + i, 1))
            k += Fj.degree
        return out

    # --- elements ----------------------------------------------------------------

    def f_elt(self, x) -> FElt:
        if len(x) != len(self.factors):
            raise DomainError(f"element of F needs {len(self.factors)} components")
        return tuple(Fj.elt(c) for Fj, c in zip(self.factors, x))

    def f_one(self) -> FElt:
        return tuple(Fj.one() for Fj in self.factors)

    def f_mul(self, a: FElt, b: FElt) -> FElt:
        return tuple(Fj.mul(x, y) for Fj, x, y in zip(self.factors, a, b))

    def f_inv(self, a: FElt) -> FElt:
        return tuple(Fj.inv(x) for Fj, x in zip(self.factors, a))

    def f_invertible(self, a: FElt) -> bool:
        return all(not Fj.is_zero(x) for Fj, x in zip(self.factors, a))

    def e_elt(self, y) -> EElt:
        if len(y) != len(self.factors):
            raise DomainError(f"element of E needs {len(self.factors)} components")
        return tuple((Fj.elt(p[0]), Fj.elt(p[1])) for Fj, p in zip(self.factors, y))

    def e_mul(self, y: EElt, z: EElt) -> EElt:
        out = []
        for Fj, dj, (y0, y1), (z0, z1) in zip(self.factors, self.d, y, z):
            c0 = Fj.add(Fj.mul(y0, z0), Fj.mul(dj, Fj.mul(y1, z1)))
            c1 = Fj.add(Fj.mul(y0, z1), Fj.mul(y1, z0))
            out.append((c0, c1))
        return tuple(out)

    def sigma(self, y: EElt) -> EElt:
        return tuple((y0, Fj.neg(y1)) for Fj, (y0, y1) in zip(self.factors, y))

    def e_norm(self, y: EElt) -> FElt:
        """N_{E/F}(y) = y sigma(y)."""
        return tuple(c0 for c0, _ in self.e_mul(y, self.sigma(y)))

    def e_invertible(self, y: EElt) -> bool:
        return self.f_invertible(self.e_norm(y))

    def e_inv(self, y: EElt) -> EElt:
        n = self.e_norm(y)
        if not self.f_invertible(n):
            raise DomainError("element of E is not invertible")
        ninv = self.f_inv(n)
        s = self.sigma(y)
        return tuple((Fj.mul(s0, ni), Fj.mul(s1, ni)) for Fj, (s0, s1), ni in zip(self.factors, s, ninv))

    def e_one(self) -> EElt:
        return tuple((Fj.one(), Fj.elt(0)) for Fj in self.factors)

    def e_gen(self) -> EElt:
        return tuple((Fj.elt(0), Fj.one()) for Fj in self.factors)

    def is_e_one(self, y: EElt) -> bool:
        return y == self.e_one()


def _elt_json(Fj: FieldFactor, x: Elt):
    return fmt(x[0]) if Fj.is_rational(x) else [fmt(c) for c in x]


# --- trace forms --------------------------------------------------------------------

def _trace_matrix(Fj: FieldFactor, c: Elt) -> linalg.Matrix:
    """T(c)[k][l] = Tr_{F_j/Q}(c b_k b_l) on the power basis."""
    n = Fj.degree
    basis = [tuple(Fraction(int(i == k)) for i in range(n)) for k in range(n)]
    return [[Fj.trace(Fj.mul(c, Fj.mul(bk, bl))) for bl in basis] for bk in basis]


def trace_form_gram(A: EtaleInvolutionAlgebra, a) -> linalg.Matrix:
    """Gram matrix of b_a(v, w) = Tr_{E/Q}(a v sigma(w)) on the basis of E.

    With v = y0 + y1 x and w = z0 + z1 x this is Tr_{F/Q}(2 a (y0 z0 - d y1 z1)),
    i.e. 2 T(a) + (-2) T(a d) factor by factor."""
    a = A.f_elt(a)
    if not A.f_invertible(a):
        raise DomainError("the trace-form parameter must be invertible")
    blocks = []
    for Fj, aj, dj in zip(A.factors, a, A.d):
        t1 = _trace_matrix(Fj, aj)
        t2 = _trace_matrix(Fj, Fj.mul(aj, dj))
        blocks.append([[2 * x for x in r] for r in t1])
        blocks.append([[-2 * x for x in r] for r in t2])
    return linalg.block_diag(*blocks)


def trace_form(A: EtaleInvolutionAlgebra, a=None) -> QuadraticForm:
    if a is None:
        a = A.f_one()
    return diagonalize(trace_form_gram(A, a))


def trace_form_signature(A: EtaleInvolutionAlgebra, a=None) -> Tuple[int, int]:
    """Signature of q_a from the real embeddings of F alone.

    A real embedding rho contributes (1, 1) if rho(d) > 0 and 2 copies of the sign
    of rho(a) otherwise; a complex pair contributes (2, 2)."""
    a = A.f_one() if a is None else A.f_elt(a)
    p = q = 0
    for Fj, aj, dj in zip(A.factors, a, A.d):
        embs = Fj.real_embeddings
        for e in embs:
            if Fj.real_sign(dj, e) > 0:
                p, q = p + 1, q + 1
            elif Fj.real_sign(aj, e) > 0:
                p += 2
            else:
                q += 2
        ncomplex = (Fj.degree - len(embs)) // 2
        p, q = p + 2 * ncomplex, q + 2 * ncomplex
    return (p, q)


def cor_term(A: EtaleInvolutionAlgebra, a, v: Place) -> int:
    """Cor_{F_v/Q_v}(a, d) realized as h_v(q_a) h_v(q_1)."""
    return trace_form(A, a).hasse(v) * trace_form(A).hasse(v)


def cor_term_by_symbols(A: EtaleInvolutionAlgebra, a, v: Place) -> int:
    """The same corestriction as a product of local symbols (a_j, d_j)_w, w | v.

    Corestriction is an isomorphism on the 2-torsion of local Brauer groups, so
    it keeps each local invariant."""
    a = A.f_elt(a)
    out = 1
    for j, (Fj, aj, dj) in enumerate(zip(A.factors, a, A.d)):
        for w in decompose(Fj, v, j):
            out *= ext_hilbert_symbol(Fj, aj, dj, w)
    return out


def cor_support(A: EtaleInvolutionAlgebra, *elts) -> List[Place]:
    """Places where some cor_term of the given elements can be nontrivial."""
    from .localext import relevant_base_places
    out = set()
    for j, Fj in enumerate(A.factors):
        comps = [A.d[j]] + [A.f_elt(x)[j] for x in elts]
        out |= set(relevant_base_places(Fj, *comps))
    return sorted(out)


# --- Hilbert 90 -------------------------------------------------------------------------

def hilbert90_solve(A: EtaleInvolutionAlgebra, x) -> EElt:
    """y in E^x with x = y sigma(y)^-1, for x with x sigma(x) = 1.

    y = theta + x sigma(theta) works for every theta making it invertible; theta = 1
    gives y = 1 + x, and theta = x-generator covers x = -1."""
    x = A.e_elt(x)
    if not all(Fj.is_zero(c1) and c0 == Fj.one()
               for Fj, (c0, c1) in zip(A.factors, A.e_mul(x, A.sigma(x)))):
        raise PreconditionError("Hilbert 90 needs x sigma(x) = 1")
    out = []
    for j, Fj in enumerate(A.factors):
        sub = EtaleInvolutionAlgebra([Fj], [A.d[j]])
        xj = (x[j],)
        for theta in _thetas(Fj):
            y = _h90_candidate(sub, xj, theta)
            if sub.e_invertible(y):
                out.append(y[0])
                break
        else:
            raise AssertionError("no invertible Hilbert 90 candidate")
    y = tuple(out)
    if A.e_mul(y, A.e_inv(A.sigma(y))) != x:
        raise AssertionError("Hilbert 90 solution failed re-verification")
    return y


def _thetas(Fj: FieldFactor):
    yield (Fj.one(), Fj.elt(0))
    yield (Fj.elt(0), Fj.one())
    for s, t in product(range(1, 4), repeat=2):
        yield (Fj.elt(s), Fj.elt(t))


def _h90_candidate(sub: EtaleInvolutionAlgebra, x: EElt, theta) -> EElt:
    th = (theta,)
    return tuple((Fj.add(p0, q0), Fj.add(p1, q1)) for Fj, (p0, p1), (q0, q1)
                 in zip(sub.factors, th, sub.e_mul(x, sub.sigma(th))))


# --- plain embedding criteria --------------------------------------------------------------

def splits_csa(E_factors: Sequence, D_ram: Iterable, n: int) -> Tuple[bool, List[dict]]:
    """Does every factor E_j split the quaternion algebra with ramification D_ram?

    E_j splits D iff every local degree of E_j over a ramified place is even."""
    fs = [parse_factor(f) for f in E_factors]
    if sum(f.degree for f in fs) != n:
        raise DomainError(f"factor degrees add up to {sum(f.degree for f in fs)}, not {n}")
    ram = sorted(Place.parse(v) for v in D_ram)
    if ram and n % 2:
        raise DomainError("a quaternion division algebra needs even n")
    report, ok = [], True
    for j, Fj in enumerate(fs):
        bad = [str(v) for v in ram if any(w.local_degree % 2 for w in decompose(Fj, v, j))]
        report.append({"factor": str(Fj), "splits": not bad, "odd_local_degree_at": bad})
        ok = ok and not bad
    return ok, report


# --- real sign patterns -----------------------------------------------------------------------

def factor_sign_reps(Fj: FieldFactor) -> List[Elt]:
    """Elements of F_j realizing every sign vector at its real embeddings."""
    if Fj.kind == "Q":
        return [Fj.elt(1), Fj.elt(-1)]
    if Fj.kind == "quad":
        if Fj.m < 0:
            return [Fj.one()]
        return [Fj.one(), Fj.elt(-1), Fj.gen(), Fj.neg(Fj.gen())]
    embs = Fj.real_embeddings
    if not embs:
        return [Fj.one()]
    found = {}
    for c in product(range(-3, 4), repeat=4):
        x = tuple(Fraction(t) for t in c)
        if Fj.is_zero(x):
            continue
        pat = tuple(Fj.real_sign(x, e) for e in embs)
        if 0 in pat or pat in found:
            continue
        found[pat] = x
        if len(found) == 2 ** len(embs):
            break
    return [found[k] for k in sorted(found, reverse=True)]


def real_sign_patterns(F: Sequence) -> List[FElt]:
    fs = [parse_factor(f) for f in F]
    return [tuple(c) for c in product(*(factor_sign_reps(Fj) for Fj in fs))]
