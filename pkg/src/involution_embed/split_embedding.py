"""Embeddings (E, sigma) -> (M_n(Q), tau) with tau orthogonal.

tau is adjoint to a quadratic form q (the target).  An embedding exists iff some
trace form q_a, a in F^x, is equivalent to q.  Locally this is decided by the
determinant, the Hasse invariant and the signature; globally the engine builds a
through the checkpoint construction, falls back to a bounded F2 witness search,
and finally tries the parity certificate for the two-prime family where the
local-global principle fails."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence

from . import f2
from .arith import factor, fmt, is_prime, legendre, primes_from
from .config import DEFAULT, Bounds
from .errors import (BoundExceededError, DomainError, InfeasibleError, PreconditionError,
                     VerificationError)
from .etale import (EtaleInvolutionAlgebra, FElt, _elt_json, cor_support, cor_term,
                    real_sign_patterns, trace_form, trace_form_signature)
from .numfield import FieldFactor
from .places import INF, Place, hilbert_symbol, is_local_square, square_class_reps
from .quadform import (QuadraticForm, as_form, build_form_with_invariants, globally_equivalent,
                       represents)
from .solvers import diamond_condition, find_checkpoint_place, lemma_hs1, locally_square


@dataclass(frozen=True)
class SplitEmbeddingProblem:
    """Target form q of rank dim E (+1 when a trivially-involuted Q factor is split off)."""

    target: QuadraticForm
    source: EtaleInvolutionAlgebra
    extra_rational: bool = False     # source is E' x Q with the identity on Q

    def __post_init__(self):
        object.__setattr__(self, "target", as_form(self.target))
        n = self.source.dim + (1 if self.extra_rational else 0)
        if self.target.rank != n:
            raise DomainError(f"target rank {self.target.rank} differs from dim E = {n}")

    @property
    def rank(self) -> int:
        return self.target.rank


@dataclass
class LocalResult:
    place: Place
    ok: bool
    a_v: Optional[FElt] = None
    reason: str = ""

    def to_json(self, A: EtaleInvolutionAlgebra) -> dict:
        out = {"status": "ok" if self.ok else "fail"}
        if self.a_v is not None:
            out["a_v"] = [_elt_json(Fj, x) for Fj, x in zip(A.factors, self.a_v)]
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class ObstructionReport:
    verdict: str                      # embeds | locally_obstructed | globally_obstructed | undecided
    source: EtaleInvolutionAlgebra
    witness: Optional[FElt] = None
    place: Optional[Place] = None
    reason: str = ""
    certificate: Optional[dict] = None
    local_table: Dict[Place, LocalResult] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        A = self.source
        out = {"verdict": self.verdict,
               "local": {str(v): r.to_json(A) for v, r in sorted(self.local_table.items())}}
        if self.witness is not None:
            out["witness"] = [_elt_json(Fj, x) for Fj, x in zip(A.factors, self.witness)]
        if self.place is not None:
            out["place"] = str(self.place)
        if self.reason:
            out["reason"] = self.reason
        if self.certificate is not None:
            out["certificate"] = self.certificate
        out.update(self.details)
        return out


# --- local tests ----------------------------------------------------------------------------

def _cor(A: EtaleInvolutionAlgebra, a: FElt, v: Place) -> int:
    return cor_term(A, a, v)


def _flipper_candidates(A: EtaleInvolutionAlgebra, v: Place, height: int):
    one = A.f_one()
    reps = square_class_reps(v)
    for j, Fj in enumerate(A.factors):
        for r in reps:
            if r != 1:
                yield one[:j] + (Fj.elt(r),) + one[j + 1:]
    for j, Fj in enumerate(A.factors):
        if Fj.kind != "quad":
            continue
        for x in range(-height, height + 1):
            for y in range(1, height + 1):
                if gcd(x, y) == 1:
                    yield one[:j] + ((Fraction(x), Fraction(y)),) + one[j + 1:]


def local_flipper(A: EtaleInvolutionAlgebra, v: Place, bounds: Bounds = DEFAULT) -> Optional[FElt]:
    """An a in F^x with Cor_v(a, d) = -1, or None when every d_j is a square over v."""
    if all(locally_square(Fj, dj, v, j) for j, (Fj, dj) in enumerate(zip(A.factors, A.d))):
        return None
    height = bounds.element_height
    while height <= 8 * bounds.element_height:
        for a in _flipper_candidates(A, v, height):
            if A.f_invertible(a) and _cor(A, a, v) == -1:
                return a
        height *= 2
    raise BoundExceededError(f"no corestriction flipper found at {v}", 8 * bounds.element_height)


def local_embed_test(P: SplitEmbeddingProblem, v: Place, bounds: Bounds = DEFAULT) -> LocalResult:
    """Is there a_v in (F (x) Q_v)^x with q_{a_v} equivalent to the target over Q_v?"""
    if P.extra_rational:
        raise PreconditionError("reduce odd-rank problems with odd_reduction first")
    A, q = P.source, P.target
    qt = trace_form(A)
    if v.is_infinite:
        want = q.signature()
        for a in real_sign_patterns(A.factors):
            if trace_form_signature(A, a) == want:
                return LocalResult(v, True, a)
        return LocalResult(v, False, None, "no sign pattern of F gives the target signature")
    if not is_local_square(qt.det() / q.det(), v):
        return LocalResult(v, False, None, "determinant class mismatch")
    if qt.hasse(v) == q.hasse(v):
        return LocalResult(v, True, A.f_one())
    a = local_flipper(A, v, bounds)
    if a is None:
        return LocalResult(v, False, None,
                           "Hasse invariants differ and every component of d is a local square")
    return LocalResult(v, True, a)


def local_places(P: SplitEmbeddingProblem) -> List[Place]:
    """Places outside which the local test passes automatically (given equal det classes)."""
    A = P.source
    return sorted(set(cor_support(A)) | set(P.target.support()) | set(trace_form(A).support()))


# --- odd rank ---------------------------------------------------------------------------------

@dataclass
class OddReduction:
    alpha: Fraction
    reduced: SplitEmbeddingProblem
    represented: bool


def odd_reduction(P: SplitEmbeddingProblem, bounds: Bounds = DEFAULT) -> OddReduction:
    """Split <alpha> off the target, alpha = d(q) / d(q'_1), q' the trace form of E'."""
    if not P.extra_rational:
        raise PreconditionError("odd reduction needs a source of the form E' x Q")
    A, q = P.source, P.target
    qp = trace_form(A)
    alpha = Fraction(_sqf(q.det() / qp.det()))
    if not represents(q, alpha, "global"):
        return OddReduction(alpha, None, False)
    n = q.rank - 1
    dprime = q.det() / alpha
    places = sorted(set(q.support()) | {Place(p) for p in factor(alpha.numerator)})
    hasse = {v: q.hasse(v) * hilbert_symbol(dprime, alpha, v) for v in places if v.is_finite}
    pos, neg = q.signature()
    sig = (pos - 1, neg) if alpha > 0 else (pos, neg - 1)
    qprime = build_form_with_invariants(n, dprime, hasse, sig, bounds)
    if not globally_equivalent(qprime + QuadraticForm([alpha]), q):
        raise VerificationError("Witt cancellation produced a wrong complement")
    return OddReduction(alpha, SplitEmbeddingProblem(qprime, A), True)


def _sqf(x: Fraction) -> int:
    from .arith import squarefree_part
    return squarefree_part(x)


# --- global engine -------------------------------------------------------------------------------

def global_embed(P: SplitEmbeddingProblem, bounds: Bounds = DEFAULT) -> ObstructionReport:
    if P.extra_rational:
        return _global_embed_odd(P, bounds)
    A, q = P.source, P.target
    places = local_places(P)
    table = {v: local_embed_test(P, v, bounds) for v in places}
    for v in places:
        if not table[v].ok:
            return ObstructionReport("locally_obstructed", A, place=v, reason=table[v].reason,
                                     local_table=table)
    qt = trace_form(A)
    V = [INF] + [v for v in places if v.is_finite and qt.hasse(v) != q.hasse(v)]
    pins = {v: table[v].a_v for v in V}
    diamond = diamond_condition(A.factors, A.d)
    details = {"diamond": diamond, "bad_places": [str(v) for v in V]}
    if diamond != "holds":
        # the span search is cheap; the checkpoint scan may have to run to its cap
        a, info = witness_search(P, table, bounds)
        details["search"] = info
        if a is not None:
            return _embeds(P, a, table, details)
    v0 = None
    try:
        v0 = find_checkpoint_place(A.factors, A.d, avoid=V, bounds=bounds)
    except (InfeasibleError, BoundExceededError) as exc:
        details["checkpoint_error"] = str(exc)
    if v0 is not None:
        details["checkpoint"] = str(v0)
        a = lemma_hs1(A.factors, A.d, pins, v0, bounds)
        return _embeds(P, a, table, details)
    if "search" not in details:
        a, info = witness_search(P, table, bounds)
        details["search"] = info
        if a is not None:
            return _embeds(P, a, table, details)
    cert = _try_two_prime_certificate(P, V)
    if cert is not None:
        return ObstructionReport("globally_obstructed", A, certificate=cert, local_table=table,
                                 details=details)
    details["bound"] = bounds.witness_candidates
    return ObstructionReport("undecided", A, reason="no witness within the search bound",
                             local_table=table, details=details)


def _embeds(P, a, table, details) -> ObstructionReport:
    if not globally_equivalent(trace_form(P.source, a), P.target):
        raise VerificationError("witness a does not give a trace form equivalent to the target")
    return ObstructionReport("embeds", P.source, witness=a, local_table=table, details=details)


def _global_embed_odd(P: SplitEmbeddingProblem, bounds: Bounds) -> ObstructionReport:
    A, q = P.source, P.target
    red = odd_reduction(P, bounds)
    if not red.represented:
        places = sorted(set(q.support()) | {Place(p) for p in factor(red.alpha.numerator)})
        bad = next(v for v in places if not represents(q, red.alpha, v))
        return ObstructionReport("locally_obstructed", A, place=bad,
                                 reason=f"the target does not represent alpha = {fmt(red.alpha)}",
                                 details={"alpha": fmt(red.alpha)})
    rep = global_embed(red.reduced, bounds)
    rep.details["alpha"] = fmt(red.alpha)
    rep.details["reduced_target"] = red.reduced.target.to_json()
    return rep


# --- bounded witness search -----------------------------------------------------------------------

def _safe_for(A: EtaleInvolutionAlgebra, j: int, ell: int) -> bool:
    Fj = A.factors[j]
    return locally_square(Fj, A.d[j], Place(ell), j)


def _norm_element(Fj, n: int, height: int):
    """x + y sqrt(m) with y > 0 and norm +-n, searched in a box of the given height."""
    for h in range(1, height + 1):
        for y in range(1, h + 1):
            for x in (h, -h) if y < h else range(-h, h + 1):
                if abs(x * x - Fj.m * y * y) == n:
                    return (Fraction(x), Fraction(y))
    return None


def _prime_element(Fj, p: int, height: int):
    """An element of norm +-p when p is not inert in F_j (and one lies in the box)."""
    if p != 2 and Fj.m % p and legendre(Fj.m, p) != 1:
        return None
    if p == 2 and Fj.m % 8 == 5:
        return None
    return _norm_element(Fj, p, 4 * height)


def witness_search(P: SplitEmbeddingProblem, table: Dict[Place, LocalResult], bounds: Bounds = DEFAULT):
    """Look for a in the span of a generator pool with q_a equivalent to the target.

    The span of k generators has 2^k elements; k is capped so that at most
    ``bounds.witness_candidates`` candidates are covered.  Returns (a or None, info)."""
    A, q = P.source, P.target
    qt = trace_form(A)
    S = [v for v in table if v.is_finite]
    Sp = {v.p for v in S}
    kmax = max(bounds.witness_candidates.bit_length() - 1, 1)
    one = A.f_one()
    gens: List[FElt] = []

    def add(j, x):
        g = one[:j] + (A.factors[j].elt(x),) + one[j + 1:]
        if g not in gens and len(gens) < kmax:
            gens.append(g)

    for j, Fj in enumerate(A.factors):
        add(j, -1)
    for j, Fj in enumerate(A.factors):
        if Fj.kind == "quad":
            add(j, Fj.gen())
        for p in sorted(Sp):
            add(j, p)
    # a unit and prime elements above the primes of S: their classes are not rational
    for j, Fj in enumerate(A.factors):
        if Fj.kind == "quad":
            if Fj.m > 0:
                u = _norm_element(Fj, 1, 8 * bounds.element_height)
                if u is not None:
                    add(j, u)
            for p in sorted(Sp):
                pi = _prime_element(Fj, p, bounds.element_height)
                if pi is not None:
                    add(j, pi)
    ell_iter = primes_from(1)
    for ell in ell_iter:
        if len(gens) >= kmax or ell > 10 ** 5:
            break
        if ell in Sp:
            continue
        for j in range(len(A.factors)):
            if _safe_for(A, j, ell):
                add(j, ell)
    # rows: corestriction bits at S, sign bits at real embeddings where d_j < 0
    rows, rhs = [], []
    for v in sorted(S):
        mask = 0
        for i, g in enumerate(gens):
            if _cor(A, g, v) == -1:
                mask |= 1 << i
        rows.append(mask)
        rhs.append(0 if qt.hasse(v) == q.hasse(v) else 1)
    a_inf = table[INF].a_v
    for j, (Fj, dj) in enumerate(zip(A.factors, A.d)):
        for e in Fj.real_embeddings:
            if Fj.real_sign(dj, e) < 0:
                mask = 0
                for i, g in enumerate(gens):
                    if Fj.real_sign(g[j], e) < 0:
                        mask |= 1 << i
                rows.append(mask)
                rhs.append(1 if Fj.real_sign(a_inf[j], e) < 0 else 0)
    sol = f2.solve(rows, rhs, len(gens))
    info = {"generators": len(gens), "candidates": 2 ** len(gens), "found": sol is not None}
    if sol is None:
        return None, info
    a = one
    for g, e in zip(gens, sol):
        if e:
            a = A.f_mul(a, g)
    if not globally_equivalent(trace_form(A, a), q):
        return None, dict(info, found=False, note="span solution failed verification")
    return a, info


# --- the two-prime certificate ------------------------------------------------------------------------

def _try_two_prime_certificate(P: SplitEmbeddingProblem, V: Sequence[Place]) -> Optional[dict]:
    A = P.source
    if len(A.factors) != 2 or A.factors[0].kind != "Q" or A.factors[1].kind != "quad":
        return None
    d1, d2 = A.d
    if not (A.factors[0].is_rational(d1) and A.factors[1].is_rational(d2)):
        return None
    p1, p2 = d1[0], d2[0]
    if p1.denominator != 1 or p2.denominator != 1 or A.factors[1].m != p1:
        return None
    flips = {v for v in V if v.is_finite}
    cert = example75_obstruction(int(p1), int(p2), flips)
    if cert is None:
        return None
    # the target must agree with the trace form away from the flip set
    qt = trace_form(A)
    for v in local_places(P):
        if v.is_finite and v not in flips and qt.hasse(v) != P.target.hasse(v):
            return None
    return cert


def example75_obstruction(p1: int, p2: int, target_flip_set, sample_bound: int = 2000) -> Optional[dict]:
    """Parity certificate that no a in F^x works, F = Q x Q(sqrt p1), d = (p1, p2),
    when the target differs from the trace form exactly at p1 and p2.  None if the
    hypotheses fail."""
    checks = {}
    try:
        checks["p1_prime"] = is_prime(p1)
        checks["p2_prime"] = is_prime(p2)
        if not (checks["p1_prime"] and checks["p2_prime"]) or p1 == p2:
            return None
        flips = {Place.parse(v) for v in target_flip_set}
    except DomainError:
        return None
    checks["p1_1_mod_4"] = p1 % 4 == 1
    checks["p2_1_mod_4"] = p2 % 4 == 1
    checks["one_is_1_mod_8"] = p1 % 8 == 1 or p2 % 8 == 1
    checks["legendre_p1_p2"] = legendre(p1, p2)
    checks["flip_set"] = sorted(str(v) for v in flips)
    if not (checks["p1_1_mod_4"] and checks["p2_1_mod_4"] and checks["one_is_1_mod_8"]
            and checks["legendre_p1_p2"] == 1 and flips == {Place(p1), Place(p2)}):
        return None
    # Q(sqrt p1, sqrt p2) is unramified outside {p1, p2}: every quadratic subfield
    # has discriminant p1, p2 or p1 p2 (all = 1 mod 4)
    ram = set()
    for m in (p1, p2, p1 * p2):
        disc = m if m % 4 == 1 else 4 * m
        ram |= set(factor(disc))
    checks["ramified_primes"] = sorted(ram)
    if not ram <= {p1, p2}:
        return None
    # the steps of the parity argument, each checked numerically
    steps = []
    # 1. p2 is a square at p1, so Cor_{p1}(a, d) = (a1, p1)_{p1} and it must be -1
    s1 = is_local_square(p2, Place(p1))
    steps.append({"claim": f"{p2} is a square in Q_{p1}", "holds": s1})
    # 2. p1 is a square at p2 and at inf, so (a1, p1)_v = -1 for some other v outside {p2, inf}
    s2 = is_local_square(p1, Place(p2)) and p1 > 0
    steps.append({"claim": f"{p1} is a square in Q_{p2} and in R", "holds": s2})
    # 3. off {p1, p2}: p1 nonsquare at v forces p2 to be a square in Q_v(sqrt p1)
    K = FieldFactor.quadratic(p1)
    sampled = []
    for ell in primes_from(1, sample_bound + 1):
        if ell in (p1, p2):
            continue
        v = Place(ell)
        if not is_local_square(p1, v):
            ok = locally_square(K, K.elt(p2), v, 1)
            sampled.append(ok)
    s3 = all(sampled)
    steps.append({"claim": f"for v outside {{{p1},{p2}}} with {p1} nonsquare, {p2} is a square "
                           f"in Q_v(sqrt {p1}) (unramified, hence cyclic, local extension)",
                  "holds": s3, "sampled_places": len(sampled), "sample_bound": sample_bound})
    if not (s1 and s2 and s3):
        return None
    return {
        "kind": "two-prime parity",
        "hypotheses": checks,
        "steps": steps,
        "conclusion": (f"any a = (a1, a2) would need (a1, {p1})_{p1} = -1, hence a second place v "
                       f"with (a1, {p1})_v = -1 and Cor_v(a, d) = -1, although the target agrees "
                       f"with the trace form at v"),
    }
