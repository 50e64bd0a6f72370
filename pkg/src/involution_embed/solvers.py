"""Constructive symbol solvers.

All three solvers reduce to one F2-linear system.  The unknown is an exponent
vector over a pool of generators g (the element found is the product of the
selected g); each row is either a coordinate of a local square class at a pinned
place or the bit of a Hilbert symbol (g, t)_w at an unpinned place.  Generators
only ever acquire new prime divisors at places where t is a local square, so the
rows cover every place where the answer's symbols can be nontrivial.  The pool
grows until the system is consistent or the configured budget runs out, and
every answer is re-verified from scratch before it is returned."""

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Sequence, Set, Tuple

from . import f2, kernels
from .arith import factor, is_rational_square, legendre, nonzero, primes_from, rational_sqrt, vp
from .config import DEFAULT, Bounds
from .errors import BoundExceededError, InfeasibleError, PreconditionError, VerificationError
from .localext import (decompose, ext_class_vector, ext_hilbert_symbol, ext_is_local_square,
                       padic_root, relevant_base_places)
from .numfield import Elt, FieldFactor
from .places import Place, hilbert_symbol, is_local_square, square_class_reps

QQ = FieldFactor.rational()


def _bit(sign: int) -> int:
    return 0 if sign == 1 else 1


# --- per-place linear data ------------------------------------------------------

def _class_rows(F: FieldFactor, x: Elt, v: Place, idx: int) -> Tuple[int, ...]:
    """Coordinates whose vanishing means x is a square in F (x) Q_v."""
    if F.kind == "biquad":
        # a rational x is a square in F_w iff it pairs trivially with every class c
        # orthogonal to a and b
        out = []
        for c in square_class_reps(v):
            if hilbert_symbol(F.a, c, v) == 1 and hilbert_symbol(F.b, c, v) == 1:
                out.append(_bit(hilbert_symbol(x[0], c, v)))
        return tuple(out)
    out = []
    for w in decompose(F, v, idx):
        out.extend(ext_class_vector(F, x, w))
    return tuple(out)


def _symbol_rows(F: FieldFactor, x: Elt, t: Elt, v: Place, idx: int) -> Tuple[int, ...]:
    return tuple(_bit(ext_hilbert_symbol(F, x, t, w)) for w in decompose(F, v, idx))


def locally_square(F: FieldFactor, x: Elt, v: Place, idx: int = 0) -> bool:
    """x is a square in F (x) Q_v (every component)."""
    return all(ext_is_local_square(F, x, w) for w in decompose(F, v, idx))


def locally_square_somewhere_not(F: FieldFactor, x: Elt, v: Place, idx: int = 0) -> bool:
    return not locally_square(F, x, v, idx)


# --- generator pools ------------------------------------------------------------

class _Pool:
    """Generators for one factor field, grown round by round."""

    def __init__(self, F: FieldFactor, t: Elt, P: Set[int], free: Set[int], idx: int):
        self.F, self.t, self.P, self.free, self.idx = F, t, P, free, idx
        self.gens: List[Elt] = []
        self._seen = set()
        self._safe_cache: Dict[int, bool] = {}
        self._aux_iter = primes_from(1)

    def add(self, g: Elt):
        key = tuple(g)
        if key not in self._seen and not self.F.is_zero(g):
            self._seen.add(key)
            self.gens.append(g)

    def safe(self, q: int) -> bool:
        """t is a square at every place above q (so symbols there are trivial)."""
        if q in self._safe_cache:
            return self._safe_cache[q]
        if q in self.P:
            ok = False
        elif self.F.kind == "biquad":
            ok = all(is_local_square(self.t[0] * g, Place(q)) for g in (1,)) or \
                any(is_local_square(self.t[0] * g, Place(q)) for g in (self.F.a, self.F.b, self.F.a * self.F.b))
        else:
            ok = locally_square(self.F, self.t, Place(q), self.idx)
        self._safe_cache[q] = ok
        return ok

    def admissible(self, g: Elt) -> bool:
        F = self.F
        if F.kind == "quad":
            D = 1
            for c in g:
                D = D * Fraction(c).denominator // gcd(D, Fraction(c).denominator)
            U, W = int(g[0] * D), int(g[1] * D)
            n = U * U - F.m * W * W
            primes = set(factor(n)) | set(factor(D))
        else:
            primes = set(factor(g[0].numerator)) | set(factor(g[0].denominator))
        return all(q in self.P or q in self.free or self.safe(q) for q in primes)

    def seed(self):
        F = self.F
        self.add(F.elt(-1))
        for p in sorted(self.P | self.free):
            self.add(F.elt(p))
        if F.kind == "quad":
            g = F.gen()
            if self.admissible(g):
                self.add(g)
            for p in sorted(self.P | self.free):
                self._split_uniformizers(p, 12)

    def _split_uniformizers(self, p: int, span: int):
        F = self.F
        if p == 2 and F.m % 8 != 1:
            return
        if p != 2 and (F.m % p == 0 or legendre(F.m, p) != 1):
            return
        for sign in (1, -1):
            r = padic_root(F.m, p, 2, sign) % (p * p if p != 2 else 8)
            found = 0
            for j in range(-span, span + 1):
                x = -r + j * (p if p != 2 else 8)
                g = (Fraction(x), Fraction(1))
                if F.norm(g) != 0 and self.admissible(g):
                    self.add(g)
                    found += 1
                    if found >= 2:
                        break

    def grow(self, round_no: int, bounds: Bounds) -> bool:
        """Add auxiliary generators; False once the budget is spent."""
        target = min(8 << round_no, bounds.aux_primes)
        added = 0
        want = target
        for q in self._aux_iter:
            if q in self.P or q in self.free:
                continue
            if self.safe(q):
                self.add(self.F.elt(q))
                added += 1
                if added >= want // 2 or added >= 16 << round_no:
                    break
        if self.F.kind == "quad":
            H = min(bounds.element_height << round_no, 64)
            for x in range(-H, H + 1):
                for y in range(1, H + 1):
                    if gcd(x, y) != 1:
                        continue
                    g = (Fraction(x), Fraction(y))
                    if self.F.norm(g) != 0 and self.admissible(g):
                        self.add(g)
            for p in sorted(self.P | self.free):
                self._split_uniformizers(p, 12 << round_no)
        return (8 << round_no) < 2 * bounds.aux_primes


def _multiply(F: FieldFactor, gens: Sequence[Elt], exps: Sequence[int]) -> Elt:
    out = F.one()
    for g, e in zip(gens, exps):
        if e:
            out = F.mul(out, g)
    return out


# --- the engine -------------------------------------------------------------------

def _solve_factor(F: FieldFactor, t: Elt, pins: Dict[Place, Elt], targets: Dict[Place, int],
                  free: Set[Place], idx: int, bounds: Bounds) -> Elt:
    """s in F with s/pin_v square at pinned v, (s, t)_w = targets (default +1) at
    every unpinned place off ``free``."""
    base = set(relevant_base_places(F, t, *pins.values()))
    base |= set(pins) | set(targets)
    P = {v.p for v in base if v.is_finite}
    free_p = {v.p for v in free if v.is_finite}
    P -= free_p
    pool = _Pool(F, t, P, free_p, idx)
    pool.seed()
    places = sorted(base | set(free))
    round_no = 0
    while True:
        gens = pool.gens
        rows, rhs = [], []
        for v in places:
            if v in pins:
                cols = [_class_rows(F, g, v, idx) for g in gens]
                target = _class_rows(F, pins[v], v, idx)
            elif v in free:
                continue
            else:
                cols = [_symbol_rows(F, g, t, v, idx) for g in gens]
                tb = _bit(targets.get(v, 1))
                target = tuple(tb for _ in decompose(F, v, idx)) if F.kind != "biquad" else (tb,) * len(cols[0])
            k = len(target)
            for i in range(k):
                mask = 0
                for j, c in enumerate(cols):
                    if c[i]:
                        mask |= 1 << j
                rows.append(mask)
                rhs.append(target[i])
        sol = f2.solve(rows, rhs, len(gens))
        if sol is not None:
            return _multiply(F, gens, sol)
        if not pool.grow(round_no, bounds):
            raise BoundExceededError("no element with the prescribed local data in the generator pool",
                                     bounds.aux_primes)
        round_no += 1


def _as_elt(F: FieldFactor, x) -> Elt:
    return F.elt(x)


def prescribe_symbols(a, targets: Dict, bounds: Bounds = DEFAULT) -> Fraction:
    """x in Q with (a, x)_v = targets[v] for every v (+1 off the given places)."""
    return lemma_hs(a, targets, {}, bounds)


def lemma_hs(t, targets: Dict, pins: Dict, bounds: Bounds = DEFAULT) -> Fraction:
    """s in Q with (s, t)_v = targets[v] everywhere and s/pins[v] a square in Q_v."""
    t = nonzero(t)
    targets = {Place.parse(k): int(e) for k, e in targets.items()}
    pins = {Place.parse(k): nonzero(x) for k, x in pins.items()}
    _check_targets(t, targets)
    for v, sv in pins.items():
        if v in targets and hilbert_symbol(sv, t, v) != targets[v]:
            raise InfeasibleError(f"pin at {v} has symbol {hilbert_symbol(sv, t, v)} "
                                  f"but the target is {targets[v]}", "pin-target")
    prod = 1
    for v in set(targets) | set(pins):
        prod *= hilbert_symbol(pins[v], t, v) if v in pins else targets[v]
    if prod != 1:
        raise InfeasibleError("the pinned classes and the targets violate the product formula",
                              "product-formula")
    tgt = {v: e for v, e in targets.items() if v not in pins}
    s = _solve_factor(QQ, QQ.elt(t), {v: QQ.elt(x) for v, x in pins.items()}, tgt, set(), 0, bounds)[0]
    _verify_hs(t, targets, pins, s)
    return s


def _check_targets(t: Fraction, targets: Dict[Place, int]):
    prod = 1
    for v, e in targets.items():
        if e not in (1, -1):
            raise InfeasibleError(f"target at {v} must be +1 or -1", "sign")
        prod *= e
        if e == -1 and is_local_square(t, v):
            raise InfeasibleError(f"{t} is a square at {v}, so no symbol there can be -1",
                                  "local-square")
    if prod != 1:
        raise InfeasibleError("the prescribed symbols violate the product formula", "product-formula")


def _verify_hs(t, targets, pins, s):
    for v in relevant_base_places(QQ, QQ.elt(t), QQ.elt(s), *(QQ.elt(x) for x in pins.values())) \
            + sorted(set(targets) | set(pins)):
        want = targets.get(v, 1) if v not in pins else hilbert_symbol(pins[v], t, v)
        if hilbert_symbol(s, t, v) != want:
            raise VerificationError(f"symbol ({s}, {t}) at {v} is not {want}")
        if v in pins and not is_local_square(s / pins[v], v):
            raise VerificationError(f"{s} is not in the pinned class at {v}")


# --- etale version -------------------------------------------------------------------

def _factor_components(F: Sequence[FieldFactor], x) -> Tuple[Elt, ...]:
    if len(x) != len(F):
        raise PreconditionError(f"element needs {len(F)} components")
    return tuple(Fj.elt(xj) for Fj, xj in zip(F, x))


def hs1_hypothesis_ok(F: Sequence[FieldFactor], t, v0: Place) -> bool:
    """Every component of t that is not a global square is a nonsquare over v0."""
    t = _factor_components(F, t)
    for j, (Fj, tj) in enumerate(zip(F, t)):
        if not Fj.is_square(tj) and locally_square(Fj, tj, v0, j):
            return False
    return True


def lemma_hs1(F: Sequence[FieldFactor], t, pins: Dict, v0: Place,
              bounds: Bounds = DEFAULT) -> Tuple[Elt, ...]:
    """s in F with s/pins[v] a square in F (x) Q_v for pinned v and (s, t) trivial
    in Br(F (x) Q_v) for every v outside pins and v0."""
    F = list(F)
    t = _factor_components(F, t)
    pins = {Place.parse(v): _factor_components(F, x) for v, x in pins.items()}
    v0 = Place.parse(v0)
    if v0 in pins:
        raise PreconditionError(f"the checkpoint place {v0} must not be pinned")
    if not hs1_hypothesis_ok(F, t, v0):
        raise PreconditionError(f"some nonsquare component of t is a local square at {v0}")
    out = []
    for j, (Fj, tj) in enumerate(zip(F, t)):
        pj = {v: x[j] for v, x in pins.items()}
        out.append(_solve_factor(Fj, tj, pj, {}, {v0}, j, bounds))
    s = tuple(out)
    verify_hs1(F, t, pins, v0, s)
    return s


def verify_hs1(F, t, pins, v0, s):
    for j, Fj in enumerate(F):
        places = set(relevant_base_places(Fj, t[j], s[j], *(x[j] for x in pins.values()))) | set(pins)
        for v in sorted(places):
            if v in pins:
                q = Fj.div(s[j], pins[v][j])
                if not locally_square(Fj, q, v, j):
                    raise VerificationError(f"component {j} misses the pinned class at {v}")
            elif v != v0:
                for w in decompose(Fj, v, j):
                    if ext_hilbert_symbol(Fj, s[j], t[j], w) != 1:
                        raise VerificationError(f"component {j}: symbol at {w} is nontrivial")


# --- checkpoint places ----------------------------------------------------------------

def _window_limits(cap_primes: int):
    lim = 1024
    while True:
        yield lim
        lim *= 4


def find_checkpoint_place(F: Sequence[FieldFactor], t, Z_is_field: bool = False, Z_disc=None,
                          avoid: Iterable = (), bounds: Bounds = DEFAULT) -> Place:
    """Smallest odd prime v0 outside ``avoid`` where every globally nonsquare
    component of t is a local nonsquare (and Z_disc too, when requested)."""
    F = list(F)
    t = _factor_components(F, t)
    avoid = {Place.parse(a) for a in avoid}
    need = [(j, Fj, tj) for j, (Fj, tj) in enumerate(zip(F, t)) if not Fj.is_square(tj)]
    zd = nonzero(Z_disc) if (Z_is_field and Z_disc is not None) else None

    def ok(p: int) -> bool:
        v = Place(p)
        if v in avoid:
            return False
        if zd is not None and is_local_square(zd, v):
            return False
        return all(not locally_square(Fj, tj, v, j) for j, Fj, tj in need)

    # fast path: every condition is a Legendre pattern on rational data
    pattern = _legendre_pattern(need, zd)
    support = set()
    for j, Fj, tj in need:
        support |= {v.p for v in relevant_base_places(Fj, tj) if v.is_finite}
        r = rational_class(Fj, tj)
        if r is not None:
            support |= set(factor(r.numerator)) | set(factor(r.denominator))
    if zd is not None:
        support |= set(factor(zd.numerator)) | set(factor(zd.denominator))
    if diamond_condition(F, t, zd) == "fails":
        # no Frobenius class works, so only the finitely many primes of the
        # support can qualify
        for p in sorted(support):
            if p != 2 and ok(p):
                return Place(p)
        raise InfeasibleError("no checkpoint place exists: the Legendre conditions are "
                              "inconsistent away from the primes of the support",
                              "checkpoint-condition")
    tested = 0
    lo = 2
    for hi in _window_limits(bounds.checkpoint_primes):
        cands = []
        if pattern is not None:
            values, signs = pattern
            av = frozenset(v.p for v in avoid if v.is_finite) | frozenset(support)
            r = kernels.scan_legendre_pattern(values, signs, lo, hi, av)
            if r > 0:
                cands.append(r)
            cands += [p for p in support if lo < p < hi and p != 2 and ok(p)]
        else:
            for p in primes_from(lo, hi):
                if p != 2 and ok(p):
                    cands.append(p)
                    break
        if cands:
            p = min(cands)
            if not ok(p):
                raise VerificationError(f"checkpoint candidate {p} fails its conditions")
            return Place(p)
        tested += _approx_prime_count(hi) - _approx_prime_count(lo)
        if tested > bounds.checkpoint_primes:
            raise BoundExceededError("no checkpoint place found", bounds.checkpoint_primes)
        lo = hi - 1


def _approx_prime_count(x: int) -> int:
    from math import log
    return int(x / log(x)) if x > 2 else 0


def rational_class(Fj: FieldFactor, x: Elt):
    """A rational r with x in r * F_j^x2, or None if there is none (or it is not found).

    For quadratic F_j: if N(x) = n^2 then (x + n)^2 = x (Tr x + 2n), so r = Tr x + 2n
    works (with -n when Tr x + 2n = 0).  Conversely x = r y^2 forces N(x) to be a square."""
    if Fj.is_rational(x):
        return x[0]
    if Fj.kind != "quad":
        return None
    N = Fj.norm(x)
    if not is_rational_square(N):
        return None
    n = rational_sqrt(N)
    for s in (n, -n):
        r = Fj.trace(x) + 2 * s
        if r != 0:
            return r
    return None


def _legendre_pattern(need, zd):
    values, signs = [], []
    for j, Fj, tj in need:
        r = rational_class(Fj, tj)
        if r is None:
            return None
        val = r.numerator * r.denominator
        if Fj.kind == "Q":
            values.append(val)
            signs.append(-1)
        elif Fj.kind == "quad":
            # a rational unit is a square in the unramified quadratic extension,
            # so v0 must split in F_j and t_j be a nonresidue
            values += [Fj.m, val]
            signs += [1, -1]
        else:
            return None
    if zd is not None:
        values.append(zd.numerator * zd.denominator)
        signs.append(-1)
    return values, signs


# --- the checkpoint condition for all V at once ------------------------------------------

def diamond_condition(F: Sequence[FieldFactor], t, Z_disc=None) -> str:
    """Decide whether checkpoint places exist outside every finite set.

    Returns "holds", "fails" or "unknown".  Exact when at most one component of t
    is a global nonsquare, or when every factor is Q or quadratic and every
    component has a rational square class (see rational_class): then a checkpoint is a Frobenius element, i.e. a linear
    functional f on the square classes with f(t_j) = 1 (and f(m_j) = 0 for a
    quadratic factor), and such f exist iff that F2-system is consistent."""
    F = list(F)
    t = _factor_components(F, t)
    need = [(Fj, tj) for Fj, tj in zip(F, t) if not Fj.is_square(tj)]
    if not need and Z_disc is None:
        return "holds"
    eqs: List[Tuple[List[int], int]] = []
    for Fj, tj in need:
        r = rational_class(Fj, tj)
        if r is None or Fj.kind == "biquad":
            return "holds" if len(need) == 1 and Z_disc is None else "unknown"
        if Fj.kind == "Q":
            eqs.append(([r], 1))
        else:
            eqs.append(([Fj.m], 0))
            eqs.append(([r], 1))
    if Z_disc is not None:
        eqs.append(([nonzero(Z_disc)], 1))
    # coordinates: parity of exponents of -1 and of each prime
    primes = sorted(set().union(*(set(factor(Fraction(x).numerator)) | set(factor(Fraction(x).denominator))
                                  for e, _ in eqs for x in e)))
    def vec(x) -> int:
        x = Fraction(x)
        bits = 1 if x < 0 else 0
        for i, p in enumerate(primes):
            if vp(x, p) % 2:
                bits |= 1 << (i + 1)
        return bits
    rows = [vec(e[0]) for e, _ in eqs]
    rhs = [b for _, b in eqs]
    return "holds" if f2.solve(rows, rhs, len(primes) + 1) is not None else "fails"
