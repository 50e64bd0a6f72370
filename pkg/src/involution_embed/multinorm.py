"""Multinorm arithmetic for biquadratic extensions Q(sqrt a, sqrt b) / Q.

With K1 = Q(sqrt a), K2 = Q(sqrt b), K3 = Q(sqrt ab), N_i the norm groups and S_i
the places where K_i splits, phi(x) = prod_{v in S1} (b, x)_v kills N1 N2 N3.  When
every place splits in some K_i the local products N1^v N2^v N3^v are everything,
so an x with phi(x) = -1 is a counterexample to the multinorm principle."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .arith import fmt, is_squarefree, nonzero, prime_support, primes_from
from .config import DEFAULT, Bounds
from .errors import DomainError, PreconditionError
from .places import INF, Place, class_vector, hilbert_symbol, is_local_square, square_class_reps
from .solvers import prescribe_symbols


@dataclass(frozen=True)
class BiquadraticDatum:
    a: int
    b: int

    def __post_init__(self):
        for x in (self.a, self.b):
            if not isinstance(x, int) or x in (0, 1) or not is_squarefree(abs(x)):
                raise DomainError(f"{x} is not a squarefree integer other than 0, 1")
        if self.a == self.b:
            raise DomainError("a b is a square: the extension is not biquadratic")

    @property
    def ab(self) -> int:
        return self.a * self.b

    @property
    def generators(self) -> Tuple[int, int, int]:
        """(a1, a2, a3) = (a, b, ab)."""
        return (self.a, self.b, self.ab)

    def in_split_set(self, i: int, v: Place) -> bool:
        """v in S_i, i.e. K_i (x) Q_v is split (i = 1, 2, 3)."""
        return is_local_square(self.generators[i - 1], v)

    def local_degree(self, v: Place) -> int:
        return 4 if not any(self.in_split_set(i, v) for i in (1, 2, 3)) else \
            (1 if all(self.in_split_set(i, v) for i in (1, 2, 3)) else 2)

    def special_places(self) -> List[Place]:
        """2, infinity and the primes of ab: the only places where F/Q may ramify."""
        return sorted({INF, Place(2)} | {Place(p) for p in prime_support(self.a, self.b)})

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass
class HypothesisCheck:
    holds: bool
    structural: bool                  # decided at every place, not only at the sampled ones
    failing_place: Optional[Place] = None
    sampled: int = 0

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"holds": self.holds, "structural": self.structural, "sampled_places": self.sampled}
        if self.failing_place is not None:
            out["failing_place"] = str(self.failing_place)
        return out


def check_local_degree_hypothesis(B: BiquadraticDatum, sample_bound: int = 1000) -> HypothesisCheck:
    """Every place lies in some S_i.  Off 2ab*inf the extension is unramified, so the
    decomposition groups are cyclic and the local degree is at most 2 automatically;
    the special places are checked directly and the rest is sampled as a cross-check."""
    for v in B.special_places():
        if B.local_degree(v) == 4:
            return HypothesisCheck(False, True, v)
    n = 0
    for p in primes_from(1, sample_bound + 1):
        n += 1
        if B.local_degree(Place(p)) == 4:
            # impossible for unramified p; would indicate a bug in the symbol layer
            raise AssertionError(f"local degree 4 at unramified place {p}")
    return HypothesisCheck(True, True, None, n)


def _phi_places(B: BiquadraticDatum, x: Fraction) -> List[Place]:
    return sorted({INF, Place(2)} | {Place(p) for p in prime_support(B.a, B.b, x)})


def phi_expression(B: BiquadraticDatum, x, i: int, j: int) -> int:
    """prod_{v in S_i} (a_j, x)_v over the finite set where the symbol can be -1."""
    x = nonzero(x)
    aj = B.generators[j - 1]
    out = 1
    for v in _phi_places(B, x):
        if B.in_split_set(i, v):
            out *= hilbert_symbol(aj, x, v)
    return out


# the six expressions of phi: (S_i, a_j)
PHI_EXPRESSIONS = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))


def phi(B: BiquadraticDatum, x, cross_check: bool = True) -> int:
    """phi(x) = prod_{v in S1} (b, x)_v; with cross_check all six expressions must agree."""
    if not check_local_degree_hypothesis(B, sample_bound=0):
        raise PreconditionError("the local degree hypothesis fails: phi is not defined")
    vals = [phi_expression(B, x, i, j) for i, j in PHI_EXPRESSIONS]
    if cross_check and len(set(vals)) != 1:
        raise AssertionError(f"the expressions for phi disagree: {vals}")
    return vals[0]


def norm_group_classes(d: int, v: Place) -> List[Tuple[int, ...]]:
    """Square-class vectors of N_{Q_v(sqrt d)/Q_v}, found by brute force over class reps."""
    out = []
    for r in square_class_reps(v):
        if hilbert_symbol(d, r, v) == 1:
            out.append(class_vector(r, v))
    return out


def local_product_contains(B: BiquadraticDatum, x, v: Place) -> bool:
    """x in N1^v N2^v N3^v, computed as a product of subgroups of Q_v^x / squares."""
    span = {tuple(0 for _ in class_vector(1, v))}
    for d in B.generators:
        gens = norm_group_classes(d, v)
        span = {tuple((s + g) % 2 for s, g in zip(u, w)) for u in span for w in gens}
    return class_vector(x, v) in span


@dataclass
class MultinormWitness:
    s: Fraction
    phi_value: int
    u1: Place
    u2: Place
    local_checks: Dict[Place, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"witness": fmt(self.s), "phi_value": self.phi_value,
                "auxiliary_places": [str(self.u1), str(self.u2)],
                "sampled_local_checks": {"places": len(self.local_checks),
                                         "all_hold": all(self.local_checks.values()),
                                         "failures": [str(v) for v, ok in sorted(self.local_checks.items())
                                                      if not ok]}}


def _pick_aux(B: BiquadraticDatum, in_s1: bool) -> Place:
    for p in primes_from(2):
        v = Place(p)
        if p in prime_support(B.a, B.b):
            continue
        if B.in_split_set(1, v) == in_s1 and not is_local_square(B.b, v):
            return v
    raise AssertionError("unreachable")


def multinorm_witness(B: BiquadraticDatum, sample_bound: int = 1000,
                      bounds: Bounds = DEFAULT) -> MultinormWitness:
    """s with phi(s) = -1 (so s is not in N1 N2 N3) that is a local multinorm everywhere."""
    if not check_local_degree_hypothesis(B, sample_bound):
        raise PreconditionError("the local degree hypothesis fails")
    u1, u2 = _pick_aux(B, True), _pick_aux(B, False)
    s = prescribe_symbols(B.b, {u1: -1, u2: -1}, bounds)
    val = phi(B, s)
    if val != -1:
        raise AssertionError("prescribed symbols did not give phi = -1")
    checks = {v: local_product_contains(B, s, v)
              for v in [INF] + [Place(p) for p in primes_from(1, sample_bound + 1)]}
    return MultinormWitness(s, val, u1, u2, checks)


def norm_form_indefinite(alpha, beta, a) -> bool:
    """Is x0^2 - a alpha x1^2 - a beta x2^2 + a alpha beta x3^2 indefinite over R?"""
    alpha, beta, a = nonzero(alpha), nonzero(beta), nonzero(a)
    if a < 0:
        raise DomainError("a must be positive")
    signs = {1, -1 if a * alpha > 0 else 1, -1 if a * beta > 0 else 1, 1 if a * alpha * beta > 0 else -1}
    return len(signs) == 2


def _local_two_product_contains(a: int, b: int, x, v: Place) -> bool:
    span = {tuple(0 for _ in class_vector(1, v))}
    for d in (a, b):
        gens = norm_group_classes(d, v)
        span = {tuple((s + g) % 2 for s, g in zip(u, w)) for u in span for w in gens}
    return class_vector(x, v) in span


def two_field_search(B: BiquadraticDatum, x_bound: int = 50, norm_height: int = 12) -> dict:
    """Look for x that lie in N1^v N2^v at every place but have no visible global
    decomposition x = n1 n2.  A decomposition is certified by the Hasse norm theorem:
    x / n1 is a norm from Q(sqrt b) iff (x / n1, b)_v = 1 everywhere.  Candidates are
    only reported, never claimed to be counterexamples."""
    a, b = B.a, B.b
    norms1 = sorted({Fraction(u * u - a * w * w) for u in range(norm_height + 1)
                     for w in range(norm_height + 1) if u * u - a * w * w != 0}, key=lambda n: (abs(n), n))
    decomposed, candidates, skipped = 0, [], 0
    for x in range(-x_bound, x_bound + 1):
        if x == 0:
            continue
        places = sorted({INF, Place(2)} | {Place(p) for p in prime_support(a, b, x)})
        if not all(_local_two_product_contains(a, b, x, v) for v in places):
            skipped += 1
            continue
        for n1 in norms1:
            y = Fraction(x) / n1
            ys = {INF, Place(2)} | {Place(p) for p in prime_support(b, y)}
            if all(hilbert_symbol(y, b, v) == 1 for v in ys):
                decomposed += 1
                break
        else:
            candidates.append(x)
    return {"biquadratic": B.to_json(), "x_bound": x_bound, "norm_height": norm_height,
            "locally_in_N1N2": decomposed + len(candidates), "not_local": skipped,
            "decomposed": decomposed, "candidates": [fmt(Fraction(c)) for c in candidates]}
