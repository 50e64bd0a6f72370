from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Bounds:
    """Read-only search budgets.  Every search reports the bound it gave up at."""

    factor_bound: int = 10**7          # Pollard rho steps per split (trial division stops at 2^16)
    checkpoint_primes: int = 10**6     # primes tested by find_checkpoint_place
    aux_primes: int = 400              # auxiliary primes added to a witness pool
    witness_candidates: int = 2**16    # split-embedding witness search cap
    element_height: int = 6            # |u|, |w| range for small field elements
    ramset_search: int = 400           # |alpha|, |beta| range in quaternion_from_ramset

    def with_(self, **kw) -> "Bounds":
        return replace(self, **kw)


DEFAULT = Bounds()
