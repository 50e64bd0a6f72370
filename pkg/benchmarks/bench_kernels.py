"""Compare the compiled integer kernels with their pure-Python twins.

Each kernel is run on the same inputs by both backends; outputs must agree.
Usage: python benchmarks/bench_kernels.py [--repeat N]"""

import argparse
import random
import timeit

from involution_embed import _kernels_py as py

try:
    from involution_embed import _kernels as c
except ImportError:
    c = None


def workloads(rng):
    jac = [(rng.randrange(-10**9, 10**9), rng.randrange(3, 10**6) | 1) for _ in range(20000)]
    fac = [rng.randrange(2, 10**12) for _ in range(200)]
    pattern = ([13, 17, -1, 2], [-1, -1, 1, 0])
    return {
        "jacobi x20000": lambda k: [k.jacobi(a, n) for a, n in jac],
        "trial_factor x200 (bound 1e5)": lambda k: [k.trial_factor(n, 10**5) for n in fac],
        "primes_below 2e6": lambda k: k.primes_below(2 * 10**6),
        "scan_legendre_pattern to 1e6": lambda k: k.scan_legendre_pattern(
            pattern[0], pattern[1], 10**5, 10**6, frozenset()),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if c is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return
    rng = random.Random(args.seed)
    print(f"{'kernel':36s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, fn in workloads(rng).items():
        if fn(py) != fn(c):
            raise SystemExit(f"backends disagree on {name}")
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(c), number=1, repeat=args.repeat))
        print(f"{name:36s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
