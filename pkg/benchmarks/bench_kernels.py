"""Compare the numba cube kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 12 16 20 --repeat 3
"""
import argparse
import random
import time

import numpy as np

from proofbench import kernels
from proofbench.suite import random_clause


def best_of(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--clauses", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print("kernel            n   numpy_s   numba_s   speedup")
    for n in args.n:
        clauses = [random_clause(rng, n, rng.randint(1, 4)) for _ in range(args.clauses)]
        terms = [([l for l in C if l > 0], [-l for l in C if l < 0]) for C in clauses]
        coeffs = [rng.randint(-5, 5) for _ in terms]

        # compile first, and make sure both routes agree
        a = kernels.falsified_counts(clauses, n, use_numba=True)
        b = kernels.falsified_counts(clauses, n, use_numba=False)
        assert np.array_equal(a, b)
        a = kernels.term_sums(terms, coeffs, n, use_numba=True)
        b = kernels.term_sums(terms, coeffs, n, use_numba=False)
        assert np.array_equal(a, b)

        for name, fn in (("falsified_counts", kernels.falsified_counts),
                         ("term_sums", lambda t, n, use_numba: kernels.term_sums(t, coeffs, n, use_numba))):
            data = clauses if name == "falsified_counts" else terms
            t_np = best_of(lambda: fn(data, n, use_numba=False), args.repeat)
            t_nb = best_of(lambda: fn(data, n, use_numba=True), args.repeat)
            print("%-16s %3d  %8.4f  %8.4f  %7.1fx" % (name, n, t_np, t_nb, t_np / t_nb))


if __name__ == "__main__":
    main()
