"""Compare the numba and pure-numpy paths of the numeric kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import random
import timeit

import numpy as np

from cogsimp import _kernels as k


def make_strings(rng, n, length):
    letters = "abcdefghij "
    return [("".join(rng.choice(letters) for _ in range(length)),
             "".join(rng.choice(letters) for _ in range(length))) for _ in range(n)]


def bench(label, fn, repeat):
    fn()  # warm up (triggers compilation on the jit path)
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<8} {best * 1e3:10.2f} ms")
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rng = random.Random(0)
    if not k.HAVE_NUMBA:
        print("numba unavailable (or COGSIMP_DISABLE_JIT set); only the numpy path is timed")

    pairs = [(k._codes(a), k._codes(b)) for a, b in make_strings(rng, 200, 120)]
    print("levenshtein, 200 pairs of 120 characters")
    numpy_t = bench("numpy", lambda: [k.levenshtein_numpy(a, b) for a, b in pairs], args.repeat)
    if k.HAVE_NUMBA:
        jit_t = bench("numba", lambda: [k.levenshtein_jit(a, b) for a, b in pairs], args.repeat)
        assert [k.levenshtein_numpy(a, b) for a, b in pairs] == [k.levenshtein_jit(a, b) for a, b in pairs]
        print(f"  speedup  {numpy_t / jit_t:10.1f}x")

    ranks = [np.arange(2, 2 * n + 1, 2) for n in range(5, 26)] * 20
    print("signed-rank null counts, n = 5..25, 420 samples")
    numpy_t = bench("numpy", lambda: [k.signed_rank_counts_numpy(r) for r in ranks], args.repeat)
    if k.HAVE_NUMBA:
        jit_t = bench("numba", lambda: [k.signed_rank_counts_jit(r) for r in ranks], args.repeat)
        assert all(np.array_equal(k.signed_rank_counts_numpy(r), k.signed_rank_counts_jit(r)) for r in ranks)
        print(f"  speedup  {numpy_t / jit_t:10.1f}x")


if __name__ == "__main__":
    main()
