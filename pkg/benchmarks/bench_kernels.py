"""Time the numba kernels against the numpy fallback on acceptance-sized inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call per kernel includes JIT (or cache load) time and is
reported separately.
"""

import argparse
import time

import numpy as np

from trunctest.f2core import subset_table, weight_k_masks
from trunctest.kernels import BACKENDS


def cases(rng):
    t3 = subset_table(16, 3)
    t2 = subset_table(10, 2)
    t4 = subset_table(20, 4)
    masks = weight_k_masks(20, 4)
    return [
        ("distinct_counts n=16 k=3 T=1713", "distinct_counts",
         (rng.integers(0, 1 << 16, 1713, dtype=np.uint64), t3)),
        ("collision_counts n=10 k=2 T=163", "collision_counts",
         (rng.integers(0, 1 << 10, 163, dtype=np.uint64), t2)),
        ("row_collisions 1e5 x 163, m=4", "row_collisions",
         (rng.integers(0, 4, (100_000, 163)), 4)),
        ("dual_weight_counts n=20 k=4 T=8 x 500", "dual_weight_counts",
         (rng.integers(0, 1 << 20, (500, 8), dtype=np.uint64), masks)),
        ("parity_consistent_counts n=20 k=4 T=8 x 500", "parity_consistent_counts",
         (rng.integers(0, 1 << 20, (500, 8), dtype=np.uint64), t4)),
        ("weight_k_masks n=30 k=5", "weight_k_masks", (30, 5)),
    ]


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    names = sorted(BACKENDS)
    print(f"{'kernel':46s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}  first-call")
    for label, kernel, kargs in cases(rng):
        results, timings, first = {}, {}, ""
        for name in names:
            fn = getattr(BACKENDS[name], kernel)
            if name == "numba":
                t0 = time.perf_counter()
                fn(*kargs)
                first = f"{time.perf_counter() - t0:.3f}s"
            timings[name], results[name] = best_of(fn, kargs, args.repeat)
        ref = results[names[0]]
        assert all(np.array_equal(ref, r) for r in results.values()), label
        row = f"{label:46s}" + "".join(f"{timings[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{timings['numpy'] / timings['numba']:9.1f}x  {first}"
        print(row)


if __name__ == "__main__":
    main()
