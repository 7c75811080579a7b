"""Compare the compiled closure kernel against the pure-Python fallback.

Run as: python3 benchmarks/bench_closure.py [--sizes 10000,100000,1000000]
"""
import argparse
import time

import numpy as np

from linecoal import _closure_py, kernels


def _window(n, seed):
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed, 0], dtype=np.uint64)))
    colors = np.zeros(2 * n, dtype=np.uint8)
    colors[1::2] = 1
    lengths = 1.0 + rng.random(2 * n)
    return colors, lengths


def _time(fn, reps=3):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="10000,100000,1000000")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {kernels.BACKEND}")
    print(f"{'pairs':>9}  {'compiled (s)':>12}  {'python (s)':>12}  {'speedup':>8}")
    for n in sizes:
        colors, lengths = _window(n, args.seed)
        tc, fast = _time(lambda: kernels.close_arrays(
            colors, lengths, want_counts=False))
        tp, slow = _time(lambda: _closure_py.close_segments(
            colors.tolist(), lengths.tolist()), reps=1)
        assert list(fast[1]) == list(slow[1]), "backends disagree"
        label = f"{tc:12.4f}" if kernels.BACKEND == "compiled" else "         n/a"
        print(f"{n:>9}  {label}  {tp:12.4f}  {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
