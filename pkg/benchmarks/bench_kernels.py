"""Time each hot kernel in its compiled-loop and numpy flavours.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 1000000]

Prints one row per kernel with the best-of-``repeat`` wall time of both
flavours and their ratio. Compilation is excluded by a warm-up call.
"""
import argparse
import math
import time

import numpy as np

from precipmix import kernels
from precipmix._accel import HAVE_NUMBA


def _cases(n, rng):
    d = 0.876 + 1.0 - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    normals, uniforms = rng.standard_normal(n), rng.random(n)
    states = (rng.random(n) < 0.4).astype(np.int8)
    states[rng.random(n) < 0.01] = 2
    symbols = np.where(states == 2, -1, states).astype(np.int8)
    excess = rng.pareto(2.0, n)
    u = rng.random(n)
    return {
        "mt_fill": lambda fn: fn(d, c, normals, uniforms, np.empty(n), 0),
        "negbin_inverse_cdf": lambda fn: fn(u, 0.876, 0.489),
        "run_lengths": lambda fn: fn(states),
        "window_counts": lambda fn: fn(symbols, 4),
        "gpd_nll": lambda fn: fn(0.5, 2.0, excess),
    }


def best_time(call, fn, repeat):
    call(fn)  # warm-up (and numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        call(fn)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=1_000_000)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba not installed: the loop flavour runs as plain Python")
    cases = _cases(args.size, np.random.default_rng(0))
    print(f"{'kernel':<20} {'loop [ms]':>10} {'numpy [ms]':>11} {'numpy/loop':>11}")
    for name, call in cases.items():
        loop, vec = kernels.KERNELS[name]
        t_loop = best_time(call, loop, args.repeat)
        t_vec = best_time(call, vec, args.repeat)
        print(f"{name:<20} {1e3 * t_loop:>10.2f} {1e3 * t_vec:>11.2f} {t_vec / t_loop:>11.2f}")


if __name__ == "__main__":
    main()
