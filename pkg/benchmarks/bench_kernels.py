"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 64] [--repeat 5]
"""
import argparse
import time

import numpy as np

from radm import _kernels as K
from radm.spectral import Grid, make_rng, random_field


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    grid = Grid(n)
    rng = make_rng(0)
    h = n // 2 + 1
    half = rng.standard_normal((6, n, n, h)) + 1j * rng.standard_normal((6, n, n, h))
    out = np.empty((3, n, n, n), dtype=np.complex128)
    kint = grid.kint
    mask = grid.dealias_mask
    values = rng.standard_normal((n, n, n))
    shell = grid.shell_index
    nshell = int(shell.max()) + 1
    small = Grid(8)
    a = random_field(small, rng).coeffs
    b = random_field(small, rng).coeffs
    keep = small.dealias_mask
    return {
        f"assemble_divergence n={n}": (
            lambda: K.assemble_divergence_numpy(half, K.SYMMETRIC_INDEX, kint, mask, out, True),
            lambda: K.assemble_divergence_numba(half, K.SYMMETRIC_INDEX, kint, mask, out, True),
        ),
        f"shell_sum n={n}": (
            lambda: K.shell_sum_numpy(values, shell, nshell),
            lambda: K.shell_sum_numba(values, shell, nshell),
        ),
        "brute_convolution n=8": (
            lambda: K.brute_convolution_numpy(a, b, small.kint, keep),
            lambda: K.brute_convolution_numba(a, b, small.kint, keep),
        ),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    print(f"{'kernel':28s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, (np_fn, nb_fn) in cases(args.n).items():
        t_np = best_of(np_fn, args.repeat)
        t_nb = best_of(nb_fn, args.repeat)
        print(f"{name:28s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
