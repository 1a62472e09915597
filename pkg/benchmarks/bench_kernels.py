"""Compare the compiled and numpy kernel backends.

Times each per-step kernel on random realizable cells, then a full
free-boundary run, for every available backend::

    python benchmarks/bench_kernels.py --cells 400,3200,25600 --repeat 5
"""
import argparse
import timeit

import numpy as np

from fourmom.kernels import available_backends, get_backend
from fourmom.solver import run_case


def random_cells(n, seed=0):
    rng = np.random.default_rng(seed)
    rho1, rho2 = rng.uniform(0.1, 2.0, (2, n))
    v2 = rng.uniform(-2.0, 2.0, n)
    v1 = v2 + rng.uniform(0.0, 1.0, n)
    U = np.stack([rho1, rho2, v1, v2], axis=1)
    M = np.stack([rho1 * v1**k + rho2 * v2**k for k in range(4)], axis=1)
    return np.ascontiguousarray(M), np.ascontiguousarray(U)


def bench_kernels(k, n, repeat):
    M, U = random_cells(n)
    U_ext = np.ascontiguousarray(np.vstack([U[:1], U, U[-1:]]))
    cases = {
        "invert_cells": lambda: k.invert_cells(M, 1e-9, 1e-12),
        "interface_fluxes": lambda: k.interface_fluxes(U_ext),
        "conservative_update": lambda: k.conservative_update(M, U_ext, 0.4),
        "postprocess": lambda: k.postprocess(M.copy(), 1e-9, 2.0, 1e-12),
    }
    number = max(1, 200_000 // n)
    return {name: min(timeit.repeat(fn, number=number, repeat=repeat)) / number for name, fn in cases.items()}


def bench_run(backend, n, repeat):
    return min(timeit.repeat(lambda: run_case("free_boundary", n, backend=backend), number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cells", default="400,3200,25600", help="comma-separated cell counts for the kernel timings")
    p.add_argument("--run-cells", type=int, default=1600, help="grid for the full free-boundary run")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    sizes = [int(s) for s in args.cells.split(",")]
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is timed")

    print(f"{'kernel':<22}{'cells':>8}" + "".join(f"{b + ' [us]':>16}" for b in backends) + f"{'speed-up':>10}")
    for n in sizes:
        rows = {b: bench_kernels(get_backend(b), n, args.repeat) for b in backends}
        for name in rows[backends[0]]:
            times = [rows[b][name] * 1e6 for b in backends]
            ratio = times[-1] / times[0] if len(times) > 1 else 1.0
            print(f"{name:<22}{n:>8}" + "".join(f"{t:>16.1f}" for t in times) + f"{ratio:>10.1f}")

    times = {b: bench_run(b, args.run_cells, max(1, args.repeat // 2)) for b in backends}
    print(f"\nfree_boundary run, {args.run_cells} cells to t=0.2:")
    for b, t in times.items():
        print(f"  {b:<8}{t:8.3f} s")
    if len(times) > 1:
        print(f"  speed-up {times['python'] / times['cython']:.1f}x")


if __name__ == "__main__":
    main()
