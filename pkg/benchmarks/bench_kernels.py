"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from sol_lab import _kernels
from sol_lab.lattice import SL2ZMatrix, build_lattice


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--targets", type=int, default=20_000)
    ap.add_argument("--samples", type=int, default=50_000)
    args = ap.parse_args()

    L = build_lattice(SL2ZMatrix(2, 1, 1, 1))
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 1, (args.targets, 3))
    dargs = (t[:, 0], t[:, 1], t[:, 2], float(L.alpha), float(L.beta), L.s, 20, 8, 8, 0.05)
    samples = rng.uniform(-2, 2, (args.samples, 3))
    bpts = rng.uniform(-1, 1, (27, 3))
    cargs = (samples, bpts, L.P_float, L.P_inv_float, L.s)

    rows = []
    if _kernels.NUMBA_AVAILABLE:
        _kernels._density_search_jit(*dargs)  # compile
        _kernels._coset_distances_jit(*cargs)
        rows.append(("density", best_of(lambda: _kernels._density_search_jit(*dargs), args.repeat),
                     best_of(lambda: _kernels.density_search_numpy(*dargs), args.repeat)))
        rows.append(("coset", best_of(lambda: _kernels._coset_distances_jit(*cargs), args.repeat),
                     best_of(lambda: _kernels.coset_distances_numpy(*cargs), args.repeat)))
    else:
        print("numba not installed; numpy timings only")
        rows.append(("density", float("nan"), best_of(lambda: _kernels.density_search_numpy(*dargs), args.repeat)))
        rows.append(("coset", float("nan"), best_of(lambda: _kernels.coset_distances_numpy(*cargs), args.repeat)))

    print(f"{'kernel':<10}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, jit, ref in rows:
        print(f"{name:<10}{jit:>12.4f}{ref:>12.4f}{ref / jit:>10.1f}")


if __name__ == "__main__":
    main()
