"""Time the compiled decay kernel against the numpy fallback.

    python benchmarks/bench_kernels.py --sizes 20 60 150 --repeats 5
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from oversquash import _backend
from oversquash.sensitivity import layer_range
from oversquash.synthetic import random_connected_graph


def time_backend(kernels, g, repeats: int) -> tuple[float, np.ndarray]:
    indptr, indices = g.csr()
    r = layer_range(g)
    n = g.num_nodes
    targets = np.arange(n, dtype=np.int64)
    times = []
    for _ in range(repeats):
        k = np.empty((n, n))
        n0 = np.empty((n, n))
        t0 = time.perf_counter()
        kernels.decay_rows(indptr, indices, targets, r.start, r.end, k, n0)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), k


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 150, 300])
    ap.add_argument("--p", type=float, default=None, help="extra-edge probability (default 2/n)")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    try:
        compiled = _backend.get("compiled")
    except ImportError:
        compiled = None
        print("compiled kernels unavailable; timing the fallback only")
    python = _backend.get("python")

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} {'m':>7} {'layers':>8} {'compiled s':>12} {'python s':>12} {'speedup':>8} {'identical':>9}")
    for n in args.sizes:
        g = random_connected_graph(rng, n, args.p if args.p is not None else 2.0 / n)
        r = layer_range(g)
        t_py, k_py = time_backend(python, g, args.repeats)
        if compiled is None:
            print(f"{n:>6} {g.num_edges:>7} {r.start:>3}..{r.end:<3} {'-':>12} {t_py:>12.4f}")
            continue
        t_c, k_c = time_backend(compiled, g, args.repeats)
        same = np.array_equal(k_c, k_py, equal_nan=True)
        print(f"{n:>6} {g.num_edges:>7} {r.start:>3}..{r.end:<3} {t_c:>12.4f} {t_py:>12.4f} "
              f"{t_py / t_c:>7.1f}x {str(same):>9}")


if __name__ == "__main__":
    main()
