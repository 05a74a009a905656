"""Time the compiled and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from tubecast import kernels


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    phi2 = np.array([[[0.5, 0.1], [-0.2, 0.3]], [[-0.2, 0.05], [0.1, 0.1]]])
    th2 = np.array([[[0.4, 0.2], [0.0, 0.3]], [[0.1, 0.0], [0.05, 0.2]]])
    cases = {
        "varma_filter m=1 p=q=2 (8192x304)": lambda: (
            rng.standard_normal((8192, 304, 1)),
            np.array([0.5, -0.3]).reshape(2, 1, 1), np.array([0.4, 0.2]).reshape(2, 1, 1)),
        "varma_filter m=2 p=q=2 (8192x304)": lambda: (rng.standard_normal((8192, 304, 2)), phi2, th2),
    }
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    rows = []
    for name, make in cases.items():
        z, phi, th = make()
        times = {b: _time(lambda: kernels.varma_filter(z, phi, th, backend=b), args.repeat) for b in backends}
        rows.append((name, times))

    s = rng.standard_normal((65536, 8))
    lo, hi = np.full(8, -1.5), np.full(8, 1.5)
    for m in (1, 2):
        times = {b: _time(lambda: kernels.tube_counts(s, lo, hi, m, backend=b), args.repeat) for b in backends}
        rows.append((f"tube_counts 65536x8 m={m}", times))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "  speedup")
    for name, times in rows:
        cells = "  ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends)
        sp = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:<{width}}  {cells}  {sp:6.1f}x")


if __name__ == "__main__":
    main()
