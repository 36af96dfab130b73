"""Compiled versus pure-Python shooting kernels.

Times the three kernels on representative workloads and checks that both
backends agree.  Run with ``python benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from lanemden import kernels
from lanemden.radial import series_start

WORKLOADS = {
    "trajectory p=3": lambda k: k.trajectory(3.0, *series_start(3.0, 1.0), 150.0, 2),
    "trajectory p=30": lambda k: k.trajectory(30.0, *series_start(30.0, 1.0), 150.0, 2),
    "sample p=3 (200 pts)": lambda k: k.sample(3.0, *series_start(3.0, 1.0), np.linspace(-10.0, 2.0, 200)),
    "prufer p=3": lambda k: k.prufer(3.0, -20.0, 0.0, *series_start(3.0, 1.0), 0.3,
                                     np.linspace(-10.0, 2.0, 50)),
}


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    py = kernels.load("python")
    cy = kernels.load("cython")
    if cy is py:
        print("compiled extension unavailable; only the Python backend can be timed")
    print(f"{'workload':<24}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, work in WORKLOADS.items():
        t_py, out_py = _best(lambda: work(py), args.repeat)
        t_cy, out_cy = _best(lambda: work(cy), args.repeat)
        diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
                   for a, b in zip(out_py[:-1], out_cy[:-1]))
        print(f"{name:<24}{t_py:>12.4f}{t_cy:>12.5f}{t_py / t_cy:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
