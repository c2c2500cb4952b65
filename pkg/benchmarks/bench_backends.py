"""Compare the interval-generation backends.

Times the bulk kernel and a single-replication simulation on every
available backend, printing per-backend throughput and the speedup over
numpy.  The first numba call includes jit compilation, so each timing
runs after a small warm-up call.
"""

import argparse
import time

import numpy as np

from agecast.kernels import available_backends, generate_intervals
from agecast.order_stats import ServiceDistribution
from agecast.simulator import SimConfig, run_simulation


def best_time(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--intervals", type=int, default=1_000_000,
        help="intervals per timed call (default 1e6)",
    )
    parser.add_argument(
        "--k-values", default="1,5,20",
        help="comma list of priority group sizes (default 1,5,20)",
    )
    parser.add_argument(
        "--repeats", type=int, default=3,
        help="timed calls per point, best one counts (default 3)",
    )
    parser.add_argument("--lambda", dest="rate", type=float, default=1.0)
    parser.add_argument("--shift", type=float, default=0.0)
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    k_values = tuple(int(part) for part in args.k_values.split(","))
    dist = ServiceDistribution(rate=args.rate, shift=args.shift)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; {args.intervals} intervals per call")
    for k in k_values:
        print(f"k={k}")
        config = SimConfig(
            dist=dist, k=k, num_intervals=args.intervals, seed=1, replications=1
        )
        kernel_times = {}
        sim_times = {}
        for backend in backends:
            generate_intervals(
                np.random.default_rng(0), args.rate, args.shift, 1000, k,
                backend=backend,
            )
            kernel_times[backend] = best_time(
                lambda: generate_intervals(
                    np.random.default_rng(1), args.rate, args.shift,
                    args.intervals, k, backend=backend,
                ),
                args.repeats,
            )
            sim_times[backend] = best_time(
                lambda: run_simulation(config, backend=backend), args.repeats
            )
        for backend in backends:
            kernel = kernel_times[backend]
            rate = args.intervals / kernel / 1e6
            speedup = kernel_times["numpy"] / kernel
            print(
                f"  {backend:<6} kernel {kernel:.3f}s ({rate:.1f}M intervals/s)"
                f"  simulation {sim_times[backend]:.3f}s"
                f"  {speedup:.2f}x vs numpy"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
