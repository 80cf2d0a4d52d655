"""Compare the compiled and pure-Python RK4 kernels.

Runs the same spiral-pursuit simulation on every available backend, checks
that the trajectories agree bit for bit, and prints timings::

    python3 benchmarks/bench_kernels.py --evaders 3 --t-end 60 --repeat 5
"""

import argparse
import time

import numpy as np

from herdlab import IntegratorSettings, PursuitParams, simulate
from herdlab.kernels import available_backends


def initial_state(n: int) -> np.ndarray:
    """Evader 0 at radius 1, the rest spread inside it."""
    rng = np.random.default_rng(0)
    pts = [(0.7071, 0.7071)]
    for _ in range(n - 1):
        r, a = rng.uniform(0.2, 0.9), rng.uniform(-np.pi, np.pi)
        pts.append((r * np.cos(a), r * np.sin(a)))
    return np.asarray(pts).ravel()


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--evaders", type=int, default=3)
    ap.add_argument("--t-end", type=float, default=60.0)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    params = PursuitParams(1.0, 1.0, 2.0, 2.0, 1.0)
    s0 = initial_state(args.evaders)
    settings = IntegratorSettings(t_end=args.t_end)
    steps = int(round(args.t_end / settings.resolved_step(params.omega)))

    results = {}
    for name in available_backends():
        run = lambda: simulate(params, s0, settings, backend=name)  # noqa: E731
        results[name] = (best_of(run, args.repeat), run().states)

    print(f"{args.evaders} evaders, {steps} RK4 steps, best of {args.repeat}")
    for name, (t, _) in results.items():
        print(f"  {name:>7}: {t * 1e3:9.2f} ms  ({steps / t:,.0f} steps/s)")
    if {"python", "cython"} <= set(results):
        same = np.array_equal(results["python"][1], results["cython"][1])
        print(f"  speedup {results['python'][0] / results['cython'][0]:.1f}x, "
              f"identical trajectories: {same}")


if __name__ == "__main__":
    main()
