"""Time the RK4 backends on the same workload.

    python3 benchmarks/bench_kernels.py --batch 8 --steps 200000
"""

import argparse
import math
import time

import numpy as np

from operadic_lax import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=8)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--record-every", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python", action="store_true", help="also time the un-jitted loops (slow)")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    y0 = rng.uniform(-1, 1, (args.batch, _kernels.STATE_SIZE))
    omega = 1.0
    dt = 2 * math.pi / args.steps
    mask = np.zeros(args.steps + 1, dtype=bool)
    mask[:: args.record_every] = True
    mask[-1] = True

    backends = ["numpy"]
    if _kernels.HAVE_NUMBA:
        start = time.perf_counter()
        _kernels.rk4_loops(y0[:1], omega, dt, 1, 0.0, mask[:2], backend="numba")
        print(f"numba first call (compile or cache load): {time.perf_counter() - start:.3f}s")
        backends.insert(0, "numba")
    else:
        print("numba unavailable or disabled; timing numpy only")
    if args.python:
        backends.append("python")

    results = {}
    for name in backends:
        run = lambda: _kernels.rk4_loops(y0, omega, dt, args.steps, 0.0, mask, backend=name)  # noqa: E731
        results[name] = (best_of(run, args.repeat), run()[0])

    ref = results["numpy"][1]
    print(f"batch={args.batch} steps={args.steps} (one period, dt={dt:.3g})")
    for name, (sec, out) in results.items():
        rate = args.batch * args.steps / sec
        diff = float(np.max(np.abs(out - ref)))
        print(f"{name:>6}: {sec:8.4f}s  {rate:12.0f} steps/s  max|diff vs numpy|={diff:.1e}")


if __name__ == "__main__":
    main()
