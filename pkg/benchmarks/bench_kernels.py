"""Time the numba and numpy Monte Carlo kernels on the same atom block.

    python3 benchmarks/bench_kernels.py --atoms 4000000 --repeats 5

Both backends must return identical outcome codes; the script checks that
before reporting throughput.
"""
import argparse
import time

import numpy as np

from precollapse import _accel
from precollapse.experiment import ExperimentConfig
from precollapse.experiment._kernels import simulate_block
from precollapse.experiment.engine import _plan


def bench(backend, plan, n, threads, repeats):
    args = (plan.key, 0, n, plan.geom_collapsed, plan.efficiency, plan.p_coherent,
            plan.p_collapsed, plan.p_decay)
    codes = simulate_block(*args, backend=backend, threads=threads)  # warm-up / jit
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        simulate_block(*args, backend=backend, threads=threads)
        times.append(time.perf_counter() - t0)
    return codes, min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", type=int, default=2_000_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    plan = _plan(ExperimentConfig(detector_efficiency=0.9))
    threads = _accel.thread_count()
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    results = {b: bench(b, plan, args.atoms, threads, args.repeats) for b in backends}
    if len(results) == 2:
        assert np.array_equal(results["numpy"][0], results["numba"][0]), "backends disagree"
    print(f"{args.atoms} atoms, {threads} thread(s), best of {args.repeats}")
    for b, (_, t) in results.items():
        print(f"  {b:6s} {t * 1e3:9.1f} ms  {args.atoms / t / 1e6:8.1f} M atoms/s")
    if len(results) == 2:
        print(f"  speedup {results['numpy'][1] / results['numba'][1]:.1f}x, outputs identical")


if __name__ == "__main__":
    main()
