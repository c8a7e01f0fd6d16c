"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--seconds 20]

Prints microseconds per simulated step for each kernel and backend, and the
speed-up.  Both backends produce identical output (see tests/test_kernels.py).
"""

import argparse
import time

import numpy as np

from chemonav import _layout as L
from chemonav._backend import compiled_kernels, python_kernels
from chemonav.ase import AseParams, Side
from chemonav.environment import NoiseModel, default_arena
from chemonav.levy import run_levy_trial
from chemonav.network import NetworkConfig, WormState, simulate


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(seconds: float, repeat: int):
    arena = default_arena()
    w0 = WormState(*arena.start, 0.4, 0.3)
    dt = 1e-3
    n = int(seconds / dt)
    p = AseParams()
    pa = np.array([getattr(p, f) for f in L.ASE_FIELDS])
    C = np.repeat(np.random.default_rng(0).uniform(20, 70, n // 500 + 1), 500)[:n]

    def ase(k):
        st = np.array([0.0, 1, 0, 0, 1, 0, 40.0])
        k.ase_drive(C, int(Side.RIGHT), pa, dt, 1, st, np.zeros((n, 8)))

    cases = {
        "snn trial": lambda k: simulate(NetworkConfig(), arena, w0, seconds, dt, seed=1,
                                        noise=NoiseModel(12.0, True), backend=k),
        "ase drive": ase,
        # duration long enough that it rarely succeeds early
        "levy trial": lambda k: run_levy_trial(arena, arena.start, 55.0, seconds, seed=3,
                                               backend=k),
    }
    backends = [("python", python_kernels)]
    if compiled_kernels is not None:
        backends.insert(0, ("cython", compiled_kernels))
    print(f"{'kernel':<12}{'backend':<9}{'us/step':>10}{'speed-up':>10}")
    for name, fn in cases.items():
        times = {b: _best(lambda: fn(k), repeat if b == "cython" else 1) for b, k in backends}
        for b, t in times.items():
            su = times["python"] / t if b == "cython" else 1.0
            print(f"{name:<12}{b:<9}{1e6 * t / n:>10.3f}{su:>9.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=20.0, help="simulated time per case")
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    bench(a.seconds, a.repeat)


if __name__ == "__main__":
    main()
