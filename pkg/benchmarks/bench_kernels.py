"""Time the numba and numpy integrator kernels on the fig2 configuration.

    python benchmarks/bench_kernels.py [--nodes 128] [--steps 10000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from wigner_drift import kernels
from wigner_drift._accel import HAVE_NUMBA
from wigner_drift.evolution import circular_packet
from wigner_drift.kinematics import CircularOrbit, circular_lambda
from wigner_drift.wavepacket import discretize_packet, packet_arrays


def setup(nodes):
    orbit = CircularOrbit(1 / 0.9, 0.8)
    samples = discretize_packet(circular_packet(orbit, 0.1, nodes))
    p, q, w = packet_arrays(samples)
    lam = circular_lambda(orbit).components[None]
    return lam, p, q, w


def bench(backend, args, lam, p, q, w, transport):
    run = lambda: kernels.evolve(lam, p, q, w, np.array([0.0, 0.0, 1.0]), 1.0, 0.005,
                                 args.steps, 100, transport=transport, backend=backend)
    out = run()  # warm-up / JIT compile
    best = np.inf
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        out = run()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=128)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    lam, p, q, w = setup(args.nodes)
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    for transport in (False, True):
        results, times = {}, {}
        for be in backends:
            t, out = bench(be, args, lam, p, q, w, transport)
            results[be], times[be] = out, t
            rate = args.nodes * args.steps / t
            print(f"transport={transport!s:5} {be:6} {t * 1e3:9.1f} ms  {rate / 1e6:7.2f} M sample-steps/s")
        if len(results) == 2:
            diff = np.max(np.abs(results["numpy"][0] - results["numba"][0]))
            print(f"  max |bloch(numpy) - bloch(numba)| = {diff:.2e}")
            print(f"  speedup numba over numpy = {times['numpy'] / times['numba']:.1f}x")
    if not HAVE_NUMBA:
        print("numba unavailable (or WIGNER_DRIFT_NUMBA=0): numpy only")


if __name__ == "__main__":
    main()
