"""Compare the numba and numpy Monte Carlo kernels.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]

Reports best-of-R wall time per backend and checks that both count the
same exceedances.
"""

import argparse
import time

from molauth import _backend
from molauth.channel import ChannelParams
from molauth.detect import MeasurementModel, compute_threshold
from molauth.kernels import count_exceedances
from molauth.montecarlo import Scenario
from molauth.rng import derive_seed


def scenario(L):
    alice = ChannelParams.centered(1.0, 20.0, 5e5, L)
    eve = ChannelParams(1.0, 22.0, 5e5, L, alice.tap_spacing, alice.first_tap_time)
    return Scenario(alice, eve, MeasurementModel.isotropic(1.0, L))


def bench(backend, args, repeat):
    count_exceedances(*args[:-1], 1000, backend=backend)  # warm-up / JIT
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        count = count_exceedances(*args, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, count


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    opts = parser.parse_args()
    backends = ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else [])
    print(f"default backend: {_backend.default_backend()}  trials: {opts.trials}")
    print(f"{'L':>3} " + " ".join(f"{b:>14}" for b in backends) + "   speedup   counts")
    for L in (4, 8, 12):
        s = scenario(L)
        args = (s.h_eve.taps, s.h_alice.taps, s.measurement.cholesky,
                compute_threshold(0.05, L), derive_seed(1, 1), opts.trials)
        results = {b: bench(b, args, opts.repeat) for b in backends}
        times = " ".join(f"{results[b][0] * 1e3:11.1f} ms" for b in backends)
        speedup = results["numpy"][0] / results["numba"][0] if "numba" in results else float("nan")
        counts = {r[1] for r in results.values()}
        print(f"{L:>3} {times}   {speedup:6.1f}x   {'match' if len(counts) == 1 else counts}")


if __name__ == "__main__":
    main()
