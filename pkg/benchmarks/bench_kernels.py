"""Compare the compiled RK4 kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Both backends integrate
the same covariance and propagator problems; the script reports wall time
per RK4 step, the speed-up, and the maximum relative disagreement of the
final states (which should be at round-off level).
"""
import argparse
import time

import numpy as np

from hotent import kernels
from hotent.dynamics import evolve, propagate_fundamental
from hotent.model import DriveProtocol, SystemParams, ThermalProduct, build_initial_covariance


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--periods", type=float, default=4.0, help="drive periods to integrate")
    ap.add_argument("--steps-per-period", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    params = SystemParams(1.0, 1.0, 0.0025, 0.0025, 0.2, 0.2)
    protocol = DriveProtocol(0.0, 0.5, 1.996)
    sigma0 = build_initial_covariance(ThermalProduct(0.2, 0.2), params)
    t_end = args.periods * protocol.period(params.omega)
    n_steps = int(np.ceil(args.periods * args.steps_per_period))

    print("backend selected at import:", kernels.BACKEND)
    print("%-12s %-10s %12s %12s" % ("problem", "backend", "us/step", "speed-up"))
    for name, run in (
        ("covariance", lambda b: evolve(sigma0, params, protocol, t_end, args.steps_per_period,
                                        backend=b).packed[-1]),
        ("propagator", lambda b: propagate_fundamental(params, protocol, t_end,
                                                       args.steps_per_period, backend=b).entries),
    ):
        results = {}
        for backend in ("python", "compiled"):
            try:
                results[backend] = _time(lambda: run(backend), args.repeat)
            except ImportError:
                continue
        for backend, (secs, _) in results.items():
            speed = results["python"][0] / secs if "python" in results else float("nan")
            print("%-12s %-10s %12.3f %12.1f" % (name, backend, 1e6 * secs / n_steps, speed))
        if len(results) == 2:
            a = np.asarray(results["python"][1], dtype=float)
            b = np.asarray(results["compiled"][1], dtype=float)
            rel = np.max(np.abs(a - b)) / np.max(np.abs(b))
            print("%-12s max relative difference between backends: %.2e" % (name, rel))


if __name__ == "__main__":
    main()
