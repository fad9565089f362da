#!/usr/bin/env python3
"""Compare the compiled kernel against the pure-Python fallback.

Both backends run the identical source (src/dotsim/_kernel_impl.py); this
script times the strong-localization reference scenario in both formulations
on each backend and prints per-step costs.  Run from the repo root:

    python benchmarks/kernel_benchmark.py [--steps N] [--repeats R]
"""

import argparse
import math
import statistics
import time

import numpy as np

import dotsim._kernel_impl as kernel_py

try:
    import dotsim._kernel_c as kernel_c
except ImportError:
    kernel_c = None

# strong-localization drive: k=1, Omega=1.9, Omega_w/omega=5.05, omega=10
AMP_ARGS = (1.0, 0.0, 0.0, 0.0, 1.0, 1.9, 25.25, 10.0, 0.0, 0, 1.0)
ANG_ARGS = (1e-6, -math.pi / 2.0, 0.0, 1.0, 1.9, 25.25, 10.0, 0.0, 0, 1.0)


def run_once(mod, formulation, n_steps, dt):
    rec = [np.zeros(2) for _ in range(9)]
    t_end = n_steps * dt
    if formulation == "amplitude":
        out = mod.run_amplitude(*AMP_ARGS, t_end, dt, n_steps, n_steps, *rec)
    else:
        out = mod.run_angle(*ANG_ARGS, t_end, dt, n_steps, n_steps,
                            1e-8, 0, *rec)
    assert out[0] == 0, "kernel reported a non-finite state"


def median_time(mod, formulation, n_steps, dt, repeats):
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        run_once(mod, formulation, n_steps, dt)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    dt = 1e-4

    backends = [("python", kernel_py)]
    if kernel_c is not None:
        backends.insert(0, ("compiled", kernel_c))
    else:
        print("note: dotsim._kernel_c not built; showing the fallback only\n")

    print(f"{args.steps} RK4 steps, dt={dt:g}, median of {args.repeats} runs\n")
    print(f"{'backend':>9}  {'formulation':>11}  {'total':>9}  {'ns/step':>8}")
    results = {}
    for name, mod in backends:
        for formulation in ("amplitude", "angle"):
            t = median_time(mod, formulation, args.steps, dt, args.repeats)
            results[(name, formulation)] = t
            print(f"{name:>9}  {formulation:>11}  {t:8.4f}s  {1e9 * t / args.steps:8.0f}")

    if kernel_c is not None:
        print()
        for formulation in ("amplitude", "angle"):
            ratio = results[("python", formulation)] / results[("compiled", formulation)]
            print(f"compiled speedup, {formulation}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
