"""Compiled vs pure-Python kernels on desk-sized workloads.

Run with ``python3 benchmarks/bench_kernels.py``. Prints best-of-N wall
times and the maximum difference between the two implementations.
"""

import argparse
import time

import numpy as np

from genburgers import _kernels_py

try:
    from genburgers import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def duhamel_case(m=73, n=2600, seed=0):
    from genburgers.mild_solver import duhamel_time_weights

    rng = np.random.default_rng(seed)
    tau = np.concatenate([[0.0], np.geomspace(2e-5, 2e-2, m - 1)])
    W = duhamel_time_weights(tau, sqrt_start=True)
    omega2 = (np.pi * np.arange(n) / n / 0.0025) ** 2
    S = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return S, omega2, tau, W


def fd_case(nx=2001, nsteps=2000, upwind=False):
    xs = np.linspace(-2.5, 2.5, nx)
    dx = xs[1] - xs[0]
    u0 = np.tanh(xs / 0.05)
    h = 1.0 / (1.0 + xs * xs)
    return u0, h, dx, 0.4 * dx * dx, nsteps, -1.0, 1.0, upwind


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    impls = [("python", _kernels_py)] + ([("compiled", _kernels)] if _kernels else [])

    S, omega2, tau, W = duhamel_case()
    results = {}
    for name, mod in impls:
        t, out = best_of(lambda: mod.duhamel_accumulate(S, omega2, tau, W), args.repeat)
        results[name] = out
        print(f"duhamel_accumulate  {name:<9} {t * 1e3:9.2f} ms")
    if len(results) == 2:
        diff = np.max(np.abs(results["python"] - results["compiled"]))
        print(f"duhamel_accumulate  max |python - compiled| = {diff:.2e}")

    for upwind in (False, True):
        u0, *rest = fd_case(upwind=upwind)
        results = {}
        for name, mod in impls:
            t, out = best_of(lambda: mod.fd_explicit_advance(u0.copy(), *rest), args.repeat)
            results[name] = out
            label = "upwind" if upwind else "central"
            print(f"fd_explicit_advance {name:<9} {t * 1e3:9.2f} ms  ({label})")
        if len(results) == 2:
            diff = np.max(np.abs(results["python"] - results["compiled"]))
            print(f"fd_explicit_advance max |python - compiled| = {diff:.2e}")
    if _kernels is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
