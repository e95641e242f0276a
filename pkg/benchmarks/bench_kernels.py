#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times each hot kernel on representative sizes, then a full 1D and 2D IMEX
step through each backend.  Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from chondrosim._kernels import _numpy as fallback

try:
    from chondrosim._kernels import _native as native
except ImportError:
    native = None


def timeit(fn, repeats: int) -> float:
    fn()  # warm up
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def kernel_cases(rng: np.random.Generator):
    n1 = 401
    ny, nx = 101, 101
    u1 = rng.normal(size=n1)
    c1 = rng.random(n1)
    h1 = rng.normal(size=n1)
    fw1 = np.exp(0.1 * rng.normal(size=n1 - 1))
    u2 = rng.normal(size=(ny, nx))
    c2 = rng.random((ny, nx))
    h2 = rng.normal(size=(ny, nx))
    fwx = np.exp(0.1 * rng.normal(size=(ny, nx - 1)))
    fwy = np.exp(0.1 * rng.normal(size=(ny - 1, nx)))
    lo = rng.random(n1)
    di = 4.0 + rng.random(n1)
    up = rng.random(n1)
    rhs = rng.normal(size=n1)
    return [
        ("laplacian_1d (n=401)", lambda k: k.laplacian_1d(u1, 0.0025)),
        ("laplacian_2d (101x101)", lambda k: k.laplacian_2d(u2, 0.1, 0.1)),
        ("upwind_1d (n=401)", lambda k: k.upwind_divergence_1d(c1, h1, 3.7, 0.0025)),
        ("upwind_2d (101x101)", lambda k: k.upwind_divergence_2d(c2, h2, 3.7, 0.1, 0.1)),
        ("weighted_lap_1d (n=401)", lambda k: k.weighted_laplacian_1d(u1, fw1, 0.0025)),
        ("weighted_lap_2d (101x101)", lambda k: k.weighted_laplacian_2d(u2, fwx, fwy, 0.1, 0.1)),
        ("thomas_solve (n=401)", lambda k: k.thomas_solve(lo, di, up, rhs)),
    ]


def step_cases():
    import chondrosim._kernels as kernels
    from chondrosim import (
        Grid,
        ImexConfig,
        build_initial_fields,
        builtin_scenario,
        step_imex,
    )

    def bench_step(scenario: str, resolution):
        spec = builtin_scenario(scenario)
        import dataclasses

        spec = dataclasses.replace(spec, resolution=resolution)
        grid = spec.make_grid()
        fields = build_initial_fields(spec, grid)
        cfg = ImexConfig(dt=1e-3, t_end=1.0)

        def run():
            step_imex(grid, fields, spec.params, cfg)

        return run

    label = f"full step via selected backend ({kernels.BACKEND})"
    return label, bench_step("scenario1-b3.7", (401,)), bench_step("2d-gaussian", (101, 101))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    cases = kernel_cases(rng)
    print(f"{'kernel':32} {'numpy':>12} {'native':>12} {'speedup':>9}")
    for name, call in cases:
        t_np = timeit(lambda: call(fallback), args.repeats)
        if native is not None:
            t_nat = timeit(lambda: call(native), args.repeats)
            print(f"{name:32} {t_np * 1e6:>10.1f}us {t_nat * 1e6:>10.1f}us {t_np / t_nat:>8.1f}x")
        else:
            print(f"{name:32} {t_np * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
    if native is None:
        print("\ncompiled extension not available; build with: python setup.py build_ext --inplace")

    label, step_1d, step_2d = step_cases()
    print(f"\n{label}")
    print(f"  1D step (n=401):     {timeit(step_1d, max(20, args.repeats // 10)) * 1e6:10.1f}us")
    print(f"  2D step (101x101):   {timeit(step_2d, max(5, args.repeats // 40)) * 1e6:10.1f}us")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
