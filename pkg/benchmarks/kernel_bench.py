#!/usr/bin/env python3
"""Benchmark the per-frame interference kernel: numba lane vs numpy fallback.

Also times a small end-to-end simulate() in both lanes.  Run as:

    python benchmarks/kernel_bench.py
"""

import time

import numpy as np

import loramcp as lm
from loramcp._kernels import frame_interference, numba_enabled, warm_up
from loramcp.config import DEFAULT_PARAMS, FULL


def bench_kernel(n_nodes: int, active_frac: float, repeats: int = 200) -> dict:
    rng = np.random.default_rng(0)
    table = lm.build_sf_table()
    coef = rng.random(n_nodes) * 1e-3
    lq = rng.choice(table.toa, n_nodes)
    k = int(n_nodes * active_frac)
    idx = rng.choice(n_nodes, k, replace=False).astype(np.int64)
    t = rng.uniform(-1.5, 1.5, k)
    g = rng.standard_exponential(k)
    out = {}
    for lane, flag in (("numba", True), ("numpy", False)):
        if flag and not numba_enabled():
            out[lane] = float("nan")
            continue
        if flag:
            warm_up(True)
            frame_interference(coef, lq, idx, t, g, 0.682, use_numba=True)
        t0 = time.perf_counter()
        for _ in range(repeats):
            frame_interference(coef, lq, idx, t, g, 0.682, use_numba=flag)
        out[lane] = (time.perf_counter() - t0) / repeats * 1e3
    return out


def bench_simulate() -> dict:
    table = lm.build_sf_table()
    cfg = lm.SimConfig(
        params=DEFAULT_PARAMS, table=table, q0=2,
        gamma_grid_db=tuple(float(g) for g in range(-12, 7, 2)),
        n_deployments=10, n_frames_per_deployment=50,
        window_radius=8.0, seed=7, variant=FULL, n_workers=1,
    )
    out = {}
    for lane, flag in (("numba", True), ("numpy", False)):
        if flag and not numba_enabled():
            out[lane] = float("nan")
            continue
        if flag:
            warm_up(True)
        t0 = time.perf_counter()
        lm.simulate(cfg, use_numba=flag)
        out[lane] = time.perf_counter() - t0
    return out


def main() -> None:
    print(f"numba available/enabled: {numba_enabled()}")
    print("\nper-frame interference kernel (ms/frame):")
    print(f"{'nodes':>9} {'active':>7} {'numba':>9} {'numpy':>9} {'speedup':>8}")
    for n_nodes, frac in ((2_000, 0.1), (50_000, 0.1), (267_000, 0.1)):
        r = bench_kernel(n_nodes, frac)
        speed = r["numpy"] / r["numba"] if r["numba"] == r["numba"] else float("nan")
        print(f"{n_nodes:>9} {frac:>7.2f} {r['numba']:>9.4f} {r['numpy']:>9.4f} {speed:>8.2f}x")
    print("\nend-to-end simulate(), 10 deployments x 50 frames, window 8 km (s):")
    r = bench_simulate()
    speed = r["numpy"] / r["numba"] if r["numba"] == r["numba"] else float("nan")
    print(f"  numba {r['numba']:.2f}s | numpy {r['numpy']:.2f}s | speedup {speed:.2f}x")


if __name__ == "__main__":
    main()
