#!/usr/bin/env python3
"""Benchmark the compiled accumulation kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--steps 20000] [--dims 2,4,8]
"""

import argparse
import time

import numpy as np

from afchain import _accel_fallback as fallback
from afchain import accel


def _mats(rng, m, d):
    out = 0.5 * (rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d)))
    return np.ascontiguousarray(out.astype(np.complex128))


def bench_qr(impl, mats, repeat=3):
    d = mats.shape[1]
    best = float("inf")
    for _ in range(repeat):
        q = np.eye(d, dtype=np.complex128)
        logs = np.zeros((mats.shape[0], d))
        t0 = time.perf_counter()
        impl.qr_accumulate(mats, q, logs, 1)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_affine(impl, amats, rvecs, repeat=3):
    d = amats.shape[1]
    best = float("inf")
    for _ in range(repeat):
        x = np.zeros(d, dtype=np.complex128)
        x[0] = 1.0
        inc = np.zeros(amats.shape[0])
        t0 = time.perf_counter()
        impl.affine_accumulate(amats, rvecs, x, 0.0, inc)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--dims", default="2,4,8")
    args = ap.parse_args()
    dims = [int(x) for x in args.dims.split(",")]

    if accel.compiled is None:
        print("compiled extension not built; benchmarking fallback only")
    rng = np.random.default_rng(0)

    print(f"{'kernel':<10} {'d':>3} {'steps':>7} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for d in dims:
        mats = _mats(rng, args.steps, d)
        t_py = bench_qr(fallback, mats)
        if accel.compiled is not None:
            t_cy = bench_qr(accel.compiled, mats)
            print(f"{'qr':<10} {d:>3} {args.steps:>7} {t_py:>9.3f}s {t_cy:>9.3f}s {t_py / t_cy:>7.1f}x")
        else:
            print(f"{'qr':<10} {d:>3} {args.steps:>7} {t_py:>9.3f}s {'-':>10} {'-':>8}")

        rvecs = np.ascontiguousarray(
            (rng.standard_normal((args.steps, d)) + 1j * rng.standard_normal((args.steps, d))).astype(np.complex128)
        )
        t_py = bench_affine(fallback, mats, rvecs)
        if accel.compiled is not None:
            t_cy = bench_affine(accel.compiled, mats, rvecs)
            print(f"{'affine':<10} {d:>3} {args.steps:>7} {t_py:>9.3f}s {t_cy:>9.3f}s {t_py / t_cy:>7.1f}x")
        else:
            print(f"{'affine':<10} {d:>3} {args.steps:>7} {t_py:>9.3f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
