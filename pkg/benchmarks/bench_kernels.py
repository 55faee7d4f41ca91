"""Benchmark the compiled kernels against the pure numpy fallback.

Runs every descriptor variant on a random image with both engines, checks
that the outputs are bit-identical, and prints the speedup.

Usage: python3 benchmarks/bench_kernels.py [--size 512] [--repeat 3] [--p 8] [--r 1.0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lbptex import GrayImage, NeighborhoodSpec
from lbptex.descriptors import VARIANTS, VariantParams, compute_maps, load_backend


def time_variant(img, params, engine, repeat):
    best = float("inf")
    maps = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        maps, _ = compute_maps(img, params, engine=engine)
        best = min(best, time.perf_counter() - t0)
    return best, maps


def maps_equal(a, b) -> bool:
    if isinstance(a, tuple):
        return all(np.array_equal(x.labels, y.labels) for x, y in zip(a, b))
    return np.array_equal(a.labels, b.labels)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--p", type=int, default=8)
    parser.add_argument("--r", type=float, default=1.0)
    args = parser.parse_args()

    try:
        compiled = load_backend("compiled")
    except ImportError:
        print("compiled extension not available; nothing to compare")
        return 1
    python = load_backend("python")

    rng = np.random.default_rng(0)
    img = GrayImage(rng.integers(0, 256, (args.size, args.size)))
    spec = NeighborhoodSpec(args.p, args.r, "bilinear")

    print(f"image {args.size}x{args.size}, p={args.p}, r={args.r}, best of {args.repeat}")
    print(f"{'variant':12s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}  identical")
    for variant in VARIANTS:
        params = VariantParams(variant, spec)
        t_py, maps_py = time_variant(img, params, python, args.repeat)
        t_cy, maps_cy = time_variant(img, params, compiled, args.repeat)
        same = maps_equal(maps_py, maps_cy)
        print(
            f"{variant:12s} {t_py * 1e3:9.1f}ms {t_cy * 1e3:9.1f}ms {t_py / t_cy:7.1f}x  {same}"
        )
        if not same:
            print(f"  MISMATCH for {variant}")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
