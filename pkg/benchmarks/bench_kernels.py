#!/usr/bin/env python3
"""Benchmark the native kernel extension against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--width 1024] [--height 3000] [--reps 20]
"""

import argparse
import statistics
import time

import numpy as np

from tilecast import _kernels_py

try:
    from tilecast import _kernels as _native
except ImportError:
    _native = None


def timeit(fn, reps):
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--width", type=int, default=1024)
    parser.add_argument("--height", type=int, default=3000)
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    raster = rng.integers(0, 256, (args.height, args.width, 4), dtype=np.uint8).tobytes()
    url = b"https://bench.test/page"
    mb = len(raster) / 1e6

    backends = [("python", _kernels_py)]
    if _native is not None:
        backends.append(("native", _native))
    else:
        print("native extension not built; benchmarking fallback only")

    print(f"raster {args.width}x{args.height} ({mb:.1f} MB RGBA), "
          f"{args.reps} reps, best/median\n")

    results = {}
    header = f"{'kernel':<18}"
    for name, _ in backends:
        header += f"{name + ' best':>14}{name + ' med':>14}"
    print(header + ("   speedup" if len(backends) == 2 else ""))

    cases = {
        "grid_signatures": lambda impl: impl.grid_signatures(
            url, raster, args.width, args.height),
        "crop_rgba 256^2": lambda impl: impl.crop_rgba(
            raster, args.width, args.height, 256, 512, 256, 256),
        "paste_rgba 256^2": lambda impl: impl.paste_rgba(
            raster, args.width, args.height,
            raster[: 4 * 256 * 256], 256, 256, 128, 640),
    }
    for case, make_call in cases.items():
        row = f"{case:<18}"
        times = []
        for name, impl in backends:
            best, med = timeit(lambda impl=impl: make_call(impl), args.reps)
            times.append(best)
            row += f"{best * 1000:>12.2f}ms{med * 1000:>12.2f}ms"
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)
        results[case] = times

    if _native is not None:
        sweep = results["grid_signatures"]
        print(f"\ngrid sweep throughput: python {mb / sweep[0]:.0f} MB/s, "
              f"native {mb / sweep[1]:.0f} MB/s")
        # both backends must agree bit for bit
        assert _native.grid_signatures(url, raster, args.width, args.height) == \
            _kernels_py.grid_signatures(url, raster, args.width, args.height)
        print("parity check: OK")


if __name__ == "__main__":
    main()
