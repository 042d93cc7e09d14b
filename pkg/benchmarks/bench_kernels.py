#!/usr/bin/env python3
"""Time the cross-correlation kernel backends on the real layer shapes.

Runs forward, input-gradient and filter-gradient kernels for both the
numba and pure-numpy implementations and prints a GFLOP/s table.  The
shapes are the two convolution layers of the classifier at a given batch
size, so the numbers translate directly into training throughput.

Usage: python3 benchmarks/bench_kernels.py [--batch 64] [--repeats 5]
"""

import argparse
import time

import numpy as np

from cplxnet import kernels

# (label, input shape, filter shape) per layer of the classifier
CASES = [
    ("conv1 1x3", (None, 1, 2, 128), (256, 1, 1, 3)),
    ("complex 2x(3,2)", (None, 1, 2, 130), (256, 1, 2, 3)),
    ("conv2 2x3", (None, 256, 2, 126), (80, 256, 2, 3)),
]


def flops_forward(xs, fs):
    b, ci, h, w = xs
    co, _, kh, kw = fs
    return 2.0 * b * co * (h - kh + 1) * (w - kw + 1) * ci * kh * kw


def bench(fn, repeats, *args):
    fn(*args)  # warmup / jit compile
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = [("numpy", kernels.numpy_kernels())]
    try:
        backends.append(("numba", kernels.numba_kernels()))
    except ImportError:
        print("numba unavailable; benchmarking the numpy backend only")

    rng = np.random.default_rng(0)
    print(f"batch={args.batch}  active backend: {kernels.active_backend()}")
    print(f"{'case':<18} {'pass':<10} " +
          " ".join(f"{n:>14}" for n, _ in backends))

    for label, xs, fs in CASES:
        xs = (args.batch,) + xs[1:]
        x = rng.normal(size=xs).astype(np.float32)
        f = rng.normal(size=fs).astype(np.float32)
        gf = flops_forward(xs, fs)
        g = None
        for pass_name, idx in (("forward", 0), ("grad_input", 1), ("grad_filter", 2)):
            row = []
            for _, (fwd, bwd_in, bwd_f) in backends:
                if pass_name == "forward":
                    t = bench(fwd, args.repeats, x, f)
                    if g is None:
                        g = fwd(x, f)
                elif pass_name == "grad_input":
                    t = bench(bwd_in, args.repeats, g, f)
                else:
                    t = bench(bwd_f, args.repeats, g, x, fs[2], fs[3])
                row.append(gf / t / 1e9)
            print(f"{label:<18} {pass_name:<10} " +
                  " ".join(f"{r:>11.2f} GF" for r in row))


if __name__ == "__main__":
    main()
