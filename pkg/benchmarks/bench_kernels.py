#!/usr/bin/env python3
"""Benchmark the convolution kernel backends against each other.

Times forward / weight-gradient / input-gradient on the layer shapes the
multi-scale network actually runs at desk scale, plus one full training
step, for every available backend (compiled extension, NumPy im2col,
reference loops).  The reference backend is skipped for the large shapes
unless --all is given.

Usage: python benchmarks/bench_kernels.py [--repeats N] [--all]
"""

import argparse
import time

import numpy as np

from bclab.nn import build, kernels, msnet
from bclab.nn.msnet import BankSpec, NetConfig
from bclab.training import LossWeights, combined_loss_grad

# (batch, in_ch, out_ch, side, kernel): the desk-profile hot layers
LAYER_SHAPES = [
    (32, 5, 24, 64, 3),
    (32, 24, 48, 64, 3),
    (32, 48, 24, 64, 3),
    (32, 24, 1, 64, 5),
    (32, 24, 48, 32, 3),
]


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_layers(backends, repeats):
    rng = np.random.default_rng(0)
    print(f"{'shape (n,c,o,s,k)':<24} {'op':<8}", end="")
    for b in backends:
        print(f" {b:>12}", end="")
    print()
    for n, c, o, side, k in LAYER_SHAPES:
        a = k // 2
        xp = rng.standard_normal((n, c, side + 2 * a, side + 2 * a)).astype(np.float32)
        w = rng.standard_normal((o, c, k, k)).astype(np.float32)
        gy = rng.standard_normal((n, o, side, side)).astype(np.float32)
        macs = n * side * side * c * o * k * k
        calls = {
            "forward": lambda: kernels.conv_forward(xp, w),
            "grad_w": lambda: kernels.conv_grad_weights(xp, gy),
            "grad_x": lambda: kernels.conv_grad_input(gy, w, *xp.shape[2:]),
        }
        for op, fn in calls.items():
            print(f"{str((n, c, o, side, k)):<24} {op:<8}", end="")
            for backend in backends:
                kernels.set_backend(backend)
                dt = time_call(fn, repeats)
                print(f" {1e3 * dt:8.1f} ms", end="")
            print(f"   ({macs / 1e9:.2f} GMAC)")


def bench_training_step(backends, repeats):
    rng = np.random.default_rng(1)
    banks = tuple(BankSpec(d, (24, 48, 24, 1), (3, 3, 3, 5)) for d in (4, 2, 1))
    net = build(NetConfig(input_frames=4, banks=banks, seed=0))
    x = rng.standard_normal((32, 4, 64, 64)).astype(np.float32)
    y = rng.standard_normal((32, 1, 64, 64)).astype(np.float32)
    weights = LossWeights()

    def step():
        pred, caches = msnet.forward_with_cache(net, x)
        _, grad = combined_loss_grad(pred, y, weights)
        msnet.backward(net, caches, grad, want_grad_x=False)

    print(f"\n{'full train step (batch 32, 64x64)':<34}", end="")
    for backend in backends:
        kernels.set_backend(backend)
        dt = time_call(step, repeats)
        print(f" {1e3 * dt:8.0f} ms", end="")
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--all", action="store_true",
                        help="include the reference backend in the large benchmarks")
    args = parser.parse_args()

    available = kernels.available_backends()
    backends = [b for b in ("compiled", "numpy") if b in available]
    if args.all:
        backends.append("reference")
    default = kernels.backend_name()
    print(f"available backends: {available}; default: {default}\n")
    try:
        bench_layers(backends, args.repeats)
        bench_training_step(backends, args.repeats)
    finally:
        kernels.set_backend(default)


if __name__ == "__main__":
    main()
