#!/usr/bin/env python3
"""Benchmark the jet kernel backends: numpy fallback vs compiled extension.

Times the four batched operations on identical inputs and prints the
per-point cost and the speedup of the compiled path.
"""

import argparse
import sys
import time

import numpy as np

from cubicform import _layout
from cubicform.kernel import backends
from cubicform.surface import catalog


def best_time(fn, repeat, number):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def build_inputs(order, points, seed):
    rng = np.random.default_rng(seed)
    size = _layout.size(order)
    pos = _layout.position(order)
    a = rng.normal(size=(size, points))
    b = rng.normal(size=(size, points))
    u = 0.1 * rng.normal(size=(size, points))
    v = 0.1 * rng.normal(size=(size, points))
    u[0] = 0.0
    v[0] = 0.0
    x = u.copy()
    y = v.copy()
    x[pos[(1, 0)]] += 2.0
    y[pos[(0, 1)]] += 2.0
    spec = catalog("perturbed_torus")
    uu = rng.uniform(0.0, 6.28, size=points)
    vv = rng.uniform(0.0, 6.28, size=points)
    X, Y, Z = spec.raw_jets("uv", uu, vv, order)
    return {
        "mul": lambda impl: impl.mul(a, b, order),
        "compose": lambda impl: impl.compose(a, u, v, order),
        "invert": lambda impl: impl.invert(x, y, order),
        "monge": lambda impl: impl.monge(X, Y, Z, order),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=20000,
                    help="batch width (default 20000)")
    ap.add_argument("--order", type=int, default=4,
                    help="jet order (default 4)")
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repeats, best is kept (default 5)")
    ap.add_argument("--number", type=int, default=3,
                    help="calls per repeat (default 3)")
    args = ap.parse_args(argv)

    impls = backends()
    ops = build_inputs(args.order, args.points, seed=12345)
    print(f"order {args.order}, {args.points} points, backends: "
          f"{', '.join(sorted(impls))}")
    header = f"{'op':<10}" + "".join(f"{name:>14}" for name in sorted(impls))
    if len(impls) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for op, run in ops.items():
        times = {}
        for name in sorted(impls):
            impl = impls[name]
            run(impl)  # warm up (tables, allocator)
            times[name] = best_time(lambda: run(impl), args.repeat, args.number)
        row = f"{op:<10}" + "".join(
            f"{times[name] * 1e3:>11.2f} ms" for name in sorted(impls))
        if "python" in times and "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
