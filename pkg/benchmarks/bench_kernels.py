"""Timing comparison of the compiled kernels against the numpy fallback.

Runs forward and backward passes for both KAN head kinds over a sweep of
batch shapes and prints a table with the per-call times and the speedup
of whichever backends are available.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 50 --shapes 256x768x4x5
"""

import argparse
import time

import numpy as np

import kanprobe as kp
from kanprobe import backend


def parse_shape(text):
    try:
        n, d, c, g = (int(v) for v in text.split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}, want NxDxCxG")
    return n, d, c, g


DEFAULT_SHAPES = [
    (64, 64, 4, 5),
    (64, 768, 4, 5),
    (256, 768, 4, 5),
    (256, 768, 50, 5),
]


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(kind, shape, repeats, seed=0):
    n, d, c, g = shape
    head = kp.init_head(kind, d, c, g, seed=seed)
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2.0, 2.0, (n, d))
    GL = rng.normal(0.0, 1.0, (n, c))
    times = {}
    for name in backend.available():
        backend.set_backend(name)
        kp.forward_batch(head, X)  # warm up any lazy setup
        times[name, "fwd"] = best_of(lambda: kp.forward_batch(head, X), repeats)
        times[name, "bwd"] = best_of(lambda: kp.backward_batch(head, X, GL), repeats)
    return times


def fmt_time(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f}us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f}ms"
    return f"{seconds:8.2f}s "


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="take the best of this many timed calls")
    parser.add_argument("--shapes", type=parse_shape, nargs="*",
                        default=DEFAULT_SHAPES, metavar="NxDxCxG")
    parser.add_argument("--kinds", nargs="*", default=["frkan", "kan"],
                        choices=["frkan", "kan"])
    args = parser.parse_args(argv)

    names = backend.available()
    print(f"backends: {', '.join(names)}")
    if len(names) < 2:
        print("(compiled extension not built; timing the fallback alone)")
    header = f"{'kind':6} {'shape (NxDxCxG)':18} {'pass':4}"
    for name in names:
        header += f" {name:>10}"
    if "compiled" in names and "numpy" in names:
        header += f" {'speedup':>8}"
    print(header)
    print("-" * len(header))

    prev = backend.active()
    try:
        for kind in args.kinds:
            for shape in args.shapes:
                times = bench_case(kind, shape, args.repeats)
                label = "x".join(str(v) for v in shape)
                for passname in ("fwd", "bwd"):
                    row = f"{kind:6} {label:18} {passname:4}"
                    for name in names:
                        row += f" {fmt_time(times[name, passname])}"
                    if ("compiled", passname) in times and ("numpy", passname) in times:
                        ratio = times["numpy", passname] / times["compiled", passname]
                        row += f" {ratio:7.2f}x"
                    print(row)
    finally:
        backend.set_backend(prev)


if __name__ == "__main__":
    main()
