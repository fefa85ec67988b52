#!/usr/bin/env python3
"""Benchmark: compiled reachability kernel vs the pure-Python fallback.

Two views:

* microbenchmark of the closure itself over random message graphs of
  growing size (the oracle's hot kernel);
* end-to-end oracle checks over a batch of fuzz scenarios with the oracle
  temporarily bound to each kernel.

Run: ``python3 benchmarks/bench_kernel.py [--seeds N]``
"""

import argparse
import time

from cicsim import oracle
from cicsim._reach_py import closure_masks as py_closure
from cicsim.rng import SplitMix64
from cicsim.scenarios import FuzzParams, random_scenario
from cicsim.simulator import run_scenario

try:
    from cicsim._reach_c import closure_masks as c_closure
except ImportError:
    c_closure = None


def random_adjacency(rng, m, density=0.15):
    return [
        sum(1 << j for j in range(m) if rng.random() < density) for _ in range(m)
    ]


def time_closure(impl, graphs, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        for adj in graphs:
            impl(adj)
    return (time.perf_counter() - t0) / (repeat * len(graphs))


def bench_micro():
    print("closure microbenchmark (per call)")
    print(f"{'nodes':>6} {'python':>12} {'cython':>12} {'speedup':>8}")
    rng = SplitMix64(99)
    for m in (8, 16, 24, 32, 48, 64):
        graphs = [random_adjacency(rng, m) for _ in range(20)]
        repeat = max(1, 2000 // m)
        t_py = time_closure(py_closure, graphs, repeat)
        if c_closure is None:
            print(f"{m:6d} {t_py * 1e6:10.2f}us {'-':>12} {'-':>8}")
            continue
        t_c = time_closure(c_closure, graphs, repeat)
        print(
            f"{m:6d} {t_py * 1e6:10.2f}us {t_c * 1e6:10.2f}us "
            f"{t_py / t_c:7.1f}x"
        )


def bench_end_to_end(seeds):
    print(f"\nend-to-end oracle checks over {seeds} fuzz scenarios x 2 protocols")
    runs = []
    for seed in range(seeds):
        scen = random_scenario(FuzzParams(n=3 + seed % 3, events=40, seed=seed))
        for protocol in ("fi", "lazy-fi"):
            runs.append(run_scenario(scen, protocol))
    impls = [("python", py_closure)]
    if c_closure is not None:
        impls.append(("cython", c_closure))
    baseline = None
    for label, impl in impls:
        original = oracle.closure_masks
        oracle.closure_masks = impl
        try:
            t0 = time.perf_counter()
            findings = 0
            for run in runs:
                run.trace._zz_index = None  # drop any cached index
                u, v = oracle.quick_findings(run.trace)
                findings += u + v
            dt = time.perf_counter() - t0
        finally:
            oracle.closure_masks = original
        note = ""
        if baseline is None:
            baseline = dt
        else:
            note = f"  ({baseline / dt:.1f}x vs python)"
        print(f"  {label:8s} {dt:6.3f}s  findings={findings}{note}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=1500)
    args = ap.parse_args()
    if c_closure is None:
        print("note: compiled kernel not built; showing the fallback only\n")
    bench_micro()
    bench_end_to_end(args.seeds)


if __name__ == "__main__":
    main()
