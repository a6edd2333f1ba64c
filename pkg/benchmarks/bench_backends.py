"""Benchmark the compiled core against the pure-Python fallback.

Runs the same workloads through both kernels, checks the outputs are
bit-identical, and reports cell-steps per second plus the speedup.

Usage: python3 benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fhnchain import ModelParams, available_backends, simulate


def run_case(name: str, params: ModelParams, repeats: int) -> None:
    backends = available_backends()
    cell_steps = params.n_steps * params.n_cells
    print(f"\n{name}: {params.n_cells} cell(s) x {params.n_steps} steps "
          f"({cell_steps:.2e} cell-steps)")
    results = {}
    for backend in backends:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            res = simulate(params, backend=backend)
            best = min(best, time.perf_counter() - t0)
        results[backend] = (best, res)
        print(f"  {backend:9s} {best:8.3f} s   {cell_steps / best:.3e} cell-steps/s")
    if len(results) == 2:
        (tc, rc), (tp, rp) = results["compiled"], results["python"]
        identical = (np.array_equal(rc.u, rp.u) and np.array_equal(rc.v, rp.v)
                     and all(np.array_equal(a, b)
                             for a, b in zip(rc.kicks.times, rp.kicks.times)))
        print(f"  speedup {tp / tc:6.1f}x   outputs bit-identical: {identical}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="shorter horizons, single repeat")
    args = parser.parse_args()
    repeats = 1 if args.quick else 3
    scale = 0.2 if args.quick else 1.0

    t_single = round(500.0 * scale)
    t_chain = round(200.0 * scale)
    run_case("single cell, alpha=8",
             ModelParams(alpha=8.0, t_end=t_single, t_transient=0.0), repeats)
    run_case("20-cell chain, alpha=50",
             ModelParams(alpha=50.0, n_cells=20, t_end=t_chain, t_transient=0.0),
             repeats)
    run_case("100-cell chain, alpha=50",
             ModelParams(alpha=50.0, n_cells=100, t_end=t_chain, t_transient=0.0),
             max(1, repeats - 2))


if __name__ == "__main__":
    main()
