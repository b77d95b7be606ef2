"""Benchmark the compiled DTW kernel against the pure-NumPy fallback.

Runs the same sweep-shaped workload through both backends and reports
wall-clock times plus the speedup ratio. The workload mirrors what a
cross-validation sweep does per held-out scenario: one prefix-recording
pass per (scenario, gauge) pair against the observed waveforms.

Usage:
    python benchmarks/bench_dtw.py [--scenarios N] [--gauges G] [--steps T]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def _load_backends():
    """Return {name: module} for every importable kernel backend."""
    backends = {}
    py = importlib.import_module("tsucast._kernels._dtw_py")
    backends["python"] = py
    try:
        cy = importlib.import_module("tsucast._kernels._dtw_cy")
    except ImportError:
        print("compiled backend not available; benchmarking fallback only")
    else:
        backends["cython"] = cy
    return backends


def _workload(n_scenarios: int, n_gauges: int, n_steps: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    db = rng.normal(size=(n_scenarios * n_gauges, n_steps))
    observed = rng.normal(size=(n_scenarios * n_gauges, n_steps))
    # Window boundaries comparable to the sweep defaults (1..15 min at 5 s).
    fractions = (0.017, 0.033, 0.05, 0.067, 0.083, 0.1, 0.133, 0.167, 0.2, 0.25)
    prefixes = sorted({max(1, int(f * n_steps)) for f in fractions})
    return db, observed, np.asarray(prefixes, dtype=np.int64)


def _time_backend(mod, db, observed, prefixes, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        mod.dtw_prefix_batch(db, observed, prefixes)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenarios", type=int, default=40)
    parser.add_argument("--gauges", type=int, default=16)
    parser.add_argument("--steps", type=int, default=360)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    db, observed, prefixes = _workload(args.scenarios, args.gauges, args.steps)
    cells = db.shape[0] * args.steps * args.steps
    print(
        f"workload: {db.shape[0]} pairs x {args.steps}x{args.steps} cells "
        f"({cells / 1e6:.1f}M DP cells), {len(prefixes)} prefix windows"
    )

    backends = _load_backends()
    results = {}
    outputs = {}
    for name, mod in backends.items():
        elapsed = _time_backend(mod, db, observed, prefixes, args.repeats)
        results[name] = elapsed
        outputs[name] = np.asarray(mod.dtw_prefix_batch(db, observed, prefixes))
        print(f"{name:>8}: {elapsed:8.3f} s  ({cells / elapsed / 1e6:8.1f}M cells/s)")

    if len(outputs) == 2:
        if np.array_equal(outputs["python"], outputs["cython"]):
            print("backends agree bitwise")
        else:
            diff = np.max(np.abs(outputs["python"] - outputs["cython"]))
            print(f"WARNING: backends disagree (max abs diff {diff:.3e})")
        ratio = results["python"] / results["cython"]
        print(f"speedup: compiled is {ratio:.1f}x faster than the fallback")


if __name__ == "__main__":
    main()
