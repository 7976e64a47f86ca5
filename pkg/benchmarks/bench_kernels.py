"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each case runs through the public API with the backend switched between
runs; the best of N wall-clock times is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import cransched as cs
from cransched import _backend
from cransched.graph import CoordinationMode
from cransched.oracle import FeasibleSetSpec, scan_feasible, scan_independent_sets


def _instance(C, B, Z, U, mode=CoordinationMode.HYBRID, seed=1):
    config = cs.NetworkConfig(C, B, Z, U, rng_seed=seed)
    tensor = cs.utility_tensor(cs.generate_instance(config))
    return config, tensor, cs.build_graph(mode, tensor, config)


def _flat_instance(C, B, Z, U, seed=0):
    # near-uniform weights defeat the bound, so the search does real work
    config = cs.NetworkConfig(C, B, Z, U)
    weights = 1.0 + 0.05 * np.random.default_rng(seed).random(config.shape)
    return cs.build_graph(CoordinationMode.SCHEDULING, weights, config)


def cases():
    g_exact = _flat_instance(3, 3, 2, 11)
    _, _, g_greedy = _instance(3, 4, 5, 40)
    cfg_o, t_o, _ = _instance(2, 2, 2, 6)
    _, _, g_scan = _instance(2, 2, 2, 5)
    spec = FeasibleSetSpec.from_config(CoordinationMode.HYBRID, cfg_o)
    return [
        ("exact branch and bound   (C,B,Z,U)=(3,3,2,11)", lambda: cs.solve_exact(g_exact)),
        ("greedy + local search    (C,B,Z,U)=(3,4,5,40)", lambda: cs.solve_greedy(g_greedy)),
        ("oracle enumeration       (C,B,Z,U)=(2,2,2,6) ", lambda: scan_feasible(spec, t_o)),
        ("independent-set scan     (C,B,Z,U)=(2,2,2,5) ", lambda: scan_independent_sets(g_scan)),
    ]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not _backend.compiled_available():
        raise SystemExit("compiled kernels not built; run `pip install -e . --no-build-isolation`")
    previous = _backend.backend_name()
    print(f"{'case':48s} {'compiled':>11s} {'python':>11s} {'speedup':>9s}")
    try:
        for name, fn in cases():
            row = {}
            for backend in ("compiled", "python"):
                _backend.use_backend(backend)
                row[backend] = best_time(fn, args.repeat)
            speedup = row["python"] / row["compiled"]
            print(f"{name:48s} {row['compiled'] * 1e3:9.2f}ms {row['python'] * 1e3:9.2f}ms {speedup:8.1f}x")
    finally:
        _backend.use_backend(previous)


if __name__ == "__main__":
    main()
