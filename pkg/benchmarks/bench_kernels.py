"""Micro-benchmark of the compiled kernels against the pure NumPy fallback.

Times the two sparse mat-vecs, the fused PDHG step, and the gap ray scan
on random flow incidence instances of growing size, printing ns/op and the
compiled-over-pure speedup.  Run as:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from tulp.kernels import available_backends
from tulp.tu import gen_min_cost_flow, random_flow_spec

SIZES = [(50, 150), (1_000, 4_000), (20_000, 80_000)]
TARGET_SECONDS = 0.25


def _time(fn, *args) -> float:
    """Best-of-three ns per call, auto-scaled repeat count."""
    fn(*args)  # warm up
    reps = 1
    while True:
        start = time.perf_counter()
        for _ in range(reps):
            fn(*args)
        elapsed = time.perf_counter() - start
        if elapsed > TARGET_SECONDS / 3 or reps > 1_000_000:
            return elapsed / reps * 1e9
        reps *= 4


def main():
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not available; timing the fallback only")
    for nodes, arcs in SIZES:
        lp = gen_min_cost_flow(random_flow_spec(nodes, arcs, seed=0), seed=0)
        sp = lp.A
        ci, cr, cd = sp._csc_arrays()
        rng = np.random.default_rng(1)
        x = np.abs(rng.standard_normal(lp.m2))
        y = rng.standard_normal(lp.m1)
        gx = rng.standard_normal(lp.m2)
        cases = {
            "csr_matvec": lambda impl: impl.csr_matvec(sp.indptr, sp.indices, sp.data, x),
            "csc_rmatvec": lambda impl: impl.csc_rmatvec(ci, cr, cd, y),
            "pdhg_step": lambda impl: impl.pdhg_step(sp.indptr, sp.indices, sp.data,
                                                     ci, cr, cd, lp.b, lp.c, x, y, 0.1),
            "ray_scan": lambda impl: impl.ray_scan(x, gx, 1.0, 0.5),
        }
        print(f"\n{nodes} nodes / {arcs} arcs (nnz = {sp.nnz})")
        print(f"  {'kernel':<12} {'pure ns':>12} {'compiled ns':>12} {'speedup':>8}")
        for name, call in cases.items():
            pure_ns = _time(call, backends["pure"])
            if "compiled" in backends:
                comp_ns = _time(call, backends["compiled"])
                print(f"  {name:<12} {pure_ns:12.0f} {comp_ns:12.0f} "
                      f"{pure_ns / comp_ns:7.1f}x")
            else:
                print(f"  {name:<12} {pure_ns:12.0f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
