"""Benchmark the mod-p rank kernel: numba JIT path vs the pure-numpy fallback.

The matrices mirror the real workload: coefficient matrices of graded pieces
of the Veronese minor ideal (very sparse, two nonzeros per row) plus dense
random-rank matrices.  Run:

    python3 benchmarks/bench_rank_modp.py

Select the backend with CURVLAB_NO_NUMBA=1 to confirm the fallback is what
you are measuring, or leave it unset to compare both in one process (the
fallback implementation is importable directly).
"""

from __future__ import annotations

import time

import numpy as np

from curvlab import registry
from curvlab._kernels import BACKEND, rank_modp, rank_modp_numpy
from curvlab.presentation import degree_basis, presentation_from_dict, submodule_rows

PRIME = 2147483629


def veronese_matrix(n: int) -> np.ndarray:
    pres = presentation_from_dict(registry.spec_dict("veronese"))
    cols, _ = degree_basis(pres.spec, n)
    rows = submodule_rows(pres, n)
    dense = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            dense[i, c] = int(v.re)
    return dense


def dense_random(m: int, n: int, rank: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (
        rng.integers(-9, 10, size=(m, rank)) @ rng.integers(-9, 10, size=(rank, n))
    ).astype(np.int64)


def bench(label: str, a: np.ndarray, repeats: int = 3) -> None:
    results = {}
    for name, fn in (("numba" if BACKEND == "numba" else "active", rank_modp), ("numpy", rank_modp_numpy)):
        best = float("inf")
        rank = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            rank = fn(a, PRIME)
            best = min(best, time.perf_counter() - t0)
        results[name] = (rank, best)
    ranks = {r for r, _ in results.values()}
    assert len(ranks) == 1, f"backend disagreement on {label}: {results}"
    line = " | ".join(f"{name}: {dt * 1e3:8.1f} ms" for name, (_, dt) in results.items())
    print(f"{label:<28} rank={ranks.pop():<6} {line}")


def main() -> None:
    print(f"active backend: {BACKEND}")
    # warm up the JIT so compile time is not measured
    rank_modp(np.eye(4, dtype=np.int64), PRIME)
    for n in (5, 6, 7, 8):
        bench(f"veronese degree {n}", veronese_matrix(n))
    for m, n, r in ((300, 300, 150), (800, 600, 400), (1500, 1200, 900)):
        bench(f"dense {m}x{n} rank {r}", dense_random(m, n, r, seed=n))


if __name__ == "__main__":
    main()
