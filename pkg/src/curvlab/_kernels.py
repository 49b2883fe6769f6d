"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The one kernel that dominates exact-dimension computations at scale is
Gaussian elimination mod p (rank certification over two random primes).  It is
compiled with ``numba.njit`` when available; setting the environment variable

    CURVLAB_NO_NUMBA=1

(or any truthy value) selects the vectorized pure-numpy implementation
instead.  Both paths are exercised by the test suite and compared by
``benchmarks/bench_rank_modp.py``.

Primes are kept below 2**31 so that products of two residues fit in int64.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("CURVLAB_NO_NUMBA", "").strip() not in ("", "0", "false", "False")


def rank_modp_numpy(a: np.ndarray, p: int) -> int:
    """Rank of ``a`` over Z_p; vectorized row-reduction, numpy only."""
    m = np.mod(a.astype(np.int64, copy=True), p)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv], :] = m[[piv, r], :]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r, c:] = (m[r, c:] * inv) % p
        factors = m[r + 1 :, c]
        live = np.nonzero(factors)[0]
        if live.size:
            sub = m[r + 1 :, c:]
            sub[live] = (sub[live] - factors[live, None] * m[r, c:]) % p
        r += 1
    return r


try:  # pragma: no cover - exercised indirectly
    if _numba_disabled():
        raise ImportError("numba disabled by CURVLAB_NO_NUMBA")
    from numba import njit

    @njit(cache=True, nogil=True)
    def _rank_modp_jit(m: np.ndarray, p: np.int64) -> np.int64:  # pragma: no cover
        rows, cols = m.shape
        for i in range(rows):
            for j in range(cols):
                m[i, j] %= p
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if m[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, cols):
                    t = m[r, j]
                    m[r, j] = m[piv, j]
                    m[piv, j] = t
            # modular inverse of the pivot by Fermat
            base = m[r, c] % p
            e = p - 2
            inv = np.int64(1)
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            for j in range(c, cols):
                m[r, j] = (m[r, j] * inv) % p
            for i in range(r + 1, rows):
                f = m[i, c]
                if f != 0:
                    for j in range(c, cols):
                        m[i, j] = (m[i, j] - f * m[r, j]) % p
            r += 1
        return r

    def rank_modp(a: np.ndarray, p: int) -> int:
        """Rank of ``a`` over Z_p (numba path)."""
        m = np.ascontiguousarray(a, dtype=np.int64).copy()
        return int(_rank_modp_jit(m, np.int64(p)))

    BACKEND = "numba"

except ImportError:
    def rank_modp(a: np.ndarray, p: int) -> int:
        """Rank of ``a`` over Z_p (numpy fallback path)."""
        return rank_modp_numpy(a, p)

    BACKEND = "numpy"
