"""Exhaustive coloring enumeration: compiled loops and vectorized twins.

Both backends return the same answer, including the tie-break: among optimal
colorings the lexicographically smallest sign vector wins, ordering ``+1``
before ``-1``. Because ``x`` and ``-x`` score the same, the first sign is
pinned to ``+1`` and only ``2^(k-1)`` colorings are visited.

A coloring of ``k`` columns is encoded by the integer
``key = sum_{j : x_j = -1} 2^(k-1-j)``, so smaller keys are lexicographically
smaller vectors.
"""

import numpy as np

from . import _accel
from ._accel import njit


def _tie_tol(A):
    return 1e-12 * (1.0 + float(np.abs(A).sum()))


@njit
def _disc_cols_compiled(A, cols, tol):
    m = A.shape[0]
    k = cols.shape[0]
    s = np.zeros(m)
    for c in range(k):
        for i in range(m):
            s[i] += A[i, cols[c]]
    best = 0.0
    for i in range(m):
        if abs(s[i]) > best:
            best = abs(s[i])
    best_key = 0
    key = 0
    signs = np.ones(k)
    total = 1 << (k - 1)
    for step in range(1, total):
        # Gray code: flip the column of the lowest set bit of step
        bit = 0
        while not (step >> bit) & 1:
            bit += 1
        j = bit + 1
        col = cols[j]
        if signs[j] > 0:
            for i in range(m):
                s[i] -= 2.0 * A[i, col]
        else:
            for i in range(m):
                s[i] += 2.0 * A[i, col]
        signs[j] = -signs[j]
        key ^= 1 << (k - 1 - j)
        val = 0.0
        for i in range(m):
            if abs(s[i]) > val:
                val = abs(s[i])
        if val < best - tol:
            best = val
            best_key = key
        elif val <= best + tol and key < best_key:
            best_key = key
    return best, best_key


@njit
def _herdisc_compiled(A, tol):
    n = A.shape[1]
    best = -1.0
    best_mask = 0
    cols = np.empty(n, dtype=np.int64)
    for mask in range(1, 1 << n):
        k = 0
        for j in range(n):
            if (mask >> j) & 1:
                cols[k] = j
                k += 1
        val, _ = _disc_cols_compiled(A, cols[:k], tol)
        if val > best + tol:
            best = val
            best_mask = mask
    return best, best_mask


_CHUNK = 1 << 15


def _disc_cols_numpy(A, cols, tol):
    B = A[:, cols]
    k = B.shape[1]
    total = 1 << (k - 1)
    best, best_key = np.inf, 0
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        keys = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = (keys[:, None] >> shifts[None, :]) & 1
        X = 1.0 - 2.0 * bits
        vals = np.max(np.abs(X @ B.T), axis=1)
        lo = vals.min()
        if lo < best - tol:
            best = lo
            best_key = int(keys[np.nonzero(vals <= lo + tol)[0][0]])
        elif lo <= best + tol:
            cand = int(keys[np.nonzero(vals <= best + tol)[0][0]])
            best_key = min(best_key, cand)
            best = min(best, lo)
    return float(best), best_key


def _herdisc_numpy(A, tol):
    n = A.shape[1]
    best, best_mask = -1.0, 0
    for mask in range(1, 1 << n):
        cols = np.array([j for j in range(n) if (mask >> j) & 1], dtype=np.int64)
        val, _ = _disc_cols_numpy(A, cols, tol)
        if val > best + tol:
            best, best_mask = val, mask
    return best, best_mask


def _backend(backend):
    if backend is None:
        backend = "numba" if _accel.USE_NUMBA else "numpy"
    if backend == "numba" and not _accel.HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def key_to_signs(key, k):
    return np.array([-1.0 if (key >> (k - 1 - j)) & 1 else 1.0 for j in range(k)])


def disc_enumerate(A, cols=None, backend=None):
    """Minimum of ``||A|_cols x||_inf`` over sign vectors; returns ``(value, signs)``."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    if cols is None:
        cols = np.arange(A.shape[1], dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    tol = _tie_tol(A)
    if _backend(backend) == "numba":
        val, key = _disc_cols_compiled(A, cols, tol)
    else:
        val, key = _disc_cols_numpy(A, cols, tol)
    return float(val), key_to_signs(int(key), cols.size)


def herdisc_enumerate(A, backend=None):
    """Maximum over nonempty column subsets of the exact discrepancy.

    Returns ``(value, columns)``; the witness is the smallest subset bitmask
    attaining the maximum.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    tol = _tie_tol(A)
    if _backend(backend) == "numba":
        val, mask = _herdisc_compiled(A, tol)
    else:
        val, mask = _herdisc_numpy(A, tol)
    mask = int(mask)
    return float(val), [j for j in range(A.shape[1]) if (mask >> j) & 1]
