"""Hot kernels: per-column-pair value co-occurrence tables.

The whole synthesis pipeline reduces to questions about which values of one
column ever appear together with which values of another.  This module
computes that structure once, as a flat uint8 buffer holding one d_i x d_j
boolean block per unordered column pair.

Two interchangeable backends exist: a numba @njit kernel (default) and a pure
numpy fallback.  Select with the environment variable

    AFM_FORGE_BACKEND = auto | numba | numpy

`auto` (or unset) picks numba when importable.  Both produce bit-identical
buffers; `afmforge bench --backend both` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*a, **kw):
        def deco(fn):
            return fn
        return deco(a[0]) if a and callable(a[0]) else deco


def active_backend() -> str:
    choice = os.environ.get("AFM_FORGE_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"AFM_FORGE_BACKEND must be auto|numba|numpy, got {choice!r}")
    if choice == "numba" and not HAS_NUMBA:  # pragma: no cover
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


@njit(cache=True)
def _fill_numba(codes_t, dom_sizes, offsets, buf):  # pragma: no cover - jitted
    n = codes_t.shape[0]
    m = codes_t.shape[1]
    pair = 0
    for i in range(n):
        for j in range(i + 1, n):
            dj = dom_sizes[j]
            base = offsets[pair]
            for k in range(m):
                buf[base + codes_t[i, k] * dj + codes_t[j, k]] = 1
            pair += 1


def _fill_numpy(codes_t, dom_sizes, offsets, buf):
    n = codes_t.shape[0]
    pair = 0
    for i in range(n):
        ci = codes_t[i]
        for j in range(i + 1, n):
            dj = int(dom_sizes[j])
            block = buf[offsets[pair]: offsets[pair] + int(dom_sizes[i]) * dj]
            block[ci * dj + codes_t[j]] = 1
            pair += 1


@njit(cache=True)
def _gather_numba(buf, offsets, pair_ids, transposed, di, dj, starts_a, starts_b, out):  # pragma: no cover
    for b in range(pair_ids.shape[0]):
        base = offsets[pair_ids[b]]
        ra, rb = starts_a[b], starts_b[b]
        if transposed[b]:
            for u in range(di[b]):
                for w in range(dj[b]):
                    out[ra + u, rb + w] = buf[base + w * di[b] + u]
        else:
            for u in range(di[b]):
                for w in range(dj[b]):
                    out[ra + u, rb + w] = buf[base + u * dj[b] + w]


def _gather_numpy(buf, offsets, pair_ids, transposed, di, dj, starts_a, starts_b, out):
    for b in range(len(pair_ids)):
        base = offsets[pair_ids[b]]
        if transposed[b]:
            block = buf[base: base + di[b] * dj[b]].reshape(dj[b], di[b]).T
        else:
            block = buf[base: base + di[b] * dj[b]].reshape(di[b], dj[b])
        out[starts_a[b]: starts_a[b] + di[b], starts_b[b]: starts_b[b] + dj[b]] = block


class CoocTables:
    """Co-occurrence blocks for all unordered column pairs of a matrix."""

    def __init__(self, codes_t: np.ndarray, dom_sizes: np.ndarray, backend: str | None = None):
        self.backend = backend or active_backend()
        self.n_cols = codes_t.shape[0]
        self.n_rows = codes_t.shape[1]
        self.dom_sizes = dom_sizes.astype(np.int64)
        n = self.n_cols
        sizes = np.empty(n * (n - 1) // 2, dtype=np.int64)
        p = 0
        for i in range(n):
            for j in range(i + 1, n):
                sizes[p] = self.dom_sizes[i] * self.dom_sizes[j]
                p += 1
        self.offsets = np.zeros(len(sizes), dtype=np.int64)
        if len(sizes):
            self.offsets[1:] = np.cumsum(sizes)[:-1]
        self.buf = np.zeros(int(sizes.sum()) if len(sizes) else 0, dtype=np.uint8)
        if n >= 2:
            fill = _fill_numba if self.backend == "numba" else _fill_numpy
            fill(np.ascontiguousarray(codes_t.astype(np.int32)),
                 self.dom_sizes, self.offsets, self.buf)

    def pair_index(self, i: int, j: int) -> int:
        # i < j required
        n = self.n_cols
        return i * (2 * n - i - 1) // 2 + (j - i - 1)

    def block(self, i: int, j: int) -> np.ndarray:
        """Boolean (d_i, d_j) view for an ordered column pair (copy-free for i<j)."""
        if i < j:
            p = self.pair_index(i, j)
            di, dj = int(self.dom_sizes[i]), int(self.dom_sizes[j])
            return self.buf[self.offsets[p]: self.offsets[p] + di * dj].reshape(di, dj).view(bool)
        p = self.pair_index(j, i)
        dj, di = int(self.dom_sizes[j]), int(self.dom_sizes[i])
        return self.buf[self.offsets[p]: self.offsets[p] + di * dj].reshape(dj, di).view(bool).T

    def row(self, i: int, j: int, u_code: int) -> np.ndarray:
        """Which codes of column j co-occur with code u of column i."""
        return self.block(i, j)[u_code]

    def gather(self, cols_a, cols_b, starts_a, starts_b, out: np.ndarray):
        """Copy blocks for the product cols_a x cols_b into a dense atom matrix.

        Same-column blocks are the diagonal occurrence pattern (a row has one
        value per column).  `starts_*` give each column's atom offset in `out`.
        """
        pair_ids, transposed, di, dj, sa, sb = [], [], [], [], [], []
        for ai, i in enumerate(cols_a):
            for bj, j in enumerate(cols_b):
                if i == j:
                    d = int(self.dom_sizes[i])
                    blockslice = out[starts_a[ai]: starts_a[ai] + d, starts_b[bj]: starts_b[bj] + d]
                    np.fill_diagonal(blockslice, 1)
                    continue
                pair_ids.append(self.pair_index(min(i, j), max(i, j)))
                transposed.append(i > j)
                di.append(int(self.dom_sizes[i]))
                dj.append(int(self.dom_sizes[j]))
                sa.append(starts_a[ai])
                sb.append(starts_b[bj])
        if not pair_ids:
            return
        args = (self.buf,
                self.offsets,
                np.array(pair_ids, dtype=np.int64),
                np.array(transposed, dtype=np.uint8),
                np.array(di, dtype=np.int64),
                np.array(dj, dtype=np.int64),
                np.array(sa, dtype=np.int64),
                np.array(sb, dtype=np.int64),
                out)
        (_gather_numba if self.backend == "numba" else _gather_numpy)(*args)


def warm_up():
    """Trigger jit compilation on a toy input so timed runs measure the algorithm."""
    codes = np.zeros((2, 1), dtype=np.int32)
    t = CoocTables(codes, np.ones(2, dtype=np.int32))
    out = np.zeros((1, 1), dtype=np.uint8)
    t.gather([0], [1], [0], [0], out)
