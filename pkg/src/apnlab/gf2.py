"""Dense F2 linear algebra on bit-packed rows.

Row i of a packed matrix is ``words[i]``: column c lives at bit c % 64 of
word c // 64.  Elimination XORs whole words, which is what makes the
4096 x 4096 translate matrices behind the graph ranks tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np


def pack_rows(dense) -> np.ndarray:
    """Pack a 2-D 0/1 array into uint64 words per row."""
    d = np.asarray(dense, dtype=np.uint8)
    if d.ndim != 2:
        raise ValueError("expected a 2-D array")
    rows, cols = d.shape
    width = max(1, -(-cols // 64)) * 64
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = d
    return np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little").view(np.uint64))


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    bits = np.unpackbits(np.ascontiguousarray(words).view(np.uint8), axis=1, bitorder="little")
    return bits[:, :cols]


@numba.njit(cache=True)
def _rank(words, ncols):
    rows, nw = words.shape
    r = 0
    for c in range(ncols):
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if words[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(w, nw):
                t = words[p, k]
                words[p, k] = words[r, k]
                words[r, k] = t
        for i in range(p + 1, rows):
            if words[i, w] & bit:
                for k in range(w, nw):
                    words[i, k] ^= words[r, k]
        r += 1
        if r == rows:
            break
    return r


@numba.njit(cache=True)
def _rref(words, ncols, pivots):
    rows, nw = words.shape
    r = 0
    for c in range(ncols):
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if words[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                t = words[p, k]
                words[p, k] = words[r, k]
                words[r, k] = t
        for i in range(rows):
            if i != r and words[i, w] & bit:
                for k in range(nw):
                    words[i, k] ^= words[r, k]
        pivots[r] = c
        r += 1
        if r == rows:
            break
    return r


def rank(words: np.ndarray, ncols: int | None = None) -> int:
    """Rank of a packed matrix (the input is not modified)."""
    w = np.array(words, dtype=np.uint64, copy=True)
    if w.ndim != 2 or w.shape[0] == 0:
        return 0
    if ncols is None:
        ncols = w.shape[1] * 64
    return int(_rank(w, ncols))


def rref(words: np.ndarray, ncols: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    w = np.array(words, dtype=np.uint64, copy=True)
    if w.shape[0] == 0:
        return w, []
    piv = np.zeros(w.shape[0], dtype=np.int64)
    r = int(_rref(w, ncols, piv))
    return w[:r], [int(c) for c in piv[:r]]


def dense_rank(dense) -> int:
    d = np.asarray(dense)
    if d.size == 0:
        return 0
    return rank(pack_rows(d), d.shape[1])


def solve(dense, rhs) -> tuple[np.ndarray | None, np.ndarray]:
    """Solve A g = b over F2.

    Returns ``(particular, kernel)`` where ``particular`` is one solution
    (None if the system is inconsistent) and ``kernel`` is a 0/1 array whose
    rows form a basis of the homogeneous solutions.
    """
    a = np.asarray(dense, dtype=np.uint8)
    b = np.asarray(rhs, dtype=np.uint8).reshape(-1, 1)
    nvars = a.shape[1]
    aug = np.concatenate([a, b], axis=1)
    red, piv = rref(pack_rows(aug), nvars + 1)
    dense_red = unpack_rows(red, nvars + 1)
    if nvars in piv:
        particular = None
    else:
        particular = np.zeros(nvars, dtype=np.uint8)
        for row, c in zip(dense_red, piv):
            particular[c] = row[nvars]
    free = [c for c in range(nvars) if c not in set(piv)]
    kernel = np.zeros((len(free), nvars), dtype=np.uint8)
    for i, f in enumerate(free):
        kernel[i, f] = 1
        for row, c in zip(dense_red, piv):
            if row[f]:
                kernel[i, c] = 1
    return particular, kernel


@dataclass(frozen=True, eq=False)
class F2Matrix:
    rows: int
    cols: int
    bits: np.ndarray

    @classmethod
    def from_dense(cls, dense) -> "F2Matrix":
        d = np.asarray(dense, dtype=np.uint8)
        return cls(d.shape[0], d.shape[1], pack_rows(d))

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.bits, self.cols)

    def rank(self) -> int:
        return rank(self.bits, self.cols)


def translate_matrix(indicator) -> np.ndarray:
    """Packed matrix M[s][t] = indicator(s + t) over the group F_2^N."""
    ind = np.asarray(indicator, dtype=np.uint8)
    q = ind.size
    s = np.arange(q, dtype=np.uint16 if q <= 1 << 16 else np.uint32)
    return pack_rows(ind[s[:, None] ^ s[None, :]])


def translate_rank(indicator) -> int:
    ind = np.asarray(indicator)
    return rank(translate_matrix(ind), ind.size)
