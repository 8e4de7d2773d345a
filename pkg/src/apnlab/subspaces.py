"""Enumeration of linear subspaces of F_2^n by reduced echelon bases."""

from __future__ import annotations

from itertools import combinations, product


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F_2^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def echelon_subspaces(n: int, k: int):
    """Yield every k-dim subspace of F_2^n once, as a tuple of k row masks.

    Rows are in reduced echelon form with respect to the highest set bit:
    row i has leading bit ``pivots[i]`` (pivots increasing), and no row has a
    bit set in another row's pivot column.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        yield ()
        return
    for pivots in combinations(range(n), k):
        pivset = set(pivots)
        free = [[c for c in range(p) if c not in pivset] for p in pivots]
        for fill in product(*[range(1 << len(f)) for f in free]):
            rows = []
            for p, cols, bits in zip(pivots, free, fill):
                row = 1 << p
                for j, c in enumerate(cols):
                    if bits >> j & 1:
                        row |= 1 << c
                rows.append(row)
            yield tuple(rows)


def span(basis) -> list[int]:
    """All 2^k elements of the span of the given masks (including 0)."""
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out


def mask_rank(masks) -> int:
    rows = []
    for v in masks:
        for r in rows:
            v = min(v, v ^ r)
        if v:
            rows.append(v)
    return len(rows)


def complement_basis(basis, n: int) -> list[int]:
    """Unit vectors completing ``basis`` to a basis of F_2^n."""
    out = list(basis)
    extra = []
    for j in range(n):
        if mask_rank(out + [1 << j]) > len(out):
            out.append(1 << j)
            extra.append(1 << j)
    return extra
