"""Compiled DFS kernel for codimension-2 extensions.

Every flat keeps a 2-bit XOR accumulator of its assigned points and a count
of unassigned ones.  When a flat is down to one free point r, the value that
would make its sum 00 is forbidden at r (``forbid[r, v]`` counts the flats
excluding v).  The nonzero values 1, 2, 3 are interchangeable, so among the
values not yet used anywhere only the smallest is tried; with any variable
order this keeps exactly one assignment per orbit.
"""

import numba
import numpy as np

STATUS_DONE = 0
STATUS_BUDGET = 1
STATUS_FULL = 2


@numba.njit(cache=True)
def _assign(p, v, val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2):
    val[p] = v
    wiped = False
    for k in range(inc_ptr[p], inc_ptr[p + 1]):
        f = inc_idx[k]
        if cnt[f] == 1:
            forbid[p, acc[f]] -= 1
        elif cnt[f] == 2:
            for j in range(4):
                n2[flats[f, j]] -= 1
        acc[f] ^= v
        cnt[f] -= 1
        if cnt[f] == 2:
            for j in range(4):
                n2[flats[f, j]] += 1
        if cnt[f] == 1:
            r = -1
            for j in range(4):
                if val[flats[f, j]] < 0:
                    r = flats[f, j]
            forbid[r, acc[f]] += 1
            if forbid[r, 0] > 0 and forbid[r, 1] > 0 and forbid[r, 2] > 0 and forbid[r, 3] > 0:
                wiped = True
    return wiped


@numba.njit(cache=True)
def _unassign(p, v, val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2):
    for k in range(inc_ptr[p], inc_ptr[p + 1]):
        f = inc_idx[k]
        if cnt[f] == 2:
            for j in range(4):
                n2[flats[f, j]] -= 1
        if cnt[f] == 1:
            r = -1
            for j in range(4):
                if val[flats[f, j]] < 0:
                    r = flats[f, j]
            forbid[r, acc[f]] -= 1
        acc[f] ^= v
        cnt[f] += 1
        if cnt[f] == 1:
            forbid[p, acc[f]] += 1
        elif cnt[f] == 2:
            for j in range(4):
                n2[flats[f, j]] += 1
    val[p] = -1


@numba.njit(cache=True)
def _select(order, val, forbid, n2, dynamic):
    """Next point: the first unassigned one, or the one with fewest allowed
    values, ties going to the point in most flats with two open points."""
    best = -1
    bestc = 5
    bestn = -1
    for i in range(order.shape[0]):
        p = order[i]
        if val[p] >= 0:
            continue
        if not dynamic:
            return p
        c = 0
        for v in range(4):
            if forbid[p, v] == 0:
                c += 1
        if c < bestc or (c == bestc and n2[p] > bestn):
            best = p
            bestc = c
            bestn = n2[p]
            if c <= 1:
                break
    return best


@numba.njit(cache=True)
def _smallest_unused(used):
    for v in range(1, 4):
        if used[v] == 0:
            return v
    return 4


@numba.njit(cache=True, nogil=True)
def search(npoints, flats, order, start, floor, depth, budget, symmetry, dynamic, out):
    """Depth-first enumeration of 2-bit assignments of ``order`` avoiding zero flat sums.

    Points outside ``order`` are fixed to 0.  ``start`` replays a path of
    values: levels below ``floor`` stay fixed, and at the frontier level
    (the last entry >= 0 at or above ``floor``) it holds the last value
    tried.  Leaves sit at level ``depth - 1``: a full search (depth equal to
    the number of free points) writes whole tables into ``out``, a shallower
    one writes the value path.
    Returns (status, rows written, nodes, frontier level, value path).
    """
    nfree = order.shape[0]
    nflats = flats.shape[0]
    val = np.zeros(npoints, dtype=np.int64)
    for i in range(nfree):
        val[order[i]] = -1
    deg = np.zeros(npoints + 1, dtype=np.int64)
    for f in range(nflats):
        for j in range(4):
            deg[flats[f, j] + 1] += 1
    inc_ptr = np.cumsum(deg)
    fill = inc_ptr[:-1].copy()
    inc_idx = np.zeros(4 * nflats, dtype=np.int64)
    for f in range(nflats):
        for j in range(4):
            p = flats[f, j]
            inc_idx[fill[p]] = f
            fill[p] += 1
    acc = np.zeros(nflats, dtype=np.int64)
    cnt = np.zeros(nflats, dtype=np.int64)
    forbid = np.zeros((npoints, 4), dtype=np.int64)
    cur = np.full(nfree + 1, -1, dtype=np.int64)
    pt = np.full(nfree + 1, -1, dtype=np.int64)
    assigned = np.zeros(nfree + 1, dtype=np.bool_)
    n2 = np.zeros(npoints, dtype=np.int64)
    used = np.zeros(4, dtype=np.int64)
    used[0] = 1
    nsol = 0
    nodes = 0
    for f in range(nflats):
        for j in range(4):
            if val[flats[f, j]] < 0:
                cnt[f] += 1
        if cnt[f] == 0:
            # fixed points alone form a zero-sum flat
            return STATUS_DONE, 0, 0, -1, cur
        if cnt[f] == 1:
            for j in range(4):
                if val[flats[f, j]] < 0:
                    forbid[flats[f, j], 0] += 1
        elif cnt[f] == 2:
            for j in range(4):
                n2[flats[f, j]] += 1
    if nfree == 0:
        return STATUS_DONE, 0, 0, -1, cur

    level = floor
    fresh = True
    for i in range(nfree):
        if start[i] < 0:
            break
        p = _select(order, val, forbid, n2, dynamic)
        pt[i] = p
        if i < floor or (i + 1 < nfree and start[i + 1] >= 0):
            v = start[i]
            if forbid[p, v] > 0:
                return STATUS_DONE, 0, 0, -1, cur
            _assign(p, v, val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2)
            used[v] += 1
            cur[i] = v
            assigned[i] = True
            level = i + 1
        else:
            cur[i] = start[i]
            level = i
            fresh = False
    if fresh:
        pt[level] = _select(order, val, forbid, n2, dynamic)
        cur[level] = -1

    while level >= floor:
        p = pt[level]
        if assigned[level]:
            _unassign(p, cur[level], val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2)
            used[cur[level]] -= 1
            assigned[level] = False
        first_new = _smallest_unused(used) if symmetry else 0
        v = cur[level] + 1
        while v <= 3 and (forbid[p, v] > 0 or (symmetry and used[v] == 0 and v != first_new)):
            v += 1
        if v > 3:
            cur[level] = -1
            level -= 1
            continue
        if nodes >= budget:
            cur[level] = v - 1
            return STATUS_BUDGET, nsol, nodes, level, cur
        nodes += 1
        cur[level] = v
        wiped = _assign(p, v, val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2)
        used[v] += 1
        assigned[level] = True
        if wiped:
            continue
        if level == depth - 1:
            if nsol >= out.shape[0]:
                _unassign(p, v, val, acc, cnt, forbid, flats, inc_ptr, inc_idx, n2)
                used[v] -= 1
                assigned[level] = False
                cur[level] = v - 1
                return STATUS_FULL, nsol, nodes, level, cur
            if depth == nfree:
                for x in range(npoints):
                    out[nsol, x] = val[x] if val[x] > 0 else 0
            else:
                for i in range(depth):
                    out[nsol, i] = cur[i]
            nsol += 1
            continue
        level += 1
        pt[level] = _select(order, val, forbid, n2, dynamic)
        cur[level] = -1
    return STATUS_DONE, nsol, nodes, -1, cur
