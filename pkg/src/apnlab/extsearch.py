"""APN extensions of subfunctions.

A (m, m-k)-function G is extended by a k-bit g into the (m, m)-function
(G, g).  The extension is APN exactly when g has a nonzero sum on every
2-flat on which G sums to zero, which is a linear system over F2 for k = 1
and a 2-bit constraint problem for k = 2.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numba
import numpy as np

from . import gf2
from ._search import STATUS_BUDGET, STATUS_DONE, STATUS_FULL, search
from .bfcore import BooleanFunction
from .errors import BudgetExhausted, CapacityError, DomainError, MalformedInput, NormalizationError
from .subspaces import echelon_subspaces, gaussian_binomial  # noqa: F401  (re-exported)
from .vecfun import VectorialFunction, differential_uniformity

MAX_FLAT_ARITY = 8


# ---------------------------------------------------------------- flats

@dataclass(frozen=True, order=True)
class Flat:
    points: tuple

    def __post_init__(self):
        p = tuple(int(v) for v in self.points)
        if len(p) != 4 or len(set(p)) != 4:
            raise MalformedInput("a flat has four distinct points")
        if p[0] ^ p[1] ^ p[2] ^ p[3]:
            raise MalformedInput("flat points must XOR to zero")
        object.__setattr__(self, "points", tuple(sorted(p)))

    def __iter__(self):
        return iter(self.points)


@lru_cache(maxsize=None)
def _all_flats(m: int) -> np.ndarray:
    q = 1 << m
    chunks = []
    for x in range(q):
        y, z = np.triu_indices(q - x - 1, 1)
        y = y + x + 1
        z = z + x + 1
        t = x ^ y ^ z
        keep = t > z
        chunks.append(np.stack([np.full(keep.sum(), x), y[keep], z[keep], t[keep]], axis=1))
    out = np.concatenate(chunks).astype(np.int64) if chunks else np.zeros((0, 4), np.int64)
    out.flags.writeable = False
    return out


def all_flats(m: int) -> np.ndarray:
    """Every 2-flat of F_2^m as rows (x, y, z, t), x < y < z < t, lexicographic."""
    if not 2 <= m <= MAX_FLAT_ARITY:
        raise CapacityError(f"flat enumeration supports 2 <= m <= {MAX_FLAT_ARITY}")
    return _all_flats(m)


def flat_array(G: VectorialFunction) -> np.ndarray:
    """Zero-sum flats of G as an (N, 4) array in canonical order."""
    fl = all_flats(G.m)
    t = G.table
    s = t[fl[:, 0]] ^ t[fl[:, 1]] ^ t[fl[:, 2]] ^ t[fl[:, 3]]
    return np.ascontiguousarray(fl[s == 0])


def enumerate_flats(G: VectorialFunction) -> list[Flat]:
    return [Flat(tuple(int(v) for v in row)) for row in flat_array(G)]


# ---------------------------------------------------------------- problems

@dataclass(frozen=True, eq=False)
class ExtensionProblem:
    G: VectorialFunction
    k: int
    flats: np.ndarray

    @classmethod
    def build(cls, G: VectorialFunction, k: int | None = None) -> "ExtensionProblem":
        if k is None:
            k = G.m - G.n
        if k not in (1, 2):
            raise DomainError(f"codimension must be 1 or 2, got {k}")
        if G.n != G.m - k:
            raise DomainError(f"G must be an ({G.m}, {G.m - k})-function for k={k}")
        return cls(G, k, flat_array(G))

    @property
    def m(self) -> int:
        return self.G.m

    @property
    def N(self) -> int:
        return int(self.flats.shape[0])

    def sha(self) -> np.ndarray:
        """Incidence matrix of the map g -> (g(x)+g(y)+g(z)+g(t)) over the flats."""
        a = np.zeros((self.N, 1 << self.m), dtype=np.uint8)
        rows = np.repeat(np.arange(self.N), 4)
        a[rows, self.flats.ravel()] = 1
        return a

    def to_json(self) -> str:
        return json.dumps({
            "m": self.m,
            "k": self.k,
            "G": [int(v) for v in self.G.table],
            "flats": self.flats.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "ExtensionProblem":
        d = json.loads(text)
        G = VectorialFunction(d["m"], d["m"] - d["k"], d["G"])
        P = cls.build(G, d["k"])
        if P.flats.tolist() != d["flats"]:
            raise MalformedInput("flat list does not match G")
        return P


def extend(G: VectorialFunction, g) -> VectorialFunction:
    """(G, g) with g in the high output bits."""
    if isinstance(g, BooleanFunction):
        g = VectorialFunction(g.m, 1, g.table)
    return G.stack(g)


# ---------------------------------------------------------------- codim 1

@dataclass(frozen=True, eq=False)
class SolutionSpace:
    consistent: bool
    particular: BooleanFunction | None
    kernel_basis: list
    dim: int

    def solutions(self, limit: int | None = None):
        """Iterate the affine solution set (Gray-code order)."""
        if not self.consistent:
            return
        g = self.particular.table.copy()
        total = 1 << self.dim
        if limit is not None:
            total = min(total, limit)
        yield BooleanFunction(self.particular.m, g.copy())
        for i in range(1, total):
            j = (i & -i).bit_length() - 1
            g ^= self.kernel_basis[j].table
            yield BooleanFunction(self.particular.m, g.copy())

    def to_json(self) -> str:
        return json.dumps({
            "consistent": self.consistent,
            "dim": self.dim,
            "particular": self.particular.to_hex() if self.particular is not None else None,
            "kernel_basis": [b.to_hex() for b in self.kernel_basis],
        })


def solve_one_extension(P: ExtensionProblem) -> SolutionSpace:
    """All g with Sha(g) = (1, ..., 1): exactly the g making (G, g) APN."""
    if P.k != 1:
        raise DomainError("solve_one_extension needs a codimension-1 problem")
    m = P.m
    if P.N == 0:
        eye = np.eye(1 << m, dtype=np.uint8)
        return SolutionSpace(True, BooleanFunction.zero(m), [BooleanFunction(m, r) for r in eye], 1 << m)
    part, kernel = gf2.solve(P.sha(), np.ones(P.N, dtype=np.uint8))
    basis = [BooleanFunction(m, r) for r in kernel]
    if part is None:
        return SolutionSpace(False, None, basis, len(basis))
    return SolutionSpace(True, BooleanFunction(m, part), basis, len(basis))


def _bits(table) -> int:
    return int.from_bytes(np.packbits(np.asarray(table, dtype=np.uint8), bitorder="little").tobytes(), "little")


def _from_bits(v: int, m: int) -> BooleanFunction:
    q = 1 << m
    raw = np.frombuffer(v.to_bytes(max(1, q // 8), "little"), dtype=np.uint8)
    return BooleanFunction(m, np.unpackbits(raw, bitorder="little")[:q])


def trivial_kernel_part(G: VectorialFunction) -> list[BooleanFunction]:
    """Coordinates of G, the constant 1 and the m coordinate forms.

    Their span always solves the homogeneous system, so for an extendable G
    it is the part of K(G) that only produces congruent extensions.
    """
    x = np.arange(1 << G.m)
    out = list(G.coordinates())
    out.append(BooleanFunction(G.m, np.ones(1 << G.m, dtype=np.uint8)))
    out += [BooleanFunction(G.m, (x >> j) & 1) for j in range(G.m)]
    return out


def extension_classes(P: ExtensionProblem, space: SolutionSpace | None = None) -> list[BooleanFunction]:
    """One g per coset of the trivial kernel part inside the solution set."""
    if space is None:
        space = solve_one_extension(P)
    if not space.consistent:
        return []
    echelon: dict[int, int] = {}

    def reduce(v):
        while v:
            h = v.bit_length() - 1
            if h not in echelon:
                return v
            v ^= echelon[h]
        return 0

    def insert(v):
        v = reduce(v)
        if v:
            echelon[v.bit_length() - 1] = v
        return v

    for f in trivial_kernel_part(P.G):
        insert(_bits(f.table))
    extra = [v for v in (_bits(b.table) for b in space.kernel_basis) if insert(v)]
    base = reduce(_bits(space.particular.table))
    reps = [base]
    for v in extra:
        reps += [r ^ v for r in reps]
    return [_from_bits(r, P.m) for r in sorted(reps)]


# ---------------------------------------------------------------- codim 2

@dataclass(frozen=True, eq=False)
class PivotSystem:
    phis: np.ndarray
    pivots: tuple
    free: tuple


def normalize_pivots(P: ExtensionProblem) -> PivotSystem:
    """Basis phi_i of span(comp(G), affine) with points p_j, phi_i(p_j) = delta_ij.

    Adding a combination of the phi_i to each output bit of g is an
    EA-shift of (G, g), so one may assume g vanishes on the pivots.
    """
    if P.k != 2:
        raise DomainError("pivot normalization is for codimension-2 problems")
    m = P.m
    rows = np.stack([f.table for f in trivial_kernel_part(P.G)])
    red, piv = gf2.rref(gf2.pack_rows(rows), 1 << m)
    if len(piv) != 2 * m - 1:
        raise NormalizationError(
            f"components of G and affine functions have rank {len(piv)}, need {2 * m - 1}")
    phis = gf2.unpack_rows(red, 1 << m).astype(np.uint8)
    pset = set(piv)
    free = tuple(x for x in range(1 << m) if x not in pset)
    return PivotSystem(phis, tuple(piv), free)


def _run(P, order, start, floor, depth, budget, symmetry, dynamic, chunk):
    """Drive the kernel until done or out of budget, collecting all rows."""
    q = 1 << P.m
    flats = np.ascontiguousarray(P.flats, dtype=np.int64)
    start = start.copy()
    rows, nodes = [], 0
    while True:
        width = q if depth == len(order) else max(depth, 1)
        out = np.zeros((chunk, width), dtype=np.int64)
        status, n, used, level, cur = search(
            q, flats, order, start, floor, depth, budget - nodes, symmetry, dynamic, out)
        rows.append(out[:n].copy())
        nodes += int(used)
        if status == STATUS_DONE:
            return np.concatenate(rows), nodes, None
        frontier = [int(v) for v in cur[: level + 1]]
        if status == STATUS_BUDGET:
            return np.concatenate(rows), nodes, frontier
        start = np.full(len(order), -1, dtype=np.int64)
        start[: level + 1] = frontier


def _as_functions(rows, m):
    return [VectorialFunction(m, 2, r) for r in rows]


def backtrack_two_extension(P: ExtensionProblem, budget: int = 10**8, *, symmetry: bool = True,
                            dynamic: bool = True, threads: int = 1, split_depth: int = 6,
                            frontier=None, chunk: int = 4096) -> list[VectorialFunction]:
    """All g: F_2^m -> F_2^2 vanishing on the pivots with (G, g) APN.

    With ``symmetry`` the outputs are reduced modulo the permutations of
    the three nonzero values (GL(2, 2)), one g per orbit.  With ``dynamic``
    the next point is the free point with fewest allowed values (lowest
    index on ties); otherwise free points go in ascending order.
    ``budget`` caps the number of search
    nodes; on exhaustion a BudgetExhausted carries the solutions found so far
    and, in single-threaded mode, a frontier accepted by ``frontier=`` to
    resume.  With ``threads > 1`` the tree is cut at ``split_depth`` and each
    subtree, with its own node budget, runs in a worker; results keep the
    order of the subtree roots.
    """
    pivots = normalize_pivots(P)
    order = np.array(pivots.free, dtype=np.int64)
    nfree = len(order)
    m = P.m
    if threads <= 1 or frontier is not None or split_depth >= nfree:
        start = np.full(nfree, -1, dtype=np.int64)
        if frontier is not None:
            start[: len(frontier)] = frontier
        rows, nodes, front = _run(P, order, start, 0, nfree, budget, symmetry, dynamic, chunk)
        sols = _as_functions(rows, m)
        if front is not None:
            raise BudgetExhausted(f"node budget {budget} exhausted", partial=sols,
                                  frontier=front, nodes=nodes)
        return sols

    empty = np.full(nfree, -1, dtype=np.int64)
    roots, nodes0, _ = _run(P, order, empty, 0, split_depth, 1 << 62, symmetry, dynamic, chunk)

    def task(prefix):
        start = np.full(nfree, -1, dtype=np.int64)
        start[:split_depth] = prefix
        return _run(P, order, start, split_depth, nfree, budget, symmetry, dynamic, chunk)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(task, list(roots)))
    sols, nodes, exhausted = [], nodes0, False
    for rows, used, front in results:
        sols += _as_functions(rows, m)
        nodes += used
        exhausted |= front is not None
    if exhausted:
        raise BudgetExhausted(f"node budget {budget} exhausted in a subtree", partial=sols,
                              frontier=None, nodes=nodes)
    return sols


def output_orbit(g: VectorialFunction) -> set:
    """The images of g under the six permutations of the nonzero 2-bit values."""
    out = set()
    for a, b in ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)):
        lut = np.array([0, a, b, a ^ b])
        out.add(VectorialFunction(g.m, 2, lut[g.table]))
    return out


def solution_hex(g: VectorialFunction) -> str:
    """2 bits per point, point x at bits 2x, 2x+1 (128 bits for m = 6)."""
    v = 0
    for x, val in enumerate(g.table):
        v |= int(val) << (2 * x)
    return format(v, f"0{(2 << g.m) // 4}x")


def solution_from_hex(text: str, m: int) -> VectorialFunction:
    try:
        v = int(text, 16)
    except ValueError as exc:
        raise MalformedInput("solution must be hexadecimal") from exc
    if v >> (2 << m):
        raise MalformedInput("solution hex too long")
    return VectorialFunction(m, 2, [(v >> (2 * x)) & 3 for x in range(1 << m)])


# ---------------------------------------------------------------- filters

def delta_feasibility(F: VectorialFunction) -> bool:
    """Necessary condition for an APN extension: Delta_F <= 2^(m-n+1)."""
    return differential_uniformity(F) <= 1 << (F.m - F.n + 1)


# GF(4) = F2[w]/(w^2+w+1); element a0 + a1 w is the integer a0 | a1 << 1.
GF4_MUL = np.array([[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]], dtype=np.int64)
GF4_INV = np.array([0, 1, 3, 2], dtype=np.int64)


def gf4_mul(a: int, b: int) -> int:
    return int(GF4_MUL[a, b])


def gf4_cube(a: int) -> int:
    return gf4_mul(a, gf4_mul(a, a))


@numba.njit(cache=True)
def _entry(lo, hi, r, c):
    w = c >> 6
    s = np.uint64(c & 63)
    return int((lo[r, w] >> s) & np.uint64(1)) | (int((hi[r, w] >> s) & np.uint64(1)) << 1)


@numba.njit(cache=True)
def _gf4_eliminate(lo, hi, ncols):
    """Forward elimination over GF(4) on bit-sliced rows; returns the pivot columns."""
    rows, nw = lo.shape
    piv = np.full(min(rows, ncols), -1, dtype=np.int64)
    inv = np.array([0, 1, 3, 2])
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if _entry(lo, hi, i, c):
                p = i
                break
        if p < 0:
            continue
        w0 = c >> 6
        if p != r:
            for k in range(w0, nw):
                t = lo[p, k]
                lo[p, k] = lo[r, k]
                lo[r, k] = t
                t = hi[p, k]
                hi[p, k] = hi[r, k]
                hi[r, k] = t
        s = inv[_entry(lo, hi, r, c)]
        if s != 1:
            m0 = np.uint64(0) - np.uint64(s & 1)
            m1 = np.uint64(0) - np.uint64(s >> 1)
            for k in range(w0, nw):
                a0 = lo[r, k]
                a1 = hi[r, k]
                lo[r, k] = (a0 & m0) ^ (a1 & m1)
                hi[r, k] = (a0 & m1) ^ (a1 & (m0 ^ m1))
        for i in range(r + 1, rows):
            e = _entry(lo, hi, i, c)
            if e:
                m0 = np.uint64(0) - np.uint64(e & 1)
                m1 = np.uint64(0) - np.uint64(e >> 1)
                for k in range(w0, nw):
                    a0 = lo[r, k]
                    a1 = hi[r, k]
                    lo[i, k] ^= (a0 & m0) ^ (a1 & m1)
                    hi[i, k] ^= (a0 & m1) ^ (a1 & (m0 ^ m1))
        piv[r] = c
        r += 1
    return piv[:r]


def gf4_consistent(coeffs, rhs) -> bool:
    """Whether A x = b has a solution over GF(4) (entries coded 0..3)."""
    a = np.asarray(coeffs, dtype=np.uint8)
    b = np.asarray(rhs, dtype=np.uint8).reshape(-1, 1)
    if a.shape[0] == 0:
        return True
    aug = np.concatenate([a, b], axis=1)
    ncols = aug.shape[1]
    lo = gf2.pack_rows(aug & 1)
    hi = gf2.pack_rows(aug >> 1)
    piv = _gf4_eliminate(lo, hi, ncols)
    return not (len(piv) and piv[-1] == ncols - 1)


@dataclass(frozen=True, eq=False)
class Gf4System:
    """X_x (cube terms) and Y_{x,y} (x < y, mixed terms) per point; one equation per flat."""

    q: int
    equations: np.ndarray

    @property
    def nunknowns(self) -> int:
        return self.q * (self.q + 1) // 2

    def pair_index(self, x, y):
        x, y = np.minimum(x, y), np.maximum(x, y)
        return self.q + x * (2 * self.q - x - 1) // 2 + (y - x - 1)

    @classmethod
    def from_problem(cls, P: ExtensionProblem) -> "Gf4System":
        q = 1 << P.m
        fl = P.flats
        sys = cls(q, np.zeros((0, 10), dtype=np.int64))
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        ys = [sys.pair_index(fl[:, i], fl[:, j]) for i, j in pairs]
        eq = np.concatenate([fl, np.stack(ys, axis=1)], axis=1) if len(fl) else np.zeros((0, 10), np.int64)
        return cls(q, np.ascontiguousarray(eq, dtype=np.int64))

    def dense(self) -> np.ndarray:
        a = np.zeros((len(self.equations), self.nunknowns), dtype=np.uint8)
        rows = np.repeat(np.arange(len(self.equations)), 10)
        a[rows, self.equations.ravel()] = 1
        return a

    def consistent(self) -> bool:
        if len(self.equations) == 0:
            return True
        return gf4_consistent(self.dense(), np.ones(len(self.equations), dtype=np.uint8))

    def assignment_from(self, g: VectorialFunction) -> np.ndarray:
        """X_x = g(x)^3 and Y_{x,y} = g(x) g(y) (g(x) + g(y)), reading 2-bit values in GF(4)."""
        vals = np.asarray(g.table, dtype=np.int64)
        out = np.zeros(self.nunknowns, dtype=np.int64)
        out[: self.q] = GF4_MUL[vals, GF4_MUL[vals, vals]]
        x, y = np.triu_indices(self.q, 1)
        out[self.pair_index(x, y)] = GF4_MUL[GF4_MUL[vals[x], vals[y]], vals[x] ^ vals[y]]
        return out

    def satisfied_by(self, assignment) -> bool:
        a = np.asarray(assignment, dtype=np.int64)
        sums = np.bitwise_xor.reduce(a[self.equations], axis=1) if len(self.equations) else np.zeros(0)
        return bool(np.all(sums == 1))


def gf4_relaxation(P: ExtensionProblem) -> bool:
    """Consistency of the linearized cube system; False proves G has no APN extension."""
    if P.k != 2:
        raise DomainError("the GF(4) relaxation is for codimension-2 problems")
    return Gf4System.from_problem(P).consistent()


# ---------------------------------------------------------------- two-level spectra

def two_level_admissible(kappa_values, q: int) -> list[tuple]:
    """Pairs alpha < beta with alpha A + beta B = 2(q-1), A + B = q-1, A, B positive integers."""
    vals = sorted({Fraction(v) for v in kappa_values})
    out = []
    for i, a in enumerate(vals):
        for b in vals[i + 1:]:
            A = Fraction(q - 1) * (b - 2) / (b - a)
            if A.denominator == 1 and 0 < A < q - 1:
                out.append((a, b, int(A), q - 1 - int(A)))
    return out
