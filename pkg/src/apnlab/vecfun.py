"""Vectorial (m, n)-functions: components, differential properties and APN tests."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import gf2
from .bfcore import (
    MAX_ARITY,
    BooleanFunction,
    arity_of,
    degrees_many,
    kappas_many,
    mobius,
    parity,
    popcounts,
    walsh_many,
)
from .errors import CapacityError, DomainError, MalformedInput, PreconditionError, RankError
from .subspaces import echelon_subspaces, mask_rank

# primitive polynomials, bit i = coefficient of x^i
DEFAULT_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
}


@dataclass(frozen=True, eq=False)
class VectorialFunction:
    """An (m, n)-function stored as ``table[x] = F(x)`` with outputs in [0, 2^n)."""

    m: int
    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64).ravel()
        if not 1 <= self.m <= MAX_ARITY or not 1 <= self.n <= MAX_ARITY:
            raise DomainError(f"arities must lie in 1..{MAX_ARITY}")
        if t.size != 1 << self.m:
            raise MalformedInput(f"table length {t.size} != 2^{self.m}")
        if t.min() < 0 or t.max() >= 1 << self.n:
            raise MalformedInput(f"outputs must lie in [0, 2^{self.n})")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    @classmethod
    def from_values(cls, values, n: int | None = None) -> "VectorialFunction":
        t = np.array(values, dtype=np.int64).ravel()
        m = arity_of(t.size)
        return cls(m, m if n is None else n, t)

    @classmethod
    def from_coordinates(cls, coords) -> "VectorialFunction":
        coords = [c.table if isinstance(c, BooleanFunction) else np.asarray(c) for c in coords]
        m = arity_of(len(coords[0]))
        t = np.zeros(1 << m, dtype=np.int64)
        for i, c in enumerate(coords):
            t |= c.astype(np.int64) << i
        return cls(m, len(coords), t)

    @classmethod
    def identity(cls, m: int) -> "VectorialFunction":
        return cls(m, m, np.arange(1 << m))

    @classmethod
    def zero(cls, m: int, n: int) -> "VectorialFunction":
        return cls(m, n, np.zeros(1 << m, dtype=np.int64))

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "VectorialFunction":
        try:
            values = [int(tok) for tok in text.split()]
        except ValueError as exc:
            raise MalformedInput("vectorial text must be decimal integers") from exc
        if n is None:
            n = max(1, max(values).bit_length()) if values else 1
            n = max(n, arity_of(len(values)))
        return cls.from_values(values, n)

    def to_text(self) -> str:
        return " ".join(str(int(v)) for v in self.table)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __eq__(self, other):
        if not isinstance(other, VectorialFunction):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.m, self.n, self.table.tobytes()))

    def __repr__(self):
        return f"VectorialFunction(m={self.m}, n={self.n})"

    def __add__(self, other):
        if isinstance(other, VectorialFunction):
            return VectorialFunction(self.m, self.n, self.table ^ other.table)
        return VectorialFunction(self.m, self.n, self.table ^ int(other))

    def coordinate(self, i: int) -> BooleanFunction:
        """Coordinate f_i, 1-based."""
        return BooleanFunction(self.m, (self.table >> (i - 1)) & 1)

    def coordinates(self) -> list[BooleanFunction]:
        return [self.coordinate(i) for i in range(1, self.n + 1)]

    def component_tables(self) -> np.ndarray:
        """Array of shape (2^n - 1, 2^m); row b-1 is the truth table of F_b."""
        b = np.arange(1, 1 << self.n, dtype=np.int64)
        return parity(b[:, None] & self.table[None, :])

    def compose_input(self, cols, shift: int = 0) -> "VectorialFunction":
        """x -> F(A x + c); column j of A is the point ``cols[j]``."""
        return VectorialFunction(self.m, self.n, self.table[linear_image(self.m, cols, shift)])

    def compose_output(self, cols, shift: int = 0) -> "VectorialFunction":
        """x -> B F(x) + d; column j of B is the point ``cols[j]``."""
        return VectorialFunction(self.m, self.n, apply_linear(self.table, cols) ^ shift)

    def stack(self, other: "VectorialFunction") -> "VectorialFunction":
        """(self, other) as an (m, n + n')-function, self in the low bits."""
        if other.m != self.m:
            raise DomainError("stacked functions must share the input space")
        return VectorialFunction(self.m, self.n + other.n, self.table | (other.table << self.n))


def linear_image(m: int, cols, shift: int = 0) -> np.ndarray:
    x = np.arange(1 << m, dtype=np.int64)
    return apply_linear(x, cols) ^ shift


def apply_linear(values: np.ndarray, cols) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros_like(values)
    for j, c in enumerate(cols):
        out ^= np.where((values >> j) & 1, int(c), 0)
    return out


def random_invertible(k: int, rng) -> list[int]:
    """Columns of a uniformly random invertible k x k matrix over F2."""
    while True:
        cols = [int(rng.integers(1, 1 << k)) for _ in range(k)]
        if mask_rank(cols) == k:
            return cols


def component(F: VectorialFunction, b: int) -> BooleanFunction:
    if not 0 < b < 1 << F.n:
        raise DomainError(f"component mask must lie in [1, 2^{F.n})")
    return BooleanFunction(F.m, parity(F.table & b))


@dataclass(frozen=True, eq=False)
class DifferenceTable:
    counts: np.ndarray
    uniformity: int


def derivative_table(F: VectorialFunction) -> np.ndarray:
    """D[u, x] = F(x + u) + F(x)."""
    x = np.arange(1 << F.m, dtype=np.int64)
    return F.table[x[:, None] ^ x[None, :]] ^ F.table[None, :]


def ddt(F: VectorialFunction) -> DifferenceTable:
    d = derivative_table(F)
    q, r = 1 << F.m, 1 << F.n
    counts = np.zeros((q, r), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(q), q), d.ravel()), 1)
    counts.flags.writeable = False
    uni = int(counts[1:].max()) if q > 1 else 0
    return DifferenceTable(counts, uni)


def differential_uniformity(F: VectorialFunction) -> int:
    return ddt(F).uniformity


class ApnResult(NamedTuple):
    apn: bool
    witness: tuple[int, int, int, int] | None

    def __bool__(self):
        return self.apn


def is_apn(F: VectorialFunction) -> ApnResult:
    """APN test by differential uniformity, stopping at the first N(u, v) >= 4.

    A failing function comes with a flat {x, x+u, y, y+u} whose F-sum is 0.
    """
    if F.m != F.n:
        raise DomainError("APN is defined for (m, m)-functions")
    x = np.arange(1 << F.m, dtype=np.int64)
    t = F.table
    for u in range(1, 1 << F.m):
        d = t[x ^ u] ^ t
        counts = np.bincount(d, minlength=1 << F.n)
        v = int(counts.argmax())
        if counts[v] > 2:
            sols = np.flatnonzero(d == v)
            x1 = int(sols[0])
            x2 = next(int(s) for s in sols if s not in (x1, x1 ^ u))
            return ApnResult(False, tuple(sorted((x1, x1 ^ u, x2, x2 ^ u))))
    return ApnResult(True, None)


def component_kappas(F: VectorialFunction) -> list[Fraction]:
    """kappa of F_b for b = 1 .. 2^n - 1."""
    return kappas_many(F.component_tables())


def kappa_sum(F: VectorialFunction) -> Fraction:
    """Sum of kappa over nonzero components; equals 2(q - 1) exactly iff F is APN (m = n)."""
    return sum(component_kappas(F), Fraction(0))


# kappa values met among the components of all known APN (6,6)-functions
KNOWN_APN_COMPONENT_KAPPAS = frozenset(
    Fraction(v) for v in ("1", "7/4", "5/2", "13/4", "4", "19/4", "17/2", "16"))


@dataclass(frozen=True, eq=False)
class CountingFunction:
    u: int
    f: BooleanFunction


def counting_function(F: VectorialFunction, u: int) -> CountingFunction:
    if not 0 < u < 1 << F.m:
        raise DomainError("difference point must be nonzero")
    x = np.arange(1 << F.m, dtype=np.int64)
    counts = np.bincount(F.table[x ^ u] ^ F.table, minlength=1 << F.n)
    if counts.max() > 2:
        raise PreconditionError(f"F is not APN: N(u={u}, v) = {int(counts.max())}")
    return CountingFunction(u, BooleanFunction(F.n, (counts == 2).astype(np.uint8)))


@dataclass(frozen=True)
class SpectralProfile:
    kappa_multiset: tuple  # sorted kappas of the nonzero components
    K_F: tuple
    levels: int
    two_level_type: tuple | None

    def census(self) -> dict:
        return dict(sorted(Counter(self.kappa_multiset).items()))


def spectral_profile(F: VectorialFunction) -> SpectralProfile:
    ks = sorted(component_kappas(F))
    support = tuple(sorted(set(ks)))
    two = None
    if len(support) == 2:
        a, b = support
        two = (a, b, ks.count(a), ks.count(b))
    return SpectralProfile(tuple(ks), support, len(support), two)


def graph_indicator(F: VectorialFunction) -> BooleanFunction:
    """Indicator of {(x, F(x))} on m + n variables, x in the low m bits."""
    N = F.m + F.n
    if N > MAX_ARITY:
        raise CapacityError(f"graph needs {N} > {MAX_ARITY} variables")
    t = np.zeros(1 << N, dtype=np.uint8)
    t[np.arange(1 << F.m) | (F.table << F.m)] = 1
    return BooleanFunction(N, t)


def subfunction(F: VectorialFunction, basis_masks) -> VectorialFunction:
    masks = [int(b) for b in basis_masks]
    if any(not 0 < b < 1 << F.n for b in masks):
        raise DomainError("masks must be nonzero points of F_2^n")
    if mask_rank(masks) != len(masks):
        raise RankError("component masks are linearly dependent")
    t = np.zeros(1 << F.m, dtype=np.int64)
    for i, b in enumerate(masks):
        t |= parity(F.table & b).astype(np.int64) << i
    return VectorialFunction(F.m, len(masks), t)


def _nonlinear_span(F: VectorialFunction) -> tuple[int, bytes]:
    anf = mobius(np.stack([c.table for c in F.coordinates()]))
    anf[:, popcounts(F.m) <= 1] = 0
    red, _ = gf2.rref(gf2.pack_rows(anf), 1 << F.m)
    return red.shape[0], red.tobytes()


def congruent(F: VectorialFunction, G: VectorialFunction) -> bool:
    """Same component space modulo affine functions."""
    if (F.m, F.n) != (G.m, G.n):
        return False
    return _nonlinear_span(F) == _nonlinear_span(G)


def bent_flags(F: VectorialFunction) -> np.ndarray:
    """bent_flags[b] for b in [0, 2^n); index 0 is False."""
    flags = np.zeros(1 << F.n, dtype=bool)
    if F.m % 2:
        return flags
    w = walsh_many(F.component_tables())
    flags[1:] = np.abs(w).max(axis=1) == 1 << (F.m // 2)
    return flags


def bent_component_census(F: VectorialFunction) -> tuple[int, int]:
    """(number of bent components, number of 3-dim subspaces made only of bent components)."""
    flags = bent_flags(F)
    spaces = 0
    if F.n >= 3 and flags.any():
        for a, b, c in echelon_subspaces(F.n, 3):
            if (flags[a] and flags[b] and flags[c] and flags[a ^ b] and flags[a ^ c]
                    and flags[b ^ c] and flags[a ^ b ^ c]):
                spaces += 1
    return int(flags.sum()), spaces


def component_degrees(F: VectorialFunction) -> np.ndarray:
    return degrees_many(F.component_tables())


def vectorial_degree(F: VectorialFunction) -> int:
    return int(component_degrees(F).max())


def linearity(F: VectorialFunction) -> int:
    return int(np.abs(walsh_many(F.component_tables())).max())


# --- finite field power maps -------------------------------------------------

def gf_mul(a: int, b: int, poly: int) -> int:
    m = poly.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= poly
    return r


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    m = poly.bit_length() - 1
    if m < 1:
        return False
    for d in range(2, 1 << (m // 2 + 1)):
        if d.bit_length() - 1 > m // 2:
            break
        if _poly_mod(poly, d) == 0:
            return False
    return True


def power_function(m: int, e: int, poly: int | None = None) -> VectorialFunction:
    """x -> x^e in GF(2^m) given by the defining polynomial ``poly``."""
    poly = DEFAULT_POLYS[m] if poly is None else poly
    if poly.bit_length() - 1 != m or not is_irreducible(poly):
        raise DomainError(f"polynomial {poly:#b} does not define GF(2^{m})")
    out = []
    for x in range(1 << m):
        r, base, k = 1, x, e
        while k:
            if k & 1:
                r = gf_mul(r, base, poly)
            base = gf_mul(base, base, poly)
            k >>= 1
        out.append(r if x else 0)
    return VectorialFunction(m, m, out)
