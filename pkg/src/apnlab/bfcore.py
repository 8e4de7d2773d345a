"""Boolean functions on F_2^m and their spectral quantities.

A point x = (x_1, ..., x_m) is the integer whose bit j-1 is x_j, and the
scalar product a.x is the parity of ``a & x``.  Truth tables are numpy
``uint8`` arrays of 0/1 values; ``BooleanFunction.words`` exposes the same
table packed 64 points per ``uint64`` word.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, MalformedInput

MAX_ARITY = 12


def arity_of(length: int) -> int:
    m = int(length).bit_length() - 1
    if length < 1 or (1 << m) != length:
        raise MalformedInput(f"table length {length} is not a power of two")
    if m > MAX_ARITY:
        raise MalformedInput(f"arity {m} exceeds {MAX_ARITY}")
    return m


def parity(a):
    """Parity of the set bits of an integer or integer array."""
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.uint8) & 1


def popcounts(m: int) -> np.ndarray:
    return _popcounts(m)


@lru_cache(maxsize=None)
def _popcounts(m):
    pc = np.bitwise_count(np.arange(1 << m, dtype=np.uint32)).astype(np.int64)
    pc.flags.writeable = False
    return pc


def mobius(bits, m: int | None = None) -> np.ndarray:
    """Binary Moebius transform along the last axis.

    The transform is an involution: it maps a truth table to its ANF
    coefficient vector and an ANF back to the truth table.
    """
    a = np.array(bits, dtype=np.uint8) & 1
    q = a.shape[-1]
    k = arity_of(q)
    if m is not None and m != k:
        raise MalformedInput(f"expected length {1 << m}, got {q}")
    lead = a.shape[:-1]
    h = 1
    while h < q:
        v = a.reshape(lead + (q // (2 * h), 2, h))
        v[..., 1, :] ^= v[..., 0, :]
        h *= 2
    return a


def fwht(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along the last axis (int64)."""
    a = np.array(values, dtype=np.int64)
    q = a.shape[-1]
    arity_of(q)
    lead = a.shape[:-1]
    h = 1
    while h < q:
        v = a.reshape(lead + (q // (2 * h), 2, h))
        lo = v[..., 0, :].copy()
        v[..., 0, :] += v[..., 1, :]
        v[..., 1, :] = lo - v[..., 1, :]
        h *= 2
    return a


def walsh_many(tables) -> np.ndarray:
    """Walsh spectra of a stack of 0/1 truth tables (last axis = points)."""
    t = np.asarray(tables)
    return fwht(1 - 2 * t.astype(np.int64))


def _as_table(values):
    t = np.array(values, dtype=np.int64).ravel()
    if t.size and (t.min() < 0 or t.max() > 1):
        raise MalformedInput("truth table entries must be 0 or 1")
    return t.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A Boolean function given by its truth table ``table[x] = f(x)``."""

    m: int
    table: np.ndarray

    def __post_init__(self):
        t = _as_table(self.table)
        if not 1 <= self.m <= MAX_ARITY:
            raise DomainError(f"arity must lie in 1..{MAX_ARITY}, got {self.m}")
        if t.size != 1 << self.m:
            raise MalformedInput(f"table length {t.size} != 2^{self.m}")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    @classmethod
    def from_table(cls, values) -> "BooleanFunction":
        t = _as_table(values)
        return cls(arity_of(t.size), t)

    @classmethod
    def from_anf(cls, coeffs) -> "BooleanFunction":
        c = _as_table(coeffs)
        return cls(arity_of(c.size), mobius(c))

    @classmethod
    def from_callable(cls, fn, m: int) -> "BooleanFunction":
        return cls(m, [fn(x) & 1 for x in range(1 << m)])

    @classmethod
    def zero(cls, m: int) -> "BooleanFunction":
        return cls(m, np.zeros(1 << m, dtype=np.uint8))

    @classmethod
    def from_monomials(cls, m: int, monomials) -> "BooleanFunction":
        """Sum of monomials, each given as an iterable of 1-based variable indices."""
        c = np.zeros(1 << m, dtype=np.uint8)
        for mono in monomials:
            s = 0
            for i in mono:
                s |= 1 << (i - 1)
            c[s] ^= 1
        return cls(m, mobius(c))

    @classmethod
    def linear(cls, m: int, a: int) -> "BooleanFunction":
        return cls(m, parity(np.arange(1 << m) & a))

    @classmethod
    def from_hex(cls, text: str, m: int) -> "BooleanFunction":
        text = text.strip().lower()
        digits = -(-(1 << m) // 4)
        if len(text) != digits:
            raise MalformedInput(f"expected {digits} hex digits for m={m}, got {len(text)}")
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise MalformedInput(f"not a hex string: {text!r}") from exc
        if value >> (1 << m):
            raise MalformedInput("hex value has bits beyond 2^m points")
        return cls(m, [(value >> x) & 1 for x in range(1 << m)])

    def to_hex(self) -> str:
        digits = -(-(1 << self.m) // 4)
        return format(self.to_int(), f"0{digits}x")

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.table, bitorder="little").tobytes(), "little")

    @property
    def words(self) -> np.ndarray:
        """Truth table packed into uint64 words, point x at bit x % 64 of word x // 64."""
        padded = np.zeros(max(64, self.table.size), dtype=np.uint8)
        padded[: self.table.size] = self.table
        return np.packbits(padded, bitorder="little").view(np.uint64)

    @property
    def weight(self) -> int:
        return int(self.table.sum())

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __add__(self, other: "BooleanFunction") -> "BooleanFunction":
        return BooleanFunction(self.m, self.table ^ other.table)

    def __mul__(self, other: "BooleanFunction") -> "BooleanFunction":
        return BooleanFunction(self.m, self.table & other.table)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.m, self.table.tobytes()))

    def __repr__(self):
        return f"BooleanFunction(m={self.m}, hex={self.to_hex()})"

    def anf(self) -> "Anf":
        return Anf(self.m, mobius(self.table))

    def walsh(self) -> "WalshSpectrum":
        return walsh(self)

    def compose(self, matrix_cols, shift: int = 0) -> "BooleanFunction":
        """f(A x + c) where column j of A is ``matrix_cols[j]`` (an integer point)."""
        x = np.arange(1 << self.m)
        image = np.full(x.shape, shift, dtype=np.int64)
        for j, col in enumerate(matrix_cols):
            image ^= np.where((x >> j) & 1, col, 0)
        return BooleanFunction(self.m, self.table[image])


@dataclass(frozen=True, eq=False)
class Anf:
    """ANF coefficients: ``coeffs[S]`` is the coefficient of the monomial X_S."""

    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = _as_table(self.coeffs)
        if c.size != 1 << self.m:
            raise MalformedInput(f"coefficient vector length {c.size} != 2^{self.m}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def to_function(self) -> BooleanFunction:
        return BooleanFunction(self.m, mobius(self.coeffs))

    def monomials(self):
        return [int(s) for s in np.flatnonzero(self.coeffs)]

    def __str__(self):
        names = "abcdefghijkl"
        terms = []
        for s in self.monomials():
            terms.append("".join(names[j] for j in range(self.m) if s >> j & 1) or "1")
        return "+".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    m: int
    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=np.int64)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    def __getitem__(self, a):
        return int(self.w[a])

    @property
    def linearity(self) -> int:
        return int(np.abs(self.w).max())

    @property
    def fourth_moment(self) -> int:
        return int(sum(int(v) ** 4 for v in self.w))


@dataclass(frozen=True)
class SpectralSummary:
    linearity: int
    kappa_num: int
    kappa: Fraction
    is_bent: bool
    degree: int
    valuation: int


def degree_valuation(f: BooleanFunction) -> tuple[int, int]:
    """(degree, valuation); the zero function reports (0, m + 1)."""
    support = np.flatnonzero(mobius(f.table))
    if support.size == 0:
        return 0, f.m + 1
    pc = popcounts(f.m)[support]
    return int(pc.max()), int(pc.min())


def degree(f: BooleanFunction) -> int:
    return degree_valuation(f)[0]


def degrees_many(tables) -> np.ndarray:
    """Algebraic degree of each row of a stack of truth tables (zero rows -> 0)."""
    anf = mobius(tables)
    m = arity_of(anf.shape[-1])
    return (anf * popcounts(m)).max(axis=-1)


def walsh(f: BooleanFunction) -> WalshSpectrum:
    return WalshSpectrum(f.m, walsh_many(f.table))


def kappa_from_spectrum(w, m: int) -> Fraction:
    w = np.asarray(w, dtype=np.int64)
    return Fraction(int((w**4).sum()), 1 << (3 * m))


def kappa(f: BooleanFunction) -> Fraction:
    """Normalized fourth moment sum_a W(f,a)^4 / 2^(3m), exactly."""
    return kappa_from_spectrum(walsh_many(f.table), f.m)


def kappas_many(tables) -> list[Fraction]:
    w = walsh_many(tables)
    m = arity_of(w.shape[-1])
    return [Fraction(int(n), 1 << (3 * m)) for n in (w**4).sum(axis=-1)]


def autocorrelation(f: BooleanFunction) -> np.ndarray:
    """(f x f)(t) through the spectrum: inverse transform of W^2."""
    w = walsh_many(f.table)
    return fwht(w * w) >> f.m


def autocorrelation_direct(f: BooleanFunction) -> np.ndarray:
    """(f x f)(t) = sum_x (-1)^(f(x) + f(x + t)), summed point by point."""
    s = 1 - 2 * f.table.astype(np.int64)
    x = np.arange(1 << f.m)
    return np.array([int((s * s[x ^ t]).sum()) for t in range(1 << f.m)], dtype=np.int64)


@lru_cache(maxsize=64)
def hyperplane_points(m: int, u: int) -> tuple[np.ndarray, np.ndarray]:
    """Points of H_u and of its complement, indexed by F_2^(m-1).

    With j the lowest set bit of u, y in F_2^(m-1) is spread over the
    coordinates other than j, and coordinate j is set so that u.x = 0
    (resp. 1).
    """
    if u <= 0 or u >= 1 << m:
        raise DomainError("restriction direction must be a nonzero point")
    j = (u & -u).bit_length() - 1
    y = np.arange(1 << (m - 1), dtype=np.int64)
    low = y & ((1 << j) - 1)
    spread = low | ((y >> j) << (j + 1))
    bit = parity(spread & u).astype(np.int64) << j
    h, hbar = spread | bit, spread | (bit ^ (1 << j))
    h.flags.writeable = False
    hbar.flags.writeable = False
    return h, hbar


@lru_cache(maxsize=None)
def restriction_index(m: int) -> np.ndarray:
    """Array of shape (2^m - 1, 2, 2^(m-1)); row u-1 holds both hyperplane point lists."""
    idx = np.stack([np.stack(hyperplane_points(m, u)) for u in range(1, 1 << m)])
    idx.flags.writeable = False
    return idx


def restrict(f: BooleanFunction, u: int) -> tuple[BooleanFunction, BooleanFunction]:
    if f.m < 2:
        raise DomainError("restriction needs m >= 2")
    h, hbar = hyperplane_points(f.m, u)
    return BooleanFunction(f.m - 1, f.table[h]), BooleanFunction(f.m - 1, f.table[hbar])


def spectral_summary(f: BooleanFunction) -> SpectralSummary:
    w = walsh_many(f.table)
    lin = int(np.abs(w).max())
    num = int((w**4).sum())
    deg, val = degree_valuation(f)
    bent = f.m % 2 == 0 and lin == 1 << (f.m // 2)
    return SpectralSummary(lin, num, Fraction(num, 1 << (3 * f.m)), bent, deg, val)


def is_bent(f: BooleanFunction) -> bool:
    return spectral_summary(f).is_bent


def format_kappa(k: Fraction) -> str:
    """Four-decimal rendering used in reports and CLI output."""
    return f"{float(k):.4f}"
