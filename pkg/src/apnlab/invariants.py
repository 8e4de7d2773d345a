"""Affine, EA and CCZ invariants with canonical byte fingerprints.

Every invariant value is serialized by :func:`serialize` into a type-tagged,
length-prefixed byte string.  Multisets are serialized with their members
sorted by encoded bytes, so equal multisets give identical bytes whatever
order they were built in.
"""

from __future__ import annotations

import hashlib
import struct
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import gf2
from .bfcore import (
    MAX_ARITY,
    BooleanFunction,
    degrees_many,
    fwht,
    mobius,
    parity,
    popcounts,
    restriction_index,
    restrict,
    walsh_many,
)
from .errors import CapacityError, MalformedInput, PreconditionError
from .subspaces import echelon_subspaces
from .vecfun import VectorialFunction, derivative_table, graph_indicator, subfunction


class Multiset(tuple):
    """A tuple whose serialization ignores member order."""


@dataclass(frozen=True, order=True)
class Fingerprint:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, text: str) -> "Fingerprint":
        return cls(bytes.fromhex(text))

    def value(self):
        return deserialize(self.data)

    def digest(self, size: int = 8) -> bytes:
        return hashlib.blake2b(self.data, digest_size=size).digest()

    def __repr__(self):
        return f"Fingerprint({self.digest().hex()})"


# --- canonical serialization -------------------------------------------------

def _frame(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack(">I", len(payload)) + payload


def serialize(obj) -> bytes:
    if isinstance(obj, Fingerprint):
        return _frame(b"b", obj.data)
    if isinstance(obj, (bool, np.bool_)):
        return _frame(b"i", str(int(obj)).encode())
    if isinstance(obj, (int, np.integer)):
        return _frame(b"i", str(int(obj)).encode())
    if isinstance(obj, Fraction):
        return _frame(b"q", serialize(obj.numerator) + serialize(obj.denominator))
    if isinstance(obj, bytes):
        return _frame(b"b", obj)
    if isinstance(obj, Multiset):
        parts = sorted(serialize(x) for x in obj)
        return _frame(b"m", b"".join(parts))
    if isinstance(obj, (tuple, list)):
        return _frame(b"t", b"".join(serialize(x) for x in obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _decode(buf: bytes, pos: int):
    tag = buf[pos:pos + 1]
    (size,) = struct.unpack(">I", buf[pos + 1:pos + 5])
    start, end = pos + 5, pos + 5 + size
    if end > len(buf):
        raise MalformedInput("truncated fingerprint")
    body = buf[start:end]
    if tag == b"i":
        return int(body.decode()), end
    if tag == b"b":
        return bytes(body), end
    if tag in (b"t", b"m", b"q"):
        items, p = [], start
        while p < end:
            item, p = _decode(buf, p)
            items.append(item)
        if tag == b"q":
            return Fraction(items[0], items[1]), end
        return (Multiset(items) if tag == b"m" else tuple(items)), end
    raise MalformedInput(f"unknown fingerprint tag {tag!r}")


def deserialize(data: bytes):
    value, end = _decode(data, 0)
    if end != len(data):
        raise MalformedInput("trailing bytes in fingerprint")
    return value


def fingerprint(obj) -> Fingerprint:
    return Fingerprint(serialize(obj))


# --- intern table ------------------------------------------------------------

class InternTable:
    """Dense ids for fingerprints, in insertion order; safe to share between threads."""

    def __init__(self, path=None):
        self._ids: dict[bytes, int] = {}
        self._items: list[bytes] = []
        self._lock = threading.Lock()
        self.path = Path(path) if path else None
        if self.path and self.path.exists():
            self._replay()

    def _replay(self):
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                idx, hexdata = line.split("\t")
                data = bytes.fromhex(hexdata)
                if int(idx) != len(self._items) or data in self._ids:
                    raise MalformedInput(f"corrupt intern table at id {idx}")
                self._ids[data] = len(self._items)
                self._items.append(data)

    def intern(self, fp: Fingerprint | bytes) -> int:
        data = fp.data if isinstance(fp, Fingerprint) else bytes(fp)
        with self._lock:
            idx = self._ids.get(data)
            if idx is None:
                idx = len(self._items)
                self._ids[data] = idx
                self._items.append(data)
                if self.path:
                    with open(self.path, "a") as fh:
                        fh.write(f"{idx}\t{data.hex()}\n")
            return idx

    def lookup(self, fp: Fingerprint | bytes) -> int | None:
        data = fp.data if isinstance(fp, Fingerprint) else bytes(fp)
        return self._ids.get(data)

    def __getitem__(self, idx: int) -> Fingerprint:
        return Fingerprint(self._items[idx])

    def __len__(self):
        return len(self._items)

    def __contains__(self, fp):
        return self.lookup(fp) is not None


# --- Boolean-function invariants ----------------------------------------------

def _distribution_value(abs_values) -> Multiset:
    return Multiset(tuple(kv) for kv in Counter(int(v) for v in abs_values).items())


def spectrum_distribution(f: BooleanFunction) -> Fingerprint:
    """Multiset of absolute Walsh values with multiplicities."""
    return fingerprint(_distribution_value(np.abs(walsh_many(f.table))))


def lift_by_restriction(base, f: BooleanFunction) -> Fingerprint:
    """Multiset over u != 0 of the unordered pair {base(f|H_u), base(f|H_u + e)}."""
    pairs = []
    for u in range(1, 1 << f.m):
        h, hbar = restrict(f, u)
        pairs.append(Multiset((base(h), base(hbar))))
    return fingerprint(Multiset(pairs))


def _histogram_bytes(hist_rows: np.ndarray, values: np.ndarray) -> list[bytes]:
    """Serialized spectrum distributions for histogram rows (one per restriction)."""
    cache: dict[bytes, bytes] = {}
    out = []
    rows = np.ascontiguousarray(hist_rows)
    for row in rows:
        key = row.tobytes()
        enc = cache.get(key)
        if enc is None:
            dist = Multiset((int(values[i]), int(row[i])) for i in np.flatnonzero(row))
            enc = cache[key] = serialize(fingerprint(dist))
        out.append(enc)
    return out


def lift_spectrum_many(tables) -> list[Fingerprint]:
    """lift_by_restriction(spectrum_distribution, f) for a stack of truth tables.

    Gives byte-identical results to the generic path, computed with one
    batched transform.
    """
    t = np.asarray(tables, dtype=np.uint8)
    m = int(t.shape[-1]).bit_length() - 1
    idx = restriction_index(m)  # (2^m - 1, 2, 2^(m-1))
    restricted = t[:, idx]  # (k, 2^m - 1, 2, 2^(m-1))
    absw = np.abs(walsh_many(restricted))
    values = np.arange(0, (1 << (m - 1)) + 1)
    rows = absw.reshape(-1, absw.shape[-1])
    offsets = np.arange(rows.shape[0])[:, None] * values.size
    hist = np.bincount((rows + offsets).ravel(), minlength=rows.shape[0] * values.size)
    flat = _histogram_bytes(hist.reshape(-1, values.size), values)
    k, nu = t.shape[0], idx.shape[0]
    out = []
    for i in range(k):
        pairs = []
        base = i * nu * 2
        for u in range(nu):
            a, b = flat[base + 2 * u], flat[base + 2 * u + 1]
            pair = a + b if a <= b else b + a
            pairs.append(_frame(b"m", pair))
        pairs.sort()
        out.append(Fingerprint(_frame(b"m", b"".join(pairs))))
    return out


# --- graph-level invariants ----------------------------------------------------

def _check_capacity(F: VectorialFunction):
    if F.m + F.n > MAX_ARITY:
        raise CapacityError(f"m + n = {F.m + F.n} exceeds {MAX_ARITY}")


def gamma_rank(F: VectorialFunction) -> int:
    """F2 rank of M[s][t] = gamma_F(s + t), gamma_F the graph indicator."""
    _check_capacity(F)
    return gf2.translate_rank(graph_indicator(F).table)


def gamma_profile(F: VectorialFunction) -> Fingerprint:
    """Gamma-rank of F with the Gamma-rank multisets of its (m, n-1) and (m, n-2) subfunctions.

    An output linear map permutes the subspaces of each dimension, so this is
    EA-invariant.  It separates (6,4)-functions that share apn_fingerprint.
    """
    parts = [gamma_rank(F)]
    for k in (F.n - 1, F.n - 2):
        if k >= 1:
            parts.append(Multiset(gamma_rank(subfunction(F, b)) for b in echelon_subspaces(F.n, k)))
    return fingerprint(tuple(parts))


def difference_set(F: VectorialFunction) -> BooleanFunction:
    """Indicator of {(u, v) : u != 0, N_F(u, v) = 2}, u in the low bits."""
    _check_capacity(F)
    d = derivative_table(F)
    q = 1 << F.m
    counts = np.zeros((q, 1 << F.n), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(q), q), d.ravel()), 1)
    if counts[1:].max() > 2:
        raise PreconditionError("delta rank needs an APN input")
    u, v = np.nonzero(counts == 2)
    keep = u != 0
    t = np.zeros(1 << (F.m + F.n), dtype=np.uint8)
    t[u[keep] | (v[keep] << F.m)] = 1
    return BooleanFunction(F.m + F.n, t)


def delta_rank(F: VectorialFunction) -> int:
    return gf2.translate_rank(difference_set(F).table)


def mul_invariant(p: int, q: int, F: VectorialFunction) -> int:
    """Kernel dimension of g -> (g * gamma_F) with ANF terms of degree < p removed.

    g ranges over functions of valuation >= q and degree <= p on m + n
    variables.
    """
    _check_capacity(F)
    gamma = graph_indicator(F)
    N = gamma.m
    pc = popcounts(N)
    monos = np.flatnonzero((pc >= q) & (pc <= p))
    if monos.size == 0:
        return 0
    pts = np.arange(1 << N)
    # truth table of X_S is [S subset of x]
    truth = ((pts[None, :] & monos[:, None]) == monos[:, None]).astype(np.uint8)
    products = mobius(truth & gamma.table[None, :])
    products[:, pc < p] = 0
    return int(monos.size - gf2.rank(gf2.pack_rows(products), 1 << N))


def two_adic_valuation(values: np.ndarray) -> np.ndarray:
    """v_2 of each entry; zero entries map to -1 (the infinity marker here)."""
    a = np.abs(np.asarray(values, dtype=np.int64))
    low = a & -a
    v = np.where(a == 0, -1, np.log2(np.where(low == 0, 1, low)).astype(np.int64))
    return v


def valuation_classes(f: BooleanFunction) -> dict:
    """psi_v for v in (inf, 0, ..., m): indicator of the Walsh points of valuation v."""
    v = two_adic_valuation(walsh_many(f.table))
    out = {"inf": BooleanFunction(f.m, (v == -1).astype(np.uint8))}
    for k in range(f.m + 1):
        out[k] = BooleanFunction(f.m, (v == k).astype(np.uint8))
    return out


def valuation_invariant(F: VectorialFunction) -> Fingerprint:
    """(j(psi_inf), j(psi_0), ..., j(psi_N)) for the graph indicator, j = spectrum distribution."""
    _check_capacity(F)
    classes = valuation_classes(graph_indicator(F))
    return fingerprint(tuple(spectrum_distribution(classes[k]) for k in ["inf", *range(F.m + F.n + 1)]))


# --- vectorial fingerprint ----------------------------------------------------

def component_entries(F: VectorialFunction) -> list[tuple]:
    """(degree, kappa, lift digest) per nonzero component, degrees <= 1 merged."""
    tables = F.component_tables()
    degs = np.maximum(degrees_many(tables), 1)
    w = walsh_many(tables)
    nums = (w**4).sum(axis=1)
    den = 1 << (3 * F.m)
    lifts = lift_spectrum_many(tables) if F.m >= 2 else [Fingerprint(b"")] * len(tables)
    return [
        (int(d), Fraction(int(k), den), lf.digest())
        for d, k, lf in zip(degs, nums, lifts)
    ]


def autocorrelation_square_table(F: VectorialFunction) -> np.ndarray:
    """Q[u, b] = ((F_b x F_b)(u))^2 for u in F_2^m, b in F_2^n (b = 0 included).

    Input and output affine maps act on Q by a linear change of (u, b), and
    adding an affine map only flips autocorrelation signs.
    """
    b = np.arange(1 << F.n)
    comps = parity(b[:, None] & F.table[None, :])
    w = walsh_many(comps)
    ac = fwht(w * w) >> F.m
    return (ac * ac).T


def autocorrelation_spectra(F: VectorialFunction) -> tuple[Multiset, Multiset]:
    """Value distributions of the 2-D Walsh transform of Q and of Q's self-correlation.

    Q is read as a function on F_2^(m+n) with index u * 2^n + b.  For a
    quadratic APN function these are the Walsh and differential spectra of
    its ortho-derivative, up to scaling.
    """
    q = autocorrelation_square_table(F).reshape(-1)
    qh = fwht(q)
    corr = fwht(qh * qh)
    return (
        Multiset(tuple(kv) for kv in Counter(np.abs(qh).tolist()).items()),
        Multiset(tuple(kv) for kv in Counter(corr.tolist()).items()),
    )


def apn_fingerprint(F: VectorialFunction) -> Fingerprint:
    """EA-invariant fingerprint of a vectorial function.

    Combines the multiset of per-component (degree, kappa, lift digest) with
    the spectra of the squared autocorrelation table; the component multiset
    alone cannot tell apart quadratic APN functions of the same type.
    """
    return fingerprint((Multiset(component_entries(F)), autocorrelation_spectra(F)))
