import threading
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apnlab import gf2
from apnlab.bfcore import BooleanFunction
from apnlab.errors import CapacityError, PreconditionError
from apnlab.invariants import (Fingerprint, InternTable, Multiset, apn_fingerprint, component_entries, delta_rank,
                               deserialize, fingerprint, gamma_profile, gamma_rank, lift_by_restriction, lift_spectrum_many,
                               mul_invariant, serialize, spectrum_distribution, valuation_classes,
                               valuation_invariant)
from apnlab.vecfun import VectorialFunction, graph_indicator, random_invertible, subfunction

from oracles import naive_anf, naive_rank


def ea_transform(F, rng):
    """B F(A x + a) + L x + c for random invertible A, B and random linear L."""
    A = random_invertible(F.m, rng)
    B = random_invertible(F.n, rng)
    L = [int(v) for v in rng.integers(0, 1 << F.n, F.m)]
    G = F.compose_input(A, int(rng.integers(0, 1 << F.m))).compose_output(B, int(rng.integers(0, 1 << F.n)))
    x = np.arange(1 << F.m)
    extra = np.zeros(1 << F.m, dtype=np.int64)
    for j, col in enumerate(L):
        extra ^= np.where((x >> j) & 1, col, 0)
    return VectorialFunction(F.m, F.n, G.table ^ extra)


def graph_substitution(f: BooleanFunction, rng) -> BooleanFunction:
    return f.compose(random_invertible(f.m, rng), int(rng.integers(0, 1 << f.m)))


def valuation_value(f: BooleanFunction):
    classes = valuation_classes(f)
    return tuple(spectrum_distribution(classes[k]) for k in ["inf", *range(f.m + 1)])


# ------------------------------------------------------------ fingerprints

values = st.recursive(
    st.integers(-10**6, 10**6) | st.fractions() | st.binary(max_size=8),
    lambda inner: st.lists(inner, max_size=4).map(tuple) | st.lists(inner, max_size=4).map(Multiset),
    max_leaves=12)


def _normal(v):
    if isinstance(v, Multiset):
        return ("m", sorted((_normal(x) for x in v), key=repr))
    if isinstance(v, tuple):
        return ("t", [_normal(x) for x in v])
    return v


@given(values)
def test_serialize_round_trip(v):
    assert _normal(deserialize(serialize(v))) == _normal(v)


@given(st.lists(st.integers(0, 50), max_size=10), st.randoms())
def test_multiset_order_independent(items, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    assert serialize(Multiset(items)) == serialize(Multiset(shuffled))


def test_fingerprint_hex_round_trip():
    fp = fingerprint((1, Fraction(7, 4), Multiset((3, 2))))
    assert Fingerprint.from_hex(fp.hex()) == fp


def test_intern_table_persistence_and_threads(tmp_path):
    path = tmp_path / "intern.tsv"
    table = InternTable(path)
    fps = [fingerprint(i) for i in range(200)]

    def worker(chunk):
        for fp in chunk:
            table.intern(fp)

    threads = [threading.Thread(target=worker, args=(fps[i::4] + fps,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(table) == 200
    assert sorted(table.intern(fp) for fp in fps) == list(range(200))
    again = InternTable(path)
    assert [again.lookup(fp) for fp in fps] == [table.lookup(fp) for fp in fps]


# ------------------------------------------------------------ Boolean invariants

def test_spectrum_distribution_examples():
    bent = BooleanFunction.from_monomials(6, [(1, 2), (3, 4), (5, 6)])
    assert spectrum_distribution(bent).value() == Multiset([(8, 64)])
    assert sorted(spectrum_distribution(BooleanFunction.zero(6)).value()) == [(0, 63), (64, 1)]


def test_boolean_invariants_affine(rng):
    for _ in range(100):
        f = BooleanFunction.from_table(rng.integers(0, 2, 64))
        g = f.compose(random_invertible(6, rng), int(rng.integers(0, 64))) + BooleanFunction.linear(
            6, int(rng.integers(0, 64)))
        if rng.random() < 0.5:
            g = g + BooleanFunction.from_table(np.ones(64, dtype=np.uint8))
        assert spectrum_distribution(f) == spectrum_distribution(g)
        if _ < 20:
            assert lift_by_restriction(spectrum_distribution, f) == lift_by_restriction(spectrum_distribution, g)


def test_lift_of_zero():
    value = lift_by_restriction(spectrum_distribution, BooleanFunction.zero(6)).value()
    assert len(value) == 63 and len({serialize(p) for p in value}) == 1


def test_batched_lift_matches_generic(rng):
    t = rng.integers(0, 2, (6, 64), dtype=np.uint8)
    fast = lift_spectrum_many(t)
    slow = [lift_by_restriction(spectrum_distribution, BooleanFunction.from_table(r)) for r in t]
    assert fast == slow


def test_lift_pairwise_separation_table(reps):
    # component lifts alone take 3 values over the 14 classes and separate 22 of the 83
    # pairs that Gamma-rank separates; the full fingerprint separates all of them
    lifts = [serialize(Multiset(e[2] for e in component_entries(F))) for F in reps]
    fps = [apn_fingerprint(F) for F in reps]
    ranks = [gamma_rank(F) for F in reps]
    pairs = [(i, j) for i, j in combinations(range(14), 2) if ranks[i] != ranks[j]]
    assert len(pairs) == 83
    assert len(set(lifts)) == 3
    assert sum(lifts[i] != lifts[j] for i, j in pairs) == 22
    assert all(fps[i] != fps[j] for i, j in pairs)


# ------------------------------------------------------------ graph invariants

def test_gamma_profile_ea_invariant(reps, rng):
    for basis in [(1, 2, 4, 8), (3, 5, 16, 40)]:
        G = subfunction(reps[0], basis)
        assert gamma_profile(ea_transform(G, rng)) == gamma_profile(G)


def test_gamma_profile_splits_fingerprint_collision(reps):
    # two subfunctions of rep 1 with one fingerprint and 80 vs 78 extension classes
    G, H = subfunction(reps[0], (4, 8, 16, 32)), subfunction(reps[0], (5, 9, 16, 32))
    assert apn_fingerprint(G) == apn_fingerprint(H) and gamma_rank(G) == gamma_rank(H) == 212
    assert gamma_profile(G) != gamma_profile(H)
    assert gamma_profile(G).value()[1] == Multiset([82, 84, 86, 86, 86, 88, 88] + [100] * 8)


def test_graph_ranks_ea_invariant(reps, rng):
    for F in reps[:3]:
        G = ea_transform(F, rng)
        assert gamma_rank(G) == gamma_rank(F)
        assert delta_rank(G) == delta_rank(F)
        assert mul_invariant(2, 0, G) == mul_invariant(2, 0, F)
        assert valuation_invariant(G) == valuation_invariant(F)


def test_graph_invariants_under_graph_substitution(reps, rng):
    for F in reps[:2]:
        gam = graph_indicator(F)
        for _ in range(2):
            sub = graph_substitution(gam, rng)
            assert gf2.translate_rank(sub.table) == gamma_rank(F)
            assert valuation_value(sub) == valuation_value(gam)


def test_inverse_permutation_ccz(reps):
    # the inverse of a permutation has the mirrored graph
    for F in reps:
        if len(set(F.table.tolist())) == 64:
            inv = np.zeros(64, dtype=np.int64)
            inv[F.table] = np.arange(64)
            G = VectorialFunction(6, 6, inv)
            assert gamma_rank(G) == gamma_rank(F)
            assert valuation_invariant(G) == valuation_invariant(F)


def test_delta_rank_on_equal_gamma_ranks(reps):
    # labels 3, 4, 10 and 12 share Gamma-rank 1170; Delta-rank does not split them
    ranks = [gamma_rank(F) for F in reps]
    same = [i + 1 for i, r in enumerate(ranks) if r == 1170]
    assert same == [3, 4, 10, 12]
    assert {delta_rank(reps[i - 1]) for i in same} == {96}
    assert delta_rank(reps[0]) == 152


def test_delta_rank_requires_apn():
    with pytest.raises(PreconditionError):
        delta_rank(VectorialFunction.identity(6))
    with pytest.raises(CapacityError):
        gamma_rank(VectorialFunction.zero(7, 6))


def naive_mul_invariant(p, q, F):
    gamma = graph_indicator(F).table.tolist()
    N = F.m + F.n
    rows = []
    for S in range(1 << N):
        if not q <= bin(S).count("1") <= p:
            continue
        prod = [gamma[x] if x & S == S else 0 for x in range(1 << N)]
        anf = naive_anf(prod)
        rows.append(sum(1 << T for T in range(1 << N) if anf[T] and bin(T).count("1") >= p))
    return len(rows) - naive_rank(rows)


def test_mul_invariant_small_oracle(rng):
    assert mul_invariant(2, 0, VectorialFunction.zero(2, 2)) == naive_mul_invariant(2, 0, VectorialFunction.zero(2, 2))
    for _ in range(10):
        F = VectorialFunction(2, 2, rng.integers(0, 4, 4))
        for p, q in [(2, 0), (1, 0), (2, 1), (3, 2)]:
            assert mul_invariant(p, q, F) == naive_mul_invariant(p, q, F)
    F = VectorialFunction(3, 2, rng.integers(0, 4, 8))
    assert mul_invariant(2, 0, F) == naive_mul_invariant(2, 0, F)


def test_mul_invariant_zero_function():
    # gamma of F = 0 is the product of (1 + y_j); oracle values at m = n = 2 and 3
    for m in (2, 3):
        F = VectorialFunction.zero(m, m)
        assert mul_invariant(2, 0, F) == naive_mul_invariant(2, 0, F)


def test_valuation_invariant_zero_function():
    gam = graph_indicator(VectorialFunction.zero(6, 6))
    classes = valuation_classes(gam)
    nonempty = [k for k, f in classes.items() if f.weight]
    assert nonempty == ["inf", 7]


# ------------------------------------------------------------ vectorial fingerprint

def test_apn_fingerprint_ea_invariant(reps, rng):
    for F in reps:
        assert apn_fingerprint(ea_transform(F, rng)) == apn_fingerprint(F)


def test_fourteen_distinct_fingerprints(reps):
    assert len({apn_fingerprint(F) for F in reps}) == 14


def test_zero_function_entries_identical():
    entries = component_entries(VectorialFunction.zero(6, 6))
    assert len(entries) == 63 and len(set(entries)) == 1
