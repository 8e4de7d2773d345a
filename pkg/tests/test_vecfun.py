from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apnlab.bfcore import BooleanFunction, autocorrelation, degree, walsh
from apnlab.errors import CapacityError, DomainError, PreconditionError, RankError
from apnlab.extsearch import two_level_admissible
from apnlab.invariants import spectrum_distribution
from apnlab.subspaces import echelon_subspaces, gaussian_binomial
from apnlab.vecfun import (VectorialFunction, bent_component_census, component, component_kappas, congruent,
                           counting_function, ddt, differential_uniformity, graph_indicator, is_apn, kappa_sum,
                           power_function, random_invertible, spectral_profile, subfunction)

from oracles import gf_mul, naive_ddt

X6X1 = 0b1000011


def cube_oracle(m, poly):
    return [gf_mul(x, gf_mul(x, x, poly, m), poly, m) for x in range(1 << m)]


def test_component_examples(reps):
    F = reps[0]
    assert component(F, 1).table.tolist() == (F.table & 1).tolist()
    f = component(VectorialFunction.identity(6), 0b100)
    assert f.table.tolist() == [(x >> 2) & 1 for x in range(64)] and degree(f) == 1
    with pytest.raises(DomainError):
        component(F, 0)


def test_quadratic_rep_has_42_bent_components(reps):
    # the representative whose 63 components are all quadratic is the one of type (1, 4)
    quad = [F for F in reps if max(degree(component(F, b)) for b in range(1, 64)) == 2]
    assert quad
    profile = spectral_profile(quad[0])
    assert profile.census() == {Fraction(1): 42, Fraction(4): 21}


def test_ddt_examples():
    I = VectorialFunction.identity(6)
    d = ddt(I)
    assert all(d.counts[u, u] == 64 for u in range(64)) and d.uniformity == 64
    Z = VectorialFunction.zero(6, 6)
    assert (ddt(Z).counts[:, 0] == 64).all() and differential_uniformity(Z) == 64
    F = VectorialFunction(6, 6, cube_oracle(6, X6X1))
    assert F == power_function(6, 3, X6X1)
    assert differential_uniformity(F) == 2


def test_ddt_matches_naive(rng):
    vals = rng.integers(0, 16, 16).tolist()
    F = VectorialFunction(4, 4, vals)
    assert ddt(F).counts.tolist() == naive_ddt(vals, 4)


@given(st.lists(st.integers(0, 7), min_size=32, max_size=32))
def test_ddt_invariants(vals):
    d = ddt(VectorialFunction(5, 3, vals)).counts
    assert (d % 2 == 0).all()
    assert (d.sum(axis=1) == 32).all()
    assert d[0, 0] == 32


def test_representatives_apn_with_exact_kappa_sum(reps):
    for F in reps:
        assert is_apn(F)
        assert kappa_sum(F) == 126


def test_identity_not_apn_with_witness():
    res = is_apn(VectorialFunction.identity(6))
    assert not res
    x, y, z, t = res.witness
    assert x ^ y ^ z ^ t == 0 and len({x, y, z, t}) == 4
    with pytest.raises(DomainError):
        is_apn(VectorialFunction.zero(6, 5))


def test_criterion_equivalence_random_non_apn(rng):
    for _ in range(100):
        F = VectorialFunction(6, 6, rng.integers(0, 64, 64))
        assert bool(is_apn(F)) == (kappa_sum(F) == 126)
        assert not is_apn(F)


def test_counting_functions(reps):
    for F in reps:
        for u in range(1, 64):
            assert counting_function(F, u).f.weight == 32
    with pytest.raises(PreconditionError):
        counting_function(VectorialFunction.identity(6), 1)


def test_link_identity_rep1(reps):
    F = reps[0]
    for u in range(1, 64):
        w = walsh(counting_function(F, u).f).w
        assert w[0] == 0
        for b in range(1, 64):
            assert w[b] == -autocorrelation(component(F, b))[u]


def test_spectral_profile_levels(reps):
    for F in reps:
        assert spectral_profile(F).levels >= 2
    # (x, y) -> x y over GF(8): every nonzero component is bent
    bent3 = VectorialFunction(6, 3, [gf_mul(v & 7, v >> 3, 0b1011, 3) for v in range(64)])
    prof = spectral_profile(bent3)
    assert prof.kappa_multiset == (Fraction(1),) * 7


def test_two_level_type_pair():
    assert (Fraction(7, 4), Fraction(4), 56, 7) in two_level_admissible({Fraction(7, 4), Fraction(4)}, 64)


def test_graph_indicator(reps):
    g = graph_indicator(VectorialFunction.zero(6, 6))
    assert g.weight == 64 and g.table[:64].all()
    for F in reps:
        assert graph_indicator(F).weight == 64
    with pytest.raises(CapacityError):
        graph_indicator(VectorialFunction.zero(7, 6))


def test_graph_indicator_output_translation(rng, reps):
    F = reps[2]
    base = graph_indicator(F)
    from apnlab.bfcore import degree_valuation
    for _ in range(5):
        c = int(rng.integers(0, 64))
        G = VectorialFunction(6, 6, F.table ^ c)
        shifted = graph_indicator(G)
        assert degree_valuation(shifted)[0] == degree_valuation(base)[0]
        assert spectrum_distribution(shifted) == spectrum_distribution(base)


def test_subfunction(reps):
    F = reps[0]
    assert congruent(subfunction(F, [1, 2, 4, 8, 16, 32]), F)
    assert len(list(echelon_subspaces(6, 5))) == 63
    assert gaussian_binomial(6, 2) == 651
    with pytest.raises(RankError):
        subfunction(F, [3, 5, 6])


def test_congruent(reps, rng):
    F = reps[0]
    L = VectorialFunction.identity(6).compose_output(random_invertible(6, rng), 17)
    assert congruent(F, VectorialFunction(6, 6, F.table ^ L.table))
    B = random_invertible(6, rng)
    assert congruent(F, F.compose_output(B))
    assert not congruent(reps[0], reps[12])


def test_bent_census(reps):
    assert bent_component_census(VectorialFunction.identity(6)) == (0, 0)
    allowed = {0, 8, 16, 21, 24, 44, 48, 60, 74, 75, 140}
    for F in reps:
        assert bent_component_census(F)[1] in allowed
    assert sum(1 for _ in echelon_subspaces(6, 3)) == 1395


def test_mnbc_bound(reps):
    for F in reps:
        assert bent_component_census(F)[0] <= 64 - 8


def test_power_functions():
    assert power_function(6, 1) == VectorialFunction.identity(6)
    assert is_apn(power_function(6, 3, X6X1))
    F = power_function(5, 3)
    dists = {spectrum_distribution(component(F, b)) for b in range(1, 32)}
    assert len(dists) == 1
    with pytest.raises(DomainError):
        power_function(6, 3, 0b1000001)


def test_component_kappas_are_exact(reps):
    ks = component_kappas(reps[0])
    assert len(ks) == 63 and all(isinstance(k, Fraction) for k in ks)


def test_text_round_trip(reps):
    F = reps[4]
    assert VectorialFunction.from_text(F.to_text(), 6) == F
