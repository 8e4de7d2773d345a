import json
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apnlab.codec import encode
from apnlab.errors import ApnlabError, MalformedInput, PreconditionError
from apnlab.pipeline import (REPORT_SCHEMA, ClosureReport, ResultStore, bent_extension_sweep, bent_subspaces,
                             codim2_sweep, default_coordinate_pool, fingerprint_id, invariant_profile,
                             known_profiles, one_switch_closure, outside_known_classes, parse_report, report,
                             store_summary, validate_report)
from apnlab.vecfun import (KNOWN_APN_COMPONENT_KAPPAS, VectorialFunction, component_kappas, is_apn, power_function,
                           subfunction)

from oracles import gf_mul


def mm_bent(perm):
    """(x, y) -> x perm(y) over GF(8); every nonzero component is bent."""
    return VectorialFunction(6, 3, [gf_mul(v & 7, int(perm[v >> 3]), 0b1011, 3) for v in range(64)])


# ------------------------------------------------------------ store

def test_store_add_and_dedup(reps, tmp_path):
    store = ResultStore(tmp_path / "log")
    fid, new = store.add(reps[0], "seed:1")
    assert new and fid == fingerprint_id(reps[0])
    assert store.add(reps[0], "again") == (fid, False)
    assert len(store) == 1 and store.function(fid) == reps[0]
    with pytest.raises(MalformedInput):
        store.add(reps[1], "bad\ttag")


@pytest.fixture(scope="module")
def log_bytes(reps, tmp_path_factory):
    path = tmp_path_factory.mktemp("store") / "log"
    store = ResultStore(path)
    for i, F in enumerate(reps):
        store.add(F, f"seed:{i + 1}")
    return path.read_bytes(), store.records


@given(st.integers(0, 10**6))
def test_store_replay_after_crash_cut(tmp_path_factory, log_bytes, cut):
    data, records = log_bytes
    cut %= len(data) + 1
    path = tmp_path_factory.mktemp("cut") / "log"
    path.write_bytes(data[:cut])
    store = ResultStore(path)
    complete = data[:cut].count(b"\n")
    assert store.records == records[:complete]
    # the partial tail is trimmed, so appending keeps the log well formed
    assert path.read_bytes() == data[: len(b"".join(line + b"\n" for line in data.split(b"\n")[:complete]))]


def test_store_rejects_corruption(reps, tmp_path):
    path = tmp_path / "log"
    path.write_text("abc\tnot-a-code\tseed:1\n")
    with pytest.raises(MalformedInput):
        ResultStore(path)
    line = f"abc\t{encode(reps[0])}\tseed:1\n"
    path.write_text(line + line)
    with pytest.raises(MalformedInput):
        ResultStore(path)


def test_store_write_failure(reps, tmp_path):
    store = ResultStore(tmp_path / "missing-dir" / "log")
    with pytest.raises(ApnlabError):
        store.add(reps[0], "seed:1")
    assert len(store) == 0


# ------------------------------------------------------------ reports

def test_empty_report():
    doc = json.loads(report(ResultStore()))
    assert doc["apn_found"] == 0 and doc["fingerprints"] == [] and doc["seeds"] == []
    validate_report(doc)


def test_seed_store_report(reps):
    store = ResultStore()
    for i, F in enumerate(reps):
        store.add(F, f"seed:{i + 1}")
    doc = json.loads(report(store))
    assert len(doc["fingerprints"]) == 14 and doc["seeds"] == [str(i) for i in range(1, 15)]
    assert store_summary(store) == doc


def test_report_round_trip_and_schema():
    rep = ClosureReport(seeds=["1", "8"], rounds=2, subfunctions_examined=126, apn_found=300,
                        fingerprint_ids=["00aa", "ff01"], dim_histogram={12: 100, 13: 26},
                        new_fingerprints=2, complete=False, unfinished=[3, 7])
    j = parse_report(report(rep, "json"), "json")
    c = parse_report(report(rep, "csv"), "csv")
    assert j == c
    validate_report(j)
    assert set(REPORT_SCHEMA["required"]) <= set(j)
    assert report(rep) == report(rep)
    with pytest.raises(ValueError):
        report(rep, "xml")
    with pytest.raises(MalformedInput):
        validate_report({k: v for k, v in j.items() if k != "rounds"})


# ------------------------------------------------------------ closure

def test_profiles(reps):
    # several quadratic classes share a profile
    assert len(known_profiles()) == 10
    prof = invariant_profile(reps[0])
    assert prof[0] == 1300 and not outside_known_classes(prof)
    assert outside_known_classes((1234, prof[1]))
    assert outside_known_classes((1300, (("3/2", 63),)))


def test_closure_single_seed(reps):
    rep = one_switch_closure([reps[4]], 1, labels=[5])
    assert rep.dim_histogram == {12: 21, 13: 42}
    # solution cosets come in powers of two: one per dim-12 subfunction, two per dim-13 one
    assert rep.apn_found == 21 * 1 + 42 * 2
    assert rep.subfunctions_examined == 63


def test_closure_monotone_and_deterministic(reps):
    one = one_switch_closure([reps[4]], 1, labels=[5])
    two = one_switch_closure([reps[4]], 2, labels=[5])
    assert set(one.fingerprint_ids) <= set(two.fingerprint_ids)
    again = one_switch_closure([reps[4]], 2, labels=[5], threads=2)
    assert report(two) == report(again)


def test_closure_of_cube_keeps_kappa_values():
    store = ResultStore()
    one_switch_closure([power_function(6, 3, 0b1000011)], 2, labels=["x3"], store=store)
    for fid in store.ids():
        assert set(component_kappas(store.function(fid))) <= KNOWN_APN_COMPONENT_KAPPAS


def test_closure_rejects_non_apn():
    with pytest.raises(PreconditionError):
        one_switch_closure([VectorialFunction.identity(6)], 1)


# ------------------------------------------------------------ sweeps

@pytest.mark.slow
def test_codim2_filtered_equals_unfiltered(reps):
    filtered = codim2_sweep(reps[0])
    unfiltered = codim2_sweep(reps[0], filter=False)
    assert filtered.fingerprint_ids == unfiltered.fingerprint_ids
    assert filtered.complete and unfiltered.complete
    # measured: 2-switch neighbours reach well beyond the two-round 1-switch closure (210 ids)
    assert len(unfiltered.fingerprint_ids) == 392
    assert fingerprint_id(reps[0]) in unfiltered.fingerprint_ids
    # fingerprint-level containment is impossible here; profile-level holds
    assert filtered.new_outside_seed_closure == unfiltered.new_outside_seed_closure == 0


def test_codim2_sweep_extensions_apn(reps):
    store = ResultStore()
    rep = codim2_sweep(reps[7], store=store)
    assert rep.subfunctions_examined == 651 and rep.complete
    assert rep.apn_found > 0
    assert all(is_apn(store.function(fid)) for fid in store.ids())
    assert rep.new_outside_seed_closure == 0


def test_bent_sweep_from_representative(reps):
    F = reps[1]
    spaces = bent_subspaces(F)
    assert len(spaces) == 75
    B = subfunction(F, spaces[0])
    pool = [(t, f) for t, f in default_coordinate_pool() if t.startswith("2.")]
    store = ResultStore()
    rep = bent_extension_sweep(B, pool=pool, store=store)
    assert rep.fingerprint_ids and rep.new_outside_seed_closure == 0
    assert fingerprint_id(F) in rep.fingerprint_ids
    assert all(is_apn(store.function(fid)) for fid in store.ids())


def test_bent_sweep_empty_for_inextensible_triple():
    B = mm_bent([5, 0, 1, 4, 2, 6, 3, 7])
    rep = bent_extension_sweep(B)
    assert rep.subfunctions_examined == 882
    assert rep.fingerprint_ids == [] and rep.apn_found == 0


def test_bent_sweep_preconditions(reps):
    with pytest.raises(PreconditionError):
        bent_extension_sweep(subfunction(reps[0], [1, 2, 4]))
    with pytest.raises(PreconditionError):
        bent_extension_sweep(reps[0])
