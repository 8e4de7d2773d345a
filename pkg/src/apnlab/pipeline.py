"""Batch experiments: 1-switch closure, codim-2 sweeps, bent-extension sweeps.

Functions are deduplicated by ``apn_fingerprint`` and identified by the hex
digest of that fingerprint, so every count in a report is a count of
fingerprint classes, not of proven EA classes.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from . import extsearch as ext
from .codec import decode, encode, known_representatives
from .errors import ApnlabError, BudgetExhausted, MalformedInput, NormalizationError, PreconditionError
from .invariants import apn_fingerprint, gamma_profile, gamma_rank
from .subspaces import echelon_subspaces
from .vecfun import (KNOWN_APN_COMPONENT_KAPPAS, VectorialFunction, bent_flags, component, component_kappas,
                     is_apn, subfunction)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
DEFAULT_ROUNDS = 2


def fingerprint_id(F: VectorialFunction) -> str:
    return apn_fingerprint(F).digest().hex()


# ---------------------------------------------------------------- store

class ResultStore:
    """Append-only log of "id<TAB>code64<TAB>provenance" lines with an id index.

    Replay ignores a trailing partial line (a crash in mid-write), and
    reopening for append trims it so the log stays well formed.
    """

    def __init__(self, path=None):
        self.path = path
        self._records: list[tuple[str, str, str]] = []
        self._index: dict[str, int] = {}
        self._lock = threading.Lock()
        if path is not None and os.path.exists(path):
            self._replay()

    def _replay(self):
        with open(self.path, "rb") as fh:
            data = fh.read()
        cut = data.rfind(b"\n") + 1
        if cut < len(data):
            log.warning("dropping %d bytes of partial record from %s", len(data) - cut, self.path)
            with open(self.path, "r+b") as fh:
                fh.truncate(cut)
        for lineno, line in enumerate(data[:cut].decode().splitlines(), 1):
            parts = line.split("\t")
            if len(parts) != 3 or not parts[0]:
                raise MalformedInput(f"{self.path}:{lineno}: expected id<TAB>code64<TAB>provenance")
            decode(parts[1])
            if parts[0] in self._index:
                raise MalformedInput(f"{self.path}:{lineno}: duplicate id {parts[0]}")
            self._index[parts[0]] = len(self._records)
            self._records.append(tuple(parts))

    def add(self, F: VectorialFunction, provenance: str, fid: str | None = None) -> tuple[str, bool]:
        """Insert F unless its fingerprint id is known; returns (id, inserted)."""
        if "\t" in provenance or "\n" in provenance:
            raise MalformedInput("provenance may not contain tabs or newlines")
        fid = fid or fingerprint_id(F)
        with self._lock:
            if fid in self._index:
                return fid, False
            rec = (fid, encode(F), provenance)
            if self.path is not None:
                try:
                    with open(self.path, "a") as fh:
                        fh.write("\t".join(rec) + "\n")
                except OSError as exc:
                    raise ApnlabError(f"store write failed, log is intact up to the last record: {exc}") from exc
            self._index[fid] = len(self._records)
            self._records.append(rec)
            return fid, True

    def __contains__(self, fid: str) -> bool:
        return fid in self._index

    def __len__(self):
        return len(self._records)

    def __getitem__(self, fid: str) -> tuple[str, str, str]:
        return self._records[self._index[fid]]

    @property
    def records(self) -> list[tuple[str, str, str]]:
        return list(self._records)

    def ids(self) -> list[str]:
        return sorted(self._index)

    def function(self, fid: str) -> VectorialFunction:
        return decode(self[fid][1])


# ---------------------------------------------------------------- reports

@dataclass
class ClosureReport:
    seeds: list
    rounds: int = 0
    subfunctions_examined: int = 0
    apn_found: int = 0
    fingerprint_ids: list = field(default_factory=list)
    dim_histogram: dict = field(default_factory=dict)
    new_fingerprints: int = 0
    new_profiles: int = 0
    new_outside_seed_closure: int = 0
    complete: bool = True
    unfinished: list = field(default_factory=list)

    @property
    def fingerprints(self) -> int:
        return len(self.fingerprint_ids)

    def to_dict(self) -> dict:
        return {
            "seeds": [str(s) for s in self.seeds],
            "rounds": self.rounds,
            "subfunctions": self.subfunctions_examined,
            "apn_found": self.apn_found,
            "fingerprints": sorted(self.fingerprint_ids),
            "dim_histogram": {str(k): self.dim_histogram[k] for k in sorted(self.dim_histogram)},
            "outside_closure": self.new_outside_seed_closure,
            "new_fingerprints": self.new_fingerprints,
            "new_profiles": self.new_profiles,
            "complete": self.complete,
            "unfinished": list(self.unfinished),
        }


REPORT_KEYS = ("seeds", "rounds", "subfunctions", "apn_found", "fingerprints", "dim_histogram", "outside_closure")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": list(REPORT_KEYS),
    "properties": {
        "seeds": {"type": "array", "items": {"type": "string"}},
        "rounds": {"type": "integer"},
        "subfunctions": {"type": "integer"},
        "apn_found": {"type": "integer"},
        "fingerprints": {"type": "array", "items": {"type": "string"}},
        "dim_histogram": {"type": "object", "additionalProperties": {"type": "integer"}},
        "outside_closure": {"type": "integer"},
        "new_fingerprints": {"type": "integer"},
        "new_profiles": {"type": "integer"},
        "complete": {"type": "boolean"},
        "unfinished": {"type": "array", "items": {"type": "integer"}},
    },
}

def validate_report(doc) -> None:
    """Check a report document against REPORT_SCHEMA; raises MalformedInput."""
    try:
        jsonschema.validate(doc, REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise MalformedInput(f"report {where}: {exc.message}") from exc


def store_summary(store: ResultStore) -> dict:
    """Report document derivable from a store alone (no per-run counters)."""
    seeds, rounds, found = [], 0, 0
    for _, _, prov in store.records:
        tag = prov.split(":")
        if tag[0] == "seed":
            seeds.append(tag[1] if len(tag) > 1 else "")
        else:
            found += 1
            for t in tag:
                if t.startswith("r") and t[1:].isdigit():
                    rounds = max(rounds, int(t[1:]))
    return ClosureReport(seeds=seeds, rounds=rounds, apn_found=found,
                         fingerprint_ids=store.ids()).to_dict()


def report(source, format: str = "json") -> str:
    """Deterministic JSON or CSV document for a ClosureReport or a ResultStore."""
    if isinstance(source, ResultStore):
        doc = store_summary(source)
    elif isinstance(source, ClosureReport):
        doc = source.to_dict()
    elif isinstance(source, dict):
        doc = source
    else:
        raise TypeError("report needs a ClosureReport, ResultStore or document")
    validate_report(doc)
    if format == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for key in sorted(doc):
            v = doc[key]
            if isinstance(v, dict):
                for k in sorted(v, key=lambda s: (len(s), s)):
                    w.writerow([f"{key}.{k}", v[k]])
                if not v:
                    w.writerow([f"{key}.", ""])
            elif isinstance(v, list):
                w.writerow([key, ";".join(str(x) for x in v)])
            elif isinstance(v, bool):
                w.writerow([key, "true" if v else "false"])
            else:
                w.writerow([key, v])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def parse_report(text: str, format: str = "json") -> dict:
    """Inverse of ``report`` for both formats."""
    if format == "json":
        return json.loads(text)
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["key", "value"]:
        raise MalformedInput("CSV report must start with a key,value header")
    list_keys = {k for k, s in REPORT_SCHEMA["properties"].items() if s["type"] == "array"}
    int_list = {"unfinished"}
    doc: dict = {}
    for key, value in rows[1:]:
        if "." in key:
            head, sub = key.split(".", 1)
            d = doc.setdefault(head, {})
            if sub:
                d[sub] = int(value)
        elif key in list_keys:
            items = value.split(";") if value else []
            doc[key] = [int(x) for x in items] if key in int_list else items
        elif value in ("true", "false"):
            doc[key] = value == "true"
        else:
            doc[key] = int(value)
    return doc


# ---------------------------------------------------------------- profiles

def invariant_profile(F: VectorialFunction) -> tuple:
    """(Gamma-rank, sorted kappa census) of an APN function."""
    census = Counter(component_kappas(F))
    return gamma_rank(F), tuple(sorted((str(k), c) for k, c in census.items()))


_KNOWN_PROFILES = None


def known_profiles() -> set:
    """Exact (Gamma-rank, kappa census) pairs of the 14 embedded representatives."""
    global _KNOWN_PROFILES
    if _KNOWN_PROFILES is None:
        _KNOWN_PROFILES = {invariant_profile(r.function) for r in known_representatives()}
    return _KNOWN_PROFILES


def outside_known_classes(profile: tuple, ranks=None) -> bool:
    """Whether a profile cannot belong to one of the 14 known CCZ classes.

    Gamma-rank is a CCZ invariant, so it must be one of the 14 class ranks;
    the kappa census is only an EA invariant and changes between the EA
    classes of one CCZ class, so it is only required to draw its values
    from the kappa values of components of known APN functions.
    """
    ranks = {p[0] for p in known_profiles()} if ranks is None else ranks
    rank, census = profile
    return rank not in ranks or any(Fraction(k) not in KNOWN_APN_COMPONENT_KAPPAS for k, _ in census)


def known_fingerprint_ids() -> set:
    return {fingerprint_id(r.function) for r in known_representatives()}


def _map(fn, jobs, threads: int):
    """Order-preserving map, optionally over a thread pool."""
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def _mask_tag(basis) -> str:
    return ".".join(str(int(b)) for b in basis)


# ---------------------------------------------------------------- 1-switch closure

def _switch_job(item):
    F, basis = item
    G = subfunction(F, basis)
    P = ext.ExtensionProblem.build(G, 1)
    space = ext.solve_one_extension(P)
    if not space.consistent:
        return None, []
    out = []
    for g in ext.extension_classes(P, space):
        H = ext.extend(G, g)
        out.append((fingerprint_id(H), H))
    return space.dim, out


def one_switch_closure(seeds, max_rounds: int = DEFAULT_ROUNDS, *, labels=None, store: ResultStore | None = None,
                       threads: int = 1, reference_ranks=None) -> ClosureReport:
    """Iterate: every codim-1 subfunction of the working set, every APN extension of it.

    Extensions are kept one per coset of the trivial kernel part (the other
    solutions are congruent to these).  Round r examines the functions first
    seen in round r-1, so the fingerprint set only grows.
    ``new_profiles`` counts new classes whose exact (Gamma-rank, kappa
    census) pair differs from every seed's, and ``new_outside_seed_closure``
    those that cannot lie in the seeds' CCZ classes (see
    ``outside_known_classes``; ranks default to the seeds' Gamma-ranks).
    """
    seeds = list(seeds)
    labels = [str(x) for x in (labels or range(1, len(seeds) + 1))]
    for F in seeds:
        if (F.m, F.n) != (6, 6) or not is_apn(F):
            raise PreconditionError("closure seeds must be APN (6,6)-functions")
    store = store if store is not None else ResultStore()
    rep = ClosureReport(seeds=labels)
    known: dict[str, VectorialFunction] = {}
    frontier = []
    for lab, F in zip(labels, seeds):
        fid, _ = store.add(F, f"seed:{lab}")
        if fid not in known:
            known[fid] = F
            frontier.append((fid, F))
    seed_ids = set(known)
    subs = list(echelon_subspaces(6, 5))
    hist: Counter = Counter()
    for r in range(1, max_rounds + 1):
        if not frontier:
            break
        rep.rounds = r
        jobs = [(F, b) for _, F in frontier for b in subs]
        results = _map(_switch_job, jobs, threads)
        new = []
        for (parent, _), chunk in zip(frontier, (results[i:i + len(subs)] for i in range(0, len(results), len(subs)))):
            for basis, (dim, found) in zip(subs, chunk):
                rep.subfunctions_examined += 1
                if dim is not None:
                    hist[dim] += 1
                rep.apn_found += len(found)
                for fid, H in found:
                    if fid in known:
                        continue
                    store.add(H, f"switch1:r{r}:{parent}:{_mask_tag(basis)}", fid)
                    known[fid] = H
                    new.append((fid, H))
        log.info("round %d: %d new fingerprint classes", r, len(new))
        frontier = new
    rep.dim_histogram = dict(hist)
    rep.fingerprint_ids = sorted(known)
    rep.new_fingerprints = len(set(known) - seed_ids)
    seed_profiles = {invariant_profile(F) for F in seeds}
    ranks = {p[0] for p in seed_profiles} if reference_ranks is None else set(reference_ranks)
    for fid in sorted(set(known) - seed_ids):
        prof = invariant_profile(known[fid])
        rep.new_profiles += prof not in seed_profiles
        rep.new_outside_seed_closure += outside_known_classes(prof, ranks)
    return rep


# ---------------------------------------------------------------- codim-2 sweeps

def _backtrack_job(item):
    idx, G, budget = item
    P = ext.ExtensionProblem.build(G, 2)
    try:
        sols = ext.backtrack_two_extension(P, budget)
        complete = True
    except BudgetExhausted as exc:
        sols, complete = exc.partial, False
    found = []
    for g in sols:
        H = ext.extend(G, g)
        found.append((fingerprint_id(H), H))
    return idx, complete, found


def _tower_key(G: VectorialFunction) -> tuple:
    # apn_fingerprint alone merges some inequivalent (6,4)-functions with different extensions
    return fingerprint_id(G), gamma_profile(G).digest()


def _passes_filters(G: VectorialFunction) -> bool:
    if not ext.delta_feasibility(G):
        return False
    P = ext.ExtensionProblem.build(G, 2)
    try:
        ext.normalize_pivots(P)
    except NormalizationError:
        return False
    return ext.gf4_relaxation(P)


def _run_towers(rep: ClosureReport, towers, budget, threads, store, provenance, reference_ids):
    """Backtrack every (index, G, tag) tower and fold the extensions into ``rep``."""
    results = _map(_backtrack_job, [(i, G, budget) for i, G, _ in towers], threads)
    tags = {i: tag for i, _, tag in towers}
    hist: Counter = Counter()
    found_by_id: dict = {}
    for idx, complete, found in results:
        hist[len(found)] += 1
        rep.apn_found += len(found)
        if not complete:
            rep.complete = False
            rep.unfinished.append(idx)
        for fid, H in found:
            if store is not None:
                store.add(H, f"{provenance}:{tags[idx]}", fid)
            found_by_id.setdefault(fid, H)
    rep.dim_histogram = dict(hist)
    rep.fingerprint_ids = sorted(found_by_id)
    ref = known_fingerprint_ids() if reference_ids is None else set(reference_ids)
    for fid in rep.fingerprint_ids:
        if fid in ref:
            continue
        rep.new_fingerprints += 1
        prof = invariant_profile(found_by_id[fid])
        rep.new_profiles += prof not in known_profiles()
        rep.new_outside_seed_closure += outside_known_classes(prof)
    return rep


def codim2_sweep(F: VectorialFunction, filter: bool = True, budget: int = DEFAULT_BUDGET, *, label="F",
                 threads: int = 1, store: ResultStore | None = None, reference_ids=None) -> ClosureReport:
    """APN extensions of all 651 (6,4)-subfunctions of F.

    With ``filter`` the subfunctions are deduplicated by fingerprint (refined
    by :func:`gamma_profile`) and
    only those passing the Delta and GF(4) tests are searched.  In the report
    ``dim_histogram`` maps "extensions per searched subfunction" to counts,
    ``new_fingerprints`` counts extension classes outside ``reference_ids``
    (the 14 embedded classes by default), ``outside_closure`` those among
    them whose profile excludes the known CCZ classes, and ``unfinished``
    lists subspace indices whose search ran out of budget.
    """
    if not is_apn(F):
        raise PreconditionError("codim2_sweep needs an APN function")
    rep = ClosureReport(seeds=[str(label)], rounds=1)
    towers, seen = [], set()
    for i, basis in enumerate(echelon_subspaces(6, 4)):
        rep.subfunctions_examined += 1
        G = subfunction(F, basis)
        if filter:
            key = _tower_key(G)
            if key in seen:
                continue
            seen.add(key)
            if not _passes_filters(G):
                continue
        towers.append((i, G, _mask_tag(basis)))
    log.info("codim-2 sweep of %s: searching %d of %d subfunctions", label, len(towers), rep.subfunctions_examined)
    return _run_towers(rep, towers, budget, threads, store, f"switch2:{label}", reference_ids)


# ---------------------------------------------------------------- bent extensions

def bent_subspaces(F: VectorialFunction) -> list[tuple]:
    """Echelon bases of the 3-dim output subspaces whose nonzero components of F are all bent."""
    flags = bent_flags(F)
    out = []
    for basis in echelon_subspaces(F.n, 3):
        a, b, c = basis
        if all(flags[v] for v in (a, b, c, a ^ b, a ^ c, b ^ c, a ^ b ^ c)):
            out.append(basis)
    return out


def default_coordinate_pool() -> list:
    """Nonzero components of the 14 embedded classes, in label then mask order."""
    pool = []
    for r in known_representatives():
        for (b,) in echelon_subspaces(6, 1):
            pool.append((f"{r.label}.{b}", component(r.function, b)))
    return pool


def bent_extension_sweep(B: VectorialFunction, budget: int = DEFAULT_BUDGET, *, pool=None, label="B",
                         threads: int = 1, store: ResultStore | None = None, reference_ids=None) -> ClosureReport:
    """APN extensions (B, f, g) of a (6,3)-function with all components bent.

    The fourth coordinate f runs over ``pool`` (pairs (tag, BooleanFunction);
    by default every component of the embedded classes).  Towers (B, f) are
    deduplicated by fingerprint and gamma profile, filtered by the Delta
    and GF(4) tests, and completed to (6,6) by codim-2 backtracking.
    """
    if (B.m, B.n) != (6, 3):
        raise PreconditionError("bent_extension_sweep takes a (6,3)-function")
    if not bent_flags(B)[1:].all():
        raise PreconditionError("every nonzero component of B must be bent")
    pool = default_coordinate_pool() if pool is None else list(pool)
    rep = ClosureReport(seeds=[str(label)], rounds=1)
    towers, seen = [], set()
    for i, (tag, f) in enumerate(pool):
        rep.subfunctions_examined += 1
        G = B.stack(VectorialFunction(6, 1, f.table))
        key = _tower_key(G)
        if key in seen:
            continue
        seen.add(key)
        if _passes_filters(G):
            towers.append((i, G, str(tag)))
    log.info("bent extension sweep of %s: %d towers pass the tests", label, len(towers))
    return _run_towers(rep, towers, budget, threads, store, f"bentext:{label}", reference_ids)


__all__ = [
    "ClosureReport", "ResultStore", "REPORT_SCHEMA", "bent_extension_sweep", "bent_subspaces",
    "codim2_sweep", "default_coordinate_pool", "fingerprint_id", "invariant_profile", "known_profiles",
    "outside_known_classes",
    "one_switch_closure", "parse_report", "report", "store_summary", "validate_report",
]
