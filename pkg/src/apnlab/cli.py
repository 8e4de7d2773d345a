"""Command-line entry point: ``apnlab <subcommand> ...``.

Data goes to stdout, diagnostics to stderr.  Exit status is 0 on success,
1 when the library rejects the input or a search runs out of budget, and 2
on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from fractions import Fraction

from . import extsearch as ext
from . import pipeline
from .bfcore import BooleanFunction, arity_of, degree, format_kappa
from .codec import decode, read_c64, representative
from .errors import ApnlabError, BudgetExhausted, MalformedInput
from .invariants import delta_rank, gamma_rank, mul_invariant, valuation_invariant
from .vecfun import (VectorialFunction, bent_component_census, component_kappas, counting_function,
                     differential_uniformity, is_apn, kappa_sum, linearity, subfunction, vectorial_degree)

log = logging.getLogger("apnlab")

ANALYSES = ("apn", "uniformity", "gamma-rank", "delta-rank", "kappa-census", "kappa-sum", "degree",
            "linearity", "bent", "counting-degrees", "mul-invariant", "valuation", "fingerprint")


def format_number(x) -> str:
    """Integers plainly, other rationals with at most four decimals."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{float(x):.4f}".rstrip("0").rstrip(".")


def _ints(text: str) -> list[int]:
    try:
        return [int(t, 0) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}") from exc


def _labels(text: str) -> list[int]:
    labels = _ints(text)
    if any(not 1 <= v <= 14 for v in labels):
        raise argparse.ArgumentTypeError("representative labels run 1..14")
    return labels


def read_tt(path) -> VectorialFunction:
    """A .tt file: one hex truth table per line, coordinate 1 first."""
    coords = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                coords.append(BooleanFunction.from_hex(line, arity_of(4 * len(line))))
    if not coords:
        raise MalformedInput(f"{path}: no truth tables")
    return VectorialFunction.from_coordinates(coords)


def load_functions(args) -> list[tuple[str, VectorialFunction]]:
    """Functions named by --rep, --code or --input (.c64 or .tt)."""
    if getattr(args, "rep", None):
        return [(str(r), representative(r).function) for r in args.rep]
    if getattr(args, "code", None):
        return [("code", decode(args.code))]
    path = getattr(args, "input", None)
    if path:
        if path.endswith(".tt"):
            return [(os.path.basename(path), read_tt(path))]
        return [(f"{os.path.basename(path)}:{i + 1}", F) for i, F in enumerate(read_c64(path))]
    raise MalformedInput("name a function with --rep, --code or --input")


def _emit(args, rows: list[dict], text_lines: list[str]):
    if args.format == "json":
        print(json.dumps(rows if len(rows) != 1 else rows[0], sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def _census_text(census: dict) -> str:
    return " ".join(f"{format_kappa(k)}:{c}" for k, c in sorted(census.items()))


def _analysis(what: str, F: VectorialFunction, args):
    """(json value, text) for one analysis of F."""
    if what == "apn":
        res = is_apn(F)
        return {"apn": res.apn, "witness": res.witness}, ("true" if res.apn else f"false {list(res.witness)}")
    if what == "uniformity":
        d = differential_uniformity(F)
        return d, str(d)
    if what == "gamma-rank":
        r = gamma_rank(F)
        return r, str(r)
    if what == "delta-rank":
        r = delta_rank(F)
        return r, str(r)
    if what == "kappa-census":
        census = Counter(component_kappas(F))
        return {format_kappa(k): c for k, c in sorted(census.items())}, _census_text(census)
    if what == "kappa-sum":
        s = kappa_sum(F)
        return format_kappa(s), format_kappa(s)
    if what == "degree":
        d = vectorial_degree(F)
        return d, str(d)
    if what == "linearity":
        v = linearity(F)
        return v, str(v)
    if what == "bent":
        comps, spaces = bent_component_census(F)
        return {"components": comps, "subspaces": spaces}, f"{comps} {spaces}"
    if what == "counting-degrees":
        degs = Counter()
        for u in range(1, 1 << F.m):
            degs[degree(counting_function(F, u).f)] += 1
        return {str(k): v for k, v in sorted(degs.items())}, " ".join(f"{k}:{v}" for k, v in sorted(degs.items()))
    if what == "mul-invariant":
        v = mul_invariant(args.p, args.q, F)
        return v, str(v)
    if what == "valuation":
        h = valuation_invariant(F).digest().hex()
        return h, h
    if what == "fingerprint":
        h = pipeline.fingerprint_id(F)
        return h, h
    raise MalformedInput(f"unknown analysis {what!r}")


def cmd_decode(args):
    if os.path.exists(args.code64):
        funcs = read_c64(args.code64)
    else:
        funcs = [decode(args.code64)]
    rows = [{"m": F.m, "n": F.n, "table": [int(v) for v in F.table]} for F in funcs]
    _emit(args, rows, [F.to_text() for F in funcs])


def cmd_analyze(args):
    whats = list(ANALYSES) if args.what == "all" else [args.what]
    rows, lines = [], []
    for name, F in load_functions(args):
        row = {"function": name}
        texts = []
        for w in whats:
            value, text = _analysis(w, F, args)
            row[w] = value
            texts.append(text if len(whats) == 1 else f"{w}={text.replace(' ', ',')}")
        rows.append(row)
        lines.append(" ".join(texts))
    _emit(args, rows, lines)


def cmd_invariants(args):
    rows, lines = [], []
    for name, F in load_functions(args):
        row = {
            "function": name,
            "fingerprint": pipeline.fingerprint_id(F),
            "gamma_rank": gamma_rank(F),
            "delta_rank": delta_rank(F),
            "mul_invariant": mul_invariant(args.p, args.q, F),
            "valuation": valuation_invariant(F).digest().hex(),
        }
        rows.append(row)
        lines.append(" ".join(str(row[k]) for k in
                              ("function", "fingerprint", "gamma_rank", "delta_rank", "mul_invariant", "valuation")))
    _emit(args, rows, lines)


def _subfunctions(args, k: int):
    out = []
    for name, F in load_functions(args):
        if args.basis:
            basis = args.basis
            if len(basis) != F.n - k:
                raise MalformedInput(f"--basis needs {F.n - k} masks for codimension {k}")
            out.append((name, subfunction(F, basis)))
        elif F.n == F.m - k:
            out.append((name, F))
        else:
            raise MalformedInput(f"give --basis with {F.n - k} component masks")
    return out


def cmd_flats(args):
    rows, lines = [], []
    if args.basis:
        targets = [(name, subfunction(F, args.basis)) for name, F in load_functions(args)]
    else:
        targets = _subfunctions(args, args.k)
    for name, G in targets:
        flats = ext.flat_array(G)
        rows.append({"function": name, "count": int(len(flats)), "flats": flats.tolist() if args.list else None})
        lines.append(str(len(flats)))
        if args.list:
            lines += [" ".join(map(str, f)) for f in flats.tolist()]
    _emit(args, rows, lines)


def cmd_extend1(args):
    rows, lines = [], []
    for name, G in _subfunctions(args, 1):
        P = ext.ExtensionProblem.build(G, 1)
        space = ext.solve_one_extension(P)
        classes = ext.extension_classes(P, space)
        row = json.loads(space.to_json())
        row.update(function=name, flats=P.N, classes=[g.to_hex() for g in classes])
        rows.append(row)
        lines.append(f"{name} flats={P.N} consistent={str(space.consistent).lower()} dim={space.dim} "
                     f"classes={len(classes)}")
    _emit(args, rows, lines)


def cmd_extend2(args):
    rows, lines = [], []
    for name, G in _subfunctions(args, 2):
        P = ext.ExtensionProblem.build(G, 2)
        sols = ext.backtrack_two_extension(P, args.budget, threads=args.threads)
        hexes = [ext.solution_hex(g) for g in sols]
        rows.append({"function": name, "flats": P.N, "solutions": hexes})
        lines += hexes
    _emit(args, rows, lines)


def cmd_feasibility(args):
    rows, lines = [], []
    for name, G in _subfunctions(args, 2):
        P = ext.ExtensionProblem.build(G, 2)
        d = ext.delta_feasibility(G)
        g4 = ext.gf4_relaxation(P)
        rows.append({"function": name, "delta": d, "gf4": g4})
        lines.append(f"delta={str(d).lower()} gf4={str(g4).lower()}")
    _emit(args, rows, lines)


def _store(args):
    path = args.store or os.environ.get("APNLAB_STORE")
    return pipeline.ResultStore(path)


def _print_report(args, rep):
    fmt = "csv" if args.format == "csv" else "json"
    sys.stdout.write(pipeline.report(rep, fmt))


def cmd_closure(args):
    labels = args.seed_labels or list(range(1, 15))
    seeds = [representative(lab).function for lab in labels]
    rep = pipeline.one_switch_closure(seeds, args.rounds, labels=labels, store=_store(args), threads=args.threads)
    _print_report(args, rep)


def cmd_bent_ext(args):
    F = representative(args.rep).function
    spaces = pipeline.bent_subspaces(F)
    if args.basis:
        basis = tuple(args.basis)
    elif spaces:
        basis = spaces[0]
    else:
        raise MalformedInput(f"representative {args.rep} has no all-bent 3-dim component space")
    B = subfunction(F, basis)
    pool = None
    if args.seed_labels:
        pool = [p for p in pipeline.default_coordinate_pool() if int(p[0].split(".")[0]) in args.seed_labels]
    rep = pipeline.bent_extension_sweep(B, args.budget, pool=pool, label=f"{args.rep}:{pipeline._mask_tag(basis)}",
                                        threads=args.threads, store=_store(args))
    _print_report(args, rep)


def cmd_codim2(args):
    F = representative(args.rep).function
    rep = pipeline.codim2_sweep(F, not args.no_filter, args.budget, label=str(args.rep),
                                threads=args.threads, store=_store(args))
    _print_report(args, rep)


def cmd_pairs(args):
    pairs = ext.two_level_admissible(args.kappa, 1 << args.m)
    rows = [{"alpha": format_number(a), "beta": format_number(b), "A": A, "B": B} for a, b, A, B in pairs]
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        for a, b, A, B in pairs:
            print(f"{format_number(a)} {format_number(b)} {A} {B}")


def cmd_report(args):
    store = _store(args)
    if store.path is None:
        raise MalformedInput("report needs --store or APNLAB_STORE")
    sys.stdout.write(pipeline.report(store, args.format if args.format in ("json", "csv") else "json"))


def _kappas(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--threads", type=int, default=1, help="worker threads for searches and sweeps")
    common.add_argument("--budget", type=int, default=pipeline.DEFAULT_BUDGET, help="search node budget")
    common.add_argument("--store", help="result store path (default $APNLAB_STORE)")
    common.add_argument("--seed-labels", type=_labels, help="representative labels, e.g. 1,2,14")
    common.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")

    def source(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--rep", type=_labels, help="embedded representative label(s) 1..14")
        g.add_argument("--code", help="a Code-64 string")
        g.add_argument("--input", help="a .c64 or .tt file")

    parser = argparse.ArgumentParser(prog="apnlab", description="Analysis of 6-bit APN functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", parents=[common], help="print the table of a Code-64 string or .c64 file")
    p.add_argument("code64")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analyze", parents=[common], help="one spectral or differential quantity")
    source(p)
    p.add_argument("--what", choices=(*ANALYSES, "all"), default="all")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("invariants", parents=[common], help="fingerprint and graph invariants")
    source(p)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=0)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("flats", parents=[common], help="zero-sum 2-flats of a subfunction")
    source(p)
    p.add_argument("--basis", type=_ints, help="component masks spanning the subfunction")
    p.add_argument("--k", type=int, default=1, choices=(1, 2), help="codimension when --basis is absent")
    p.add_argument("--list", action="store_true", help="print the flats themselves")
    p.set_defaults(func=cmd_flats)

    for name, fn, helptext in (("extend1", cmd_extend1, "codimension-1 extensions by linear solving"),
                               ("extend2", cmd_extend2, "codimension-2 extensions by backtracking"),
                               ("feasibility", cmd_feasibility, "Delta and GF(4) extension tests")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        source(p)
        p.add_argument("--basis", type=_ints, help="component masks spanning the subfunction")
        p.set_defaults(func=fn)

    p = sub.add_parser("closure", parents=[common], help="1-switch closure of embedded representatives")
    p.add_argument("--rounds", type=int, default=pipeline.DEFAULT_ROUNDS)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("codim2", parents=[common], help="codimension-2 sweep of one representative")
    p.add_argument("--rep", type=int, required=True, choices=range(1, 15), metavar="LABEL")
    p.add_argument("--no-filter", action="store_true")
    p.set_defaults(func=cmd_codim2)

    p = sub.add_parser("bent-ext", parents=[common], help="APN extensions of an all-bent (6,3) subfunction")
    p.add_argument("--rep", type=int, required=True, choices=range(1, 15), metavar="LABEL")
    p.add_argument("--basis", type=_ints, help="3 masks of an all-bent component space")
    p.epilog = "--seed-labels restricts the candidate 4th coordinates to components of those representatives"
    p.set_defaults(func=cmd_bent_ext)

    p = sub.add_parser("pairs", parents=[common], help="admissible two-level kappa types")
    p.add_argument("--kappa", type=_kappas, required=True)
    p.add_argument("--m", type=int, default=6)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("report", parents=[common], help="summary document of a result store")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except BudgetExhausted as exc:
        print(f"apnlab: {exc} ({exc.nodes} nodes, {len(exc.partial)} partial results)", file=sys.stderr)
        return 1
    except ApnlabError as exc:
        print(f"apnlab: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"apnlab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
