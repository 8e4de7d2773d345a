"""Codimension-2 extension of one (6,4) subfunction, step by step.

    python demos/codim2_search.py
"""

import time

from apnlab.codec import representative
from apnlab.extsearch import (ExtensionProblem, Gf4System, backtrack_two_extension, delta_feasibility, extend,
                              normalize_pivots, output_orbit, solution_hex)
from apnlab.pipeline import fingerprint_id
from apnlab.vecfun import congruent, differential_uniformity, is_apn, subfunction


def main():
    F = representative(1).function
    G = subfunction(F, [1, 2, 4, 8])
    P = ExtensionProblem.build(G)
    print(f"G = first four coordinates of representative 1: {P.N} zero-sum flats")
    print(f"uniformity {differential_uniformity(G)} <= 8: {delta_feasibility(G)}")
    S = Gf4System.from_problem(P)
    print(f"GF(4) system: {len(S.equations)} equations in {S.nunknowns} unknowns, consistent: {S.consistent()}")
    piv = normalize_pivots(P)
    print(f"{len(piv.pivots)} pivots {piv.pivots}, {len(piv.free)} free points")
    for symmetry in (True, False):
        t0 = time.perf_counter()
        sols = backtrack_two_extension(P, symmetry=symmetry)
        print(f"search with value symmetry {'on ' if symmetry else 'off'}: {len(sols)} solutions "
              f"in {time.perf_counter() - t0:.2f}s")
    pruned = backtrack_two_extension(P)
    closure = set().union(*(output_orbit(g) for g in pruned))
    print(f"orbits of the pruned output: {len(closure)} functions")
    for g in pruned:
        H = extend(G, g)
        print(f"  g = {solution_hex(g)}  apn={bool(is_apn(H))}  congruent to parent={congruent(H, F)}"
              f"  fingerprint {fingerprint_id(H)}")


if __name__ == "__main__":
    main()
