"""1-switching from one known class: drop a coordinate, solve for all replacements.

For each of the 63 hyperplanes of the component space of a representative,
the (6,5) subfunction G has an affine space of replacements g making (G, g)
APN.  Its dimension is at least 12; anything above 12 gives extensions that
are not congruent to the parent.

    python demos/switching.py [label]
"""

import sys
from collections import Counter

from apnlab.codec import representative
from apnlab.extsearch import ExtensionProblem, extend, extension_classes, solve_one_extension
from apnlab.pipeline import fingerprint_id
from apnlab.subspaces import echelon_subspaces
from apnlab.vecfun import congruent, is_apn, subfunction


def main(label=1):
    F = representative(label).function
    dims, found = Counter(), {}
    for basis in echelon_subspaces(6, 5):
        G = subfunction(F, basis)
        P = ExtensionProblem.build(G, 1)
        space = solve_one_extension(P)
        dims[space.dim] += 1
        for g in extension_classes(P, space):
            H = extend(G, g)
            assert is_apn(H)
            if not congruent(H, F):
                found.setdefault(fingerprint_id(H), basis)
    print(f"label {label}: {P.N} flats per subfunction, solution dimensions {dict(sorted(dims.items()))}")
    print(f"{len(found)} fingerprint classes reached by one switch:")
    for fid, basis in sorted(found.items()):
        print(f"  {fid}  via hyperplane spanned by {basis}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 1)
