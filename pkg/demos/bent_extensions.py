"""APN extensions of (6,3) functions whose seven components are all bent.

    python demos/bent_extensions.py
"""

from apnlab.codec import representative
from apnlab.pipeline import bent_extension_sweep, bent_subspaces, default_coordinate_pool, fingerprint_id
from apnlab.vecfun import VectorialFunction, gf_mul, subfunction


def main():
    F = representative(2).function
    spaces = bent_subspaces(F)
    print(f"representative 2 has {len(spaces)} all-bent 3-dim component spaces; using {spaces[0]}")
    B = subfunction(F, spaces[0])
    pool = [(t, f) for t, f in default_coordinate_pool() if t.startswith("2.")]
    rep = bent_extension_sweep(B, pool=pool, label="2")
    print(f"{rep.subfunctions_examined} candidate fourth coordinates, {rep.apn_found} APN extensions, "
          f"{len(rep.fingerprint_ids)} fingerprint classes, parent among them: "
          f"{fingerprint_id(F) in rep.fingerprint_ids}")

    # x * pi(y) over GF(8) is bent for any permutation pi; this one admits no APN extension from the pool
    perm = [5, 0, 1, 4, 2, 6, 3, 7]
    M = VectorialFunction(6, 3, [gf_mul(v & 7, perm[v >> 3], 0b1011) for v in range(64)])
    rep = bent_extension_sweep(M, label="mm")
    print(f"Maiorana-McFarland triple: {rep.subfunctions_examined} candidates, {rep.apn_found} extensions")


if __name__ == "__main__":
    main()
