"""Decode the 14 embedded APN classes and tabulate their invariants.

    python demos/known_classes.py
"""

from collections import Counter

from apnlab.bfcore import format_kappa
from apnlab.codec import known_representatives
from apnlab.invariants import delta_rank, gamma_rank, mul_invariant
from apnlab.pipeline import fingerprint_id
from apnlab.vecfun import bent_component_census, component_kappas, is_apn, kappa_sum, vectorial_degree


def main():
    print("label  apn  deg  gamma  delta  mul  bent  3-spaces  kappa census")
    for r in known_representatives():
        F = r.function
        assert is_apn(F) and kappa_sum(F) == 126
        census = Counter(component_kappas(F))
        text = " ".join(f"{format_kappa(k)}x{c}" for k, c in sorted(census.items()))
        nbent, spaces = bent_component_census(F)
        print(f"{r.label:5d}  {'yes' if is_apn(F) else 'no':3s}  {vectorial_degree(F):3d}  {gamma_rank(F):5d}"
              f"  {delta_rank(F):5d}  {mul_invariant(2, 0, F):3d}  {nbent:4d}  {spaces:8d}  {text}")
    ids = {fingerprint_id(r.function) for r in known_representatives()}
    print(f"{len(ids)} distinct fingerprints")


if __name__ == "__main__":
    main()
