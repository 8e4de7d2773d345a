"""Two-level fourth-moment profiles: which (alpha, beta) pairs can an APN (6,6)-function have?

    python demos/spectral_levels.py
"""

from fractions import Fraction

from apnlab.bfcore import format_kappa
from apnlab.codec import known_representatives
from apnlab.extsearch import two_level_admissible
from apnlab.vecfun import KNOWN_APN_COMPONENT_KAPPAS, spectral_profile


def main():
    print("admissible (alpha, beta, A, B) over the kappa values of known APN components:")
    for a, b, A, B in two_level_admissible(KNOWN_APN_COMPONENT_KAPPAS, 64):
        print(f"  {format_kappa(a)} x{A:<3d} {format_kappa(b)} x{B}")
    print("representatives with two levels:")
    for r in known_representatives():
        prof = spectral_profile(r.function)
        if prof.levels == 2:
            a, b, A, B = prof.two_level_type
            print(f"  label {r.label}: {format_kappa(a)} x{A}, {format_kappa(b)} x{B}")
    assert two_level_admissible({Fraction(1), Fraction(3)}, 64) == []


if __name__ == "__main__":
    main()
