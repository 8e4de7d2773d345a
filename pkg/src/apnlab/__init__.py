"""Workbench for 6-bit vectorial Boolean functions and APN extension search."""

from .bfcore import (Anf, BooleanFunction, WalshSpectrum, autocorrelation, degree, fwht, is_bent, kappa, mobius,
                     restrict, spectral_summary, walsh)
from .codec import decode, encode, known_representatives, representative
from .errors import (ApnlabError, BudgetExhausted, CapacityError, DomainError, MalformedInput, NormalizationError,
                     ParseError, PreconditionError, RankError)
from .extsearch import (ExtensionProblem, Flat, Gf4System, SolutionSpace, backtrack_two_extension, delta_feasibility,
                        echelon_subspaces, enumerate_flats, gaussian_binomial, gf4_relaxation, normalize_pivots,
                        solve_one_extension, two_level_admissible)
from .invariants import (Fingerprint, InternTable, apn_fingerprint, delta_rank, fingerprint, gamma_rank,
                         mul_invariant, valuation_invariant)
from .pipeline import ClosureReport, ResultStore, bent_extension_sweep, codim2_sweep, one_switch_closure, report
from .vecfun import (VectorialFunction, congruent, counting_function, ddt, differential_uniformity, graph_indicator,
                     is_apn, kappa_sum, spectral_profile, subfunction)

__version__ = "0.1.0"
