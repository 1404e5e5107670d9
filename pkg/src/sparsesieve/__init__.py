"""sparsesieve: exact desk-scale computations around large sieve inequalities
for sparse moduli sequences.

Subpackages by topic:
  moduli   -- power / polynomial / floor(j^alpha) sequences and dyadic windows
  energy   -- exact symmetric and shifted additive energies
  boxes    -- congruence box counts and Farey spacing statistics
  sieve    -- the large sieve quadratic forms and the optimal-constant estimator
  bounds   -- exponent calculus over the bound catalog, crossovers, Phi(alpha)
  expsums  -- Weyl sums, phase sums over floor(j^alpha), window cardinalities
  primes   -- segmented prime table with von Mangoldt support
  bv       -- prime-counting error terms over the windows, divisor searches
"""

from .bounds import (comparison_exponents, composition_identity_check, crossover,
                     delta_exponent, kappa, level_of_distribution, omega, winner_map)
from .boxes import (count_box_solutions, count_poly_box, farey_set, spacing_count,
                    spacing_energy_audit, torus_distance)
from .bv import (BVReport, error_term, mangoldt_sum, ps_largest_divisor,
                 shifted_prime_search, window_error_sum, worst_residue)
from .energy import (EnergyReport, additive_energy, energy_fast, energy_oracle,
                     max_shifted_energy, representation_counts, shifted_energy)
from .errors import CapacityError, PrecisionError, SparseSieveError, ValidationError
from .expsums import (cardinality_audit, erdos_turan_count, power_phase_sum,
                      ps_divisible_count, weyl_bound_rhs, weyl_sum)
from .moduli import (DyadicWindow, ModuliSequence, explicit_sequence, generate_piatetski_shapiro,
                     generate_polynomial, generate_power, growth_exponent, is_convex, window)
from .primes import PrimeTable
from .sieve import (CoefficientVector, SieveResult, estimate_sieve_constant,
                    sieve_bound_audit, sieve_form_fast, sieve_form_naive)

__version__ = "0.1.0"
