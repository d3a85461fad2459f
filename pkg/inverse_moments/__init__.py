from .errors import InverseMomentsError, DomainError, PreconditionError, RangeError, CalibrationError
from .exact_oracle import DistributionSpec, DistributionKind, OracleValue
from .exact_oracle import binomial_pdf, exact_inverse_moment, central_moment_binomial, factorial_cumulants_from_pdf
from .exact_oracle import poisson_inverse_moment_direct, shifted_poisson_moment_direct, poisson_tail_index
from .special_numbers import StirlingTable, stirling_first, stirling_noncentral, alpha, alpha_table, harmonic
from .special_numbers import binomial_coefficient
from .poisson_moments import CrossoverProfile, ShiftedMomentTable, MuGrid, default_profile
from .poisson_moments import er_function, positive_poisson_inverse_moment, shifted_inverse_moment
from .poisson_moments import build_q_table, forward_difference_at_zero, y_sequence, calibrate_crossover
from .charlier_expansion import Flavor, ExpansionPolynomial, CumulantSequence
from .charlier_expansion import barbour_polynomial, taylor_polynomial, binomial_barbour_polynomial
from .charlier_expansion import binomial_factorial_cumulant, expand_pdf, inverse_moment_estimate
from .charlier_expansion import first_inverse_moment_binomial, barbour_error_bound
from .charlier_expansion import inverse_moment, binomial_inverse_moment, charlier_estimates
from .competing import Method, CompetitorResult, stephan, stephan_exact, rempala, znidaric
