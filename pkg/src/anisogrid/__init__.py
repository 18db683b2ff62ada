"""Anisotropic sparse grid quadrature with Gauss-Legendre rules."""

from ._errors import (
    EllipticityError,
    IntegrandEvaluationError,
    InvalidArgumentError,
    LevelOverflowError,
    NotPositiveSemidefiniteError,
    NumericalGuardError,
)
from .gauss1d import RuleFamily, UnivariateRule, build_family, gauss_legendre_rule, level_to_count, new_point_count
from .indexset import (
    WeightedIndexSet,
    WeightVector,
    bound_bd,
    bound_floor_variant,
    bound_loglog,
    bound_sg,
    bound_tp,
    cardinality_X,
    check_go_tail,
    combination_coefficient,
    combination_coefficients,
    cost_bound_sq,
    cost_exact,
    enumerate_X,
    enumerate_Y,
    go_constant,
    in_X,
    in_Y,
    max_box_volume,
    max_level,
    weighted_level,
)
from .qmc import HaltonStream, first_primes, halton_point, halton_points, qmc_estimates, qmc_integrate, radical_inverse
from .sparse_quad import (
    Integrand,
    SparseQuadrature,
    apply,
    apply_direct_delta,
    build_combination_quadrature,
    compensated_sum,
    count_distinct_points,
    dump_grid,
    exactness_certificate,
)

__version__ = "0.1.0"
