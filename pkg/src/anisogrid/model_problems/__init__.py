from .analytic import AnalyticProblem, analytic_integrand
from .analyticity import (
    AnalyticityProfile,
    algebraic_profile,
    profile_from_gammas,
    profile_theoretical,
    zeta_constant,
)
from .diffusion import (
    DiffusionConfig,
    DiffusionModel,
    build_diffusion_model,
    moment_integrand,
    moments_integrand,
    split_moments,
)
from .fem import h1_relative_error, h1_seminorm, piecewise_constant_solution, solve_diffusion_1d
from .kl import (
    KLExpansion,
    MaternKernel,
    PivotedCholesky,
    eig_from_factor,
    kl_expansion,
    lumped_mass,
    matern_covariance,
    pivoted_cholesky,
)
