"""Fractional and logarithmic Laplacians on intervals, with least-energy solvers
for the small-order limit of fractional semilinear problems."""

from .energies import (
    EnergyBreakdown,
    ProblemSpec,
    energy_log,
    energy_s,
    exponent,
    grad_energy_log,
    grad_energy_s,
    kappa_map,
    log_sobolev_gap,
    project_nehari_0,
    project_nehari_s,
)
from .exceptions import (
    ConfigError,
    DegenerateProjectionError,
    DomainError,
    FourierTruncationWarning,
    GridMismatchError,
    KindMismatchError,
    LoglabError,
    ZeroInputError,
)
from .grid import Grid1D, GridFunction, build_grid, bump, inner_l2, lp_norm
from .nonlocal_ops import (
    NonlocalOperator,
    apply,
    assemble_fraclap,
    assemble_loglap,
    far_bilinear,
    fourier_form,
    quad_form,
)
from .solvers import (
    SolveReport,
    SolverOptions,
    first_eigen_laplace,
    first_eigen_loglap,
    minimality_probe,
    mountain_pass_check,
    solve_least_energy_log,
    solve_least_energy_s,
)
from .specialfn import (
    EULER_GAMMA,
    const_cNs,
    const_kappa,
    digamma,
    dimensional_constants,
    gamma_fn,
    kappa_small_s_limit,
)

__version__ = "0.1.0"
