"""Ground states of the zero-mass Schrodinger-Bopp-Podolsky system.

Radial profiles on truncated domains, exact screened-Coulomb reductions,
the full set of variational functionals and identities, a Nehari-Pohozaev
manifold solver with its Schrodinger-Poisson (a = 0) limit, and the
orchestrated studies (asymptotic sweep, nonexistence scans, identity
audits).
"""

from .radial import (
    ModelParams,
    RadialField,
    RadialGrid,
    build_grid,
    dirichlet_energy,
    field_from_csv,
    field_to_csv,
    lp_norm,
    radial_gradient,
    radial_integral,
    radial_laplacian,
    rescale_field,
)
from .potentials import (
    KernelKind,
    PairEnergyReport,
    anorm_identity_residual,
    kernel_K,
    oracle_pair,
    pair_energy,
    pair_energy_bilinear,
    pair_report,
    potential,
)
from .functionals import (
    FiberMap,
    FunctionalBreakdown,
    NonexistenceCombos,
    el_residual,
    evaluate,
    evaluate_sp,
    exp_inequality_lhs,
    fiber_derivative,
    fiber_value,
    kernel_exp_gap,
    nonexistence_combos,
    scalar_g,
    splitting_gap,
)
from .solver import (
    FiberingResult,
    ProjectionError,
    SolveReport,
    SolverConfig,
    project_to_manifold,
    solve_ground_state,
    solve_sp_ground_state,
    upper_bound_check,
)
from .studies import (
    ScanReport,
    SweepReport,
    identity_audit,
    nonexistence_scan,
    random_profile,
    sweep_a,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "RadialField",
    "RadialGrid",
    "build_grid",
    "dirichlet_energy",
    "field_from_csv",
    "field_to_csv",
    "lp_norm",
    "radial_gradient",
    "radial_integral",
    "radial_laplacian",
    "rescale_field",
    "KernelKind",
    "PairEnergyReport",
    "anorm_identity_residual",
    "kernel_K",
    "oracle_pair",
    "pair_energy",
    "pair_energy_bilinear",
    "pair_report",
    "potential",
    "FiberMap",
    "FunctionalBreakdown",
    "NonexistenceCombos",
    "el_residual",
    "evaluate",
    "evaluate_sp",
    "exp_inequality_lhs",
    "fiber_derivative",
    "fiber_value",
    "kernel_exp_gap",
    "nonexistence_combos",
    "scalar_g",
    "splitting_gap",
    "FiberingResult",
    "ProjectionError",
    "SolveReport",
    "SolverConfig",
    "project_to_manifold",
    "solve_ground_state",
    "solve_sp_ground_state",
    "upper_bound_check",
    "ScanReport",
    "SweepReport",
    "identity_audit",
    "nonexistence_scan",
    "random_profile",
    "sweep_a",
]
