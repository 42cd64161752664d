"""Core package exports for the boundary blow-up k-Hessian laboratory."""
from .hessian_radial import (
    EigenProfile,
    ProblemSpec,
    is_k_admissible,
    maclaurin_gap,
    radial_eigenvalues,
    sigma_k,
    sigma_k_radial,
)
from .nonlinearity import (
    Constant,
    ExpMinusOne,
    KOClass,
    KOReport,
    Nonlinearity,
    PowerLaw,
    Tabulated,
    eval_G,
    eval_g,
    ko_classify,
    ko_integral,
    nonlinearity_from_json,
    sharpened_ko_scan,
)
from .ode_ivp import (
    BlowupEstimate,
    RadialTrajectory,
    StepControls,
    blowup_radius,
    energy_identity_residual,
    integrate_ivp,
    ivp_rhs,
    series_start,
)
from .estimates import (
    EstimateReport,
    check_growth_bound,
    check_lower_bound,
    check_remaining_radius_bound,
    necessity_limit_check,
    run_estimate_suite,
)
from .dirichlet import (
    DirichletSolution,
    comparison_check,
    explicit_subsolution,
    large_solution_sequence,
    ordered_in_n,
    laplace_supersolution,
    solve_monotone,
    solve_shooting,
)

__all__ = [
    "EigenProfile",
    "ProblemSpec",
    "is_k_admissible",
    "maclaurin_gap",
    "radial_eigenvalues",
    "sigma_k",
    "sigma_k_radial",
    "Constant",
    "ExpMinusOne",
    "KOClass",
    "KOReport",
    "Nonlinearity",
    "PowerLaw",
    "Tabulated",
    "eval_G",
    "eval_g",
    "ko_classify",
    "ko_integral",
    "nonlinearity_from_json",
    "sharpened_ko_scan",
    "BlowupEstimate",
    "RadialTrajectory",
    "StepControls",
    "blowup_radius",
    "energy_identity_residual",
    "integrate_ivp",
    "ivp_rhs",
    "series_start",
    "EstimateReport",
    "check_growth_bound",
    "check_lower_bound",
    "check_remaining_radius_bound",
    "necessity_limit_check",
    "run_estimate_suite",
    "DirichletSolution",
    "comparison_check",
    "explicit_subsolution",
    "large_solution_sequence",
    "ordered_in_n",
    "laplace_supersolution",
    "solve_monotone",
    "solve_shooting",
]
