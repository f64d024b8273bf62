"""Exact variational calculus on finite time scales.

The package evaluates and minimizes product objectives built from one
forward-difference (delta) and one backward-difference (nabla) integral
functional on a strictly increasing finite point set, and verifies the
difference-calculus identities and Euler-Lagrange conditions that govern
them.  On isolated points all of this calculus is exact, so the bundled
checks run at rounding tolerance.
"""

from .calculus import (
    GridFunction,
    PartialGridFunction,
    c1_diamond_norm,
    check_derivative_relation,
    check_integral_conversion,
    check_integral_splitting,
    check_parts_formulas,
    compose_rho,
    compose_sigma,
    delta_derivative,
    delta_integral,
    nabla_derivative,
    nabla_integral,
)
from .lagrangian import (
    EvalDomainError,
    Lagrangian,
    ParseError,
    catalog,
    parse_lagrangian,
    register_catalog,
)
from .solver import (
    PerturbationAudit,
    SolveResult,
    SolverConfig,
    StepUnderflowError,
    brute_force_oracle,
    chord,
    perturbation_audit,
    solve,
)
from .timescale import (
    KappaKind,
    KappaSet,
    TimeScale,
    TimeScaleError,
    kappa_set,
    make_timescale,
    mu,
    nu,
    rho,
    sigma,
    uniform_scale,
)
from .variational import (
    ELReport,
    VariationalProblem,
    classic_el_residuals,
    el_residual_1,
    el_residual_2,
    el_residual_cor1,
    el_residual_cor2,
    first_variation_gradient,
    j_delta,
    j_nabla,
    j_product,
)

__version__ = "0.1.0"

__all__ = [
    "ELReport",
    "EvalDomainError",
    "GridFunction",
    "KappaKind",
    "KappaSet",
    "Lagrangian",
    "ParseError",
    "PartialGridFunction",
    "PerturbationAudit",
    "SolveResult",
    "SolverConfig",
    "StepUnderflowError",
    "TimeScale",
    "TimeScaleError",
    "VariationalProblem",
    "brute_force_oracle",
    "c1_diamond_norm",
    "catalog",
    "check_derivative_relation",
    "check_integral_conversion",
    "check_integral_splitting",
    "check_parts_formulas",
    "chord",
    "classic_el_residuals",
    "compose_rho",
    "compose_sigma",
    "delta_derivative",
    "delta_integral",
    "el_residual_1",
    "el_residual_2",
    "el_residual_cor1",
    "el_residual_cor2",
    "first_variation_gradient",
    "j_delta",
    "j_nabla",
    "j_product",
    "kappa_set",
    "make_timescale",
    "mu",
    "nabla_derivative",
    "nabla_integral",
    "nu",
    "parse_lagrangian",
    "perturbation_audit",
    "register_catalog",
    "rho",
    "sigma",
    "solve",
    "uniform_scale",
]
