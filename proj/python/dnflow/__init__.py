"""Doubly nonlinear flow solver.

Evolves d/dt(|v|^{p-2} v) = Delta_p v by an implicit scheme and reads off the
optimal Poincare constant lambda_p, its dual counterpart mu_p = lambda_p^{1/(p-1)}
and the extremal profile from the large-time behaviour.
"""

from ._dnflow import (
    BoundaryRegime,
    CheckResult,
    CompatibilityError,
    DegenerateInput,
    Domain,
    EigenResult,
    EmptyDomain,
    EnergyOperator,
    Error,
    FlowTrajectory,
    InvalidParameter,
    InvalidResolution,
    LimitResult,
    NonConvergence,
    ParseError,
    RangeError,
    ShapeError,
    UnsupportedRegime,
    dense_linear_reference,
    dual_quotient,
    evolve,
    implicit_step,
    integrate_power,
    inverse_operator,
    lp_norm,
    minimize_rayleigh,
    mu_lambda_consistency,
    parse_config,
    rayleigh_quotient,
    run_to_limit,
    trace_lp,
    verify,
    zero_pmean_shift,
)

__version__ = "0.1.0"
