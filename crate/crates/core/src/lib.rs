//! Delta calculus on finite two-variable time scales.
//!
//! A finite time scale is a strictly increasing list of points; every point but
//! the last is isolated, so delta derivatives, delta integrals and the
//! time-scale exponential are exact finite expressions. On top of that substrate
//! the crate evaluates explicit Gronwall-type estimates for triple-integral
//! inequalities ([`bounds`]) and solves the associated Volterra-type dynamic
//! integral equation ([`integral_eq`]).
//!
//! Per-point work that has no ordering constraint runs on rayon when the
//! `parallel` feature is enabled (the default); see [`exec`].

// NaN-rejecting comparisons are written as negations on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod calculus;
pub mod error;
pub mod exec;
pub mod integral_eq;
pub mod timescale;

pub use bounds::{
    check_lipschitz_pair, check_nondecreasing, constant_bound, linear_bound, monotone_bound,
    nonlinear_bound, nonlinear_bound_sampled, BoundResult, HypothesisCheck, LipschitzPair,
    Sampling,
};
pub use calculus::{
    cumulative_double, cumulative_triple, delta_derivative_1, delta_derivative_2,
    delta_integral_1d, ts_exp_axis1,
};
pub use error::{Error, Result};
pub use exec::Strategy;
pub use integral_eq::{
    a_priori_bound, check_envelope, check_kernel_lipschitz, difference_bound, picard_iterate,
    picard_iterate_with, residual_eps, residual_eps_with, solve_exact, solve_exact_ordered,
    zero_section, ApproxSolution, InnerKernel, Kernel, SweepOrder,
};
pub use timescale::{Grid2, GridFunction, TimeScale};
