//! Scenario-driven verification of the `deltabound` estimates: an expression
//! language for data, single-scenario checks, randomized fuzzing and refinement
//! studies.

// NaN-rejecting comparisons are written as negations on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod converge;
pub mod error;
pub mod expr;
pub mod fuzz;
pub mod problem;
pub mod report;
pub mod scenario;
pub mod verify;

pub use converge::{run_converge, ConvergeTable, ConvergeTask};
pub use error::HarnessError;
pub use expr::{parse_expr, Env, EvalError, Expr, ParseError, ParseErrorKind, Var};
pub use fuzz::{run_fuzz, Family, FuzzConfig, FuzzSummary};
pub use report::BoundReport;
pub use scenario::{AxisSpec, Scenario, Task, Tolerances};
pub use verify::run_verify;
