//! `verify`: run one scenario document end to end.

use std::sync::Arc;

use deltabound::{Kernel, Sampling};

use crate::error::HarnessError;
use crate::expr::{Env, Expr, Var};
use crate::problem::{Field3, Problem};
use crate::report::BoundReport;
use crate::scenario::{Bindings, Scenario, Task};

/// `K(x, y, s, t, u)` given as an expression; `s` and `t` stand for the inner
/// integration variables.
pub struct ExprKernel {
    expr: Expr,
    inner_only: bool,
}

impl ExprKernel {
    pub fn new(expr: Expr) -> Self {
        let inner_only = !expr.uses(Var::X) && !expr.uses(Var::Y);
        Self { expr, inner_only }
    }
}

impl Kernel for ExprKernel {
    fn eval(&self, x: f64, y: f64, eta: f64, tau: f64, u: f64) -> f64 {
        let env = Env::xy(x, y)
            .with(Var::S, eta)
            .with(Var::T, tau)
            .with(Var::U, u);
        self.expr.eval(&env).unwrap_or(f64::NAN)
    }

    fn ignores_outer(&self) -> bool {
        self.inner_only
    }
}

fn field3(expr: &Expr, third: Var) -> Field3 {
    let expr = expr.clone();
    Arc::new(move |x, y, w| expr.eval(&Env::xy(x, y).with(third, w)).unwrap_or(f64::NAN))
}

fn build_problem(sc: &Scenario, b: &Bindings) -> Result<Problem, HarnessError> {
    let grid = sc.grid()?;
    let gf = |name: &str| b.grid_function(name, &grid);
    let expr = |name: &str| b.expr(name).expect("compiled binding");
    Ok(match sc.task {
        Task::Constant => Problem::Constant {
            k: b.constant("k")?,
            p: gf("p")?,
        },
        Task::Monotone => Problem::Monotone {
            q: gf("q")?,
            p: gf("p")?,
        },
        Task::Nonlinear => Problem::Nonlinear {
            g: gf("g")?,
            h: gf("h")?,
            l: field3(expr("L"), Var::U),
            hh: field3(expr("H"), Var::V),
        },
        Task::Linear => Problem::Linear {
            g: gf("g")?,
            h: gf("h")?,
            p: gf("p")?,
        },
        Task::APriori => Problem::APriori {
            g: gf("g")?,
            kernel: Arc::new(ExprKernel::new(expr("K").clone())),
            q: gf("q")?,
            r: gf("r")?,
            envelope: match b.expr("envelope") {
                Some(_) => Some(gf("envelope")?),
                None => None,
            },
            lipschitz: None,
        },
        Task::Difference => Problem::Difference {
            g: gf("g")?,
            kernel: Arc::new(ExprKernel::new(expr("K").clone())),
            q: gf("q")?,
            r: gf("r")?,
            phi: gf("phi")?,
            delta: b.constant("delta")?,
            lipschitz: None,
        },
    })
}

/// Builds the grid and functions of `sc`, evaluates the designated estimate
/// and compares it with the actual values at every grid point.
pub fn run_verify(sc: &Scenario) -> Result<BoundReport, HarnessError> {
    let bindings = sc.compile()?;
    let t = &sc.tolerances;
    if !(t.relative >= 0.0) {
        return Err(HarnessError::Config(format!(
            "relative tolerance must be nonnegative, got {}",
            t.relative
        )));
    }
    let problem = build_problem(sc, &bindings)?;
    let sampling = Sampling {
        lo: t.u_range[0],
        hi: t.u_range[1],
        samples: t.samples,
        seed: sc.seed,
    };
    let outcome = problem.run(&sampling)?;
    Ok(outcome.into_report(sc.digest(), sc.task, t.relative))
}
