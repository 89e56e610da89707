//! Concrete instances of the six estimates: data on a grid, the exact (or
//! perturbed) solution of the underlying equation and the bound.

use std::sync::Arc;

use deltabound::{
    a_priori_bound, check_envelope, check_kernel_lipschitz, constant_bound, difference_bound,
    linear_bound, monotone_bound, nonlinear_bound_sampled, residual_eps, solve_exact, zero_section,
    BoundResult, Grid2, GridFunction, HypothesisCheck, InnerKernel, Kernel, LipschitzPair,
    Sampling,
};

use crate::report::BoundReport;
use crate::scenario::Task;

/// A scalar field `f(x, y, u)`.
pub type Field3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// A shareable integral-equation kernel.
pub type SharedKernel = Arc<dyn Kernel + Send>;

#[derive(Clone)]
pub enum Problem {
    Constant {
        k: f64,
        p: GridFunction,
    },
    Monotone {
        q: GridFunction,
        p: GridFunction,
    },
    Nonlinear {
        g: GridFunction,
        h: GridFunction,
        l: Field3,
        hh: Field3,
    },
    Linear {
        g: GridFunction,
        h: GridFunction,
        p: GridFunction,
    },
    APriori {
        g: GridFunction,
        kernel: SharedKernel,
        q: GridFunction,
        r: GridFunction,
        /// Defaults to `|g + int int int K(., ., eta, tau, 0)|`.
        envelope: Option<GridFunction>,
        /// A kernel Lipschitz check already run for this `(K, q, r)`.
        lipschitz: Option<HypothesisCheck>,
    },
    Difference {
        g: GridFunction,
        kernel: SharedKernel,
        q: GridFunction,
        r: GridFunction,
        /// Shape of the perturbation added to the exact solution.
        phi: GridFunction,
        delta: f64,
        lipschitz: Option<HypothesisCheck>,
    },
}

/// Actual values next to a bound, or a refusal.
pub struct Outcome {
    pub hypotheses: Vec<HypothesisCheck>,
    pub notes: Vec<String>,
    /// `(actual, bound)` when every hypothesis passed.
    pub comparison: Option<(GridFunction, GridFunction)>,
}

impl Outcome {
    fn from_result(
        result: BoundResult,
        extra: Vec<HypothesisCheck>,
        actual: impl FnOnce() -> deltabound::Result<GridFunction>,
    ) -> deltabound::Result<Self> {
        let mut hypotheses = result.hypotheses.clone();
        hypotheses.extend(extra);
        let notes = result.notes.clone();
        let comparison = match result.into_bound() {
            Some(bound) if hypotheses.iter().all(|h| h.passed) => Some((actual()?, bound)),
            _ => None,
        };
        Ok(Self {
            hypotheses,
            notes,
            comparison,
        })
    }

    pub fn into_report(self, digest: String, task: Task, tol: f64) -> BoundReport {
        BoundReport::new(
            digest,
            task,
            tol,
            self.hypotheses,
            self.notes,
            self.comparison,
        )
    }
}

fn lookup(f: &GridFunction, x: f64, y: f64) -> f64 {
    f.at(x, y).unwrap_or(f64::NAN)
}

fn lipschitz_check(
    cached: &Option<HypothesisCheck>,
    kernel: &SharedKernel,
    q: &GridFunction,
    r: &GridFunction,
    sampling: &Sampling,
) -> deltabound::Result<HypothesisCheck> {
    match cached {
        Some(check) => Ok(check.clone()),
        None => check_kernel_lipschitz(kernel.as_ref(), q, r, sampling),
    }
}

impl Problem {
    pub fn task(&self) -> Task {
        match self {
            Problem::Constant { .. } => Task::Constant,
            Problem::Monotone { .. } => Task::Monotone,
            Problem::Nonlinear { .. } => Task::Nonlinear,
            Problem::Linear { .. } => Task::Linear,
            Problem::APriori { .. } => Task::APriori,
            Problem::Difference { .. } => Task::Difference,
        }
    }

    pub fn grid(&self) -> &Arc<Grid2> {
        match self {
            Problem::Constant { p, .. } | Problem::Monotone { p, .. } => p.grid(),
            Problem::Nonlinear { g, .. }
            | Problem::Linear { g, .. }
            | Problem::APriori { g, .. }
            | Problem::Difference { g, .. } => g.grid(),
        }
    }

    /// Checks hypotheses, and if they hold computes the actual side and the bound.
    pub fn run(&self, sampling: &Sampling) -> deltabound::Result<Outcome> {
        match self {
            Problem::Constant { k, p } => {
                let res = constant_bound(*k, p)?;
                let g = GridFunction::constant(p.grid().clone(), *k)?;
                Outcome::from_result(res, vec![], || {
                    solve_exact(&g, &InnerKernel(|eta, tau, u| lookup(p, eta, tau) * u))
                })
            }
            Problem::Monotone { q, p } => {
                let res = monotone_bound(q, p)?;
                Outcome::from_result(res, vec![], || {
                    solve_exact(q, &InnerKernel(|eta, tau, u| lookup(p, eta, tau) * u))
                })
            }
            Problem::Nonlinear { g, h, l, hh } => {
                let pair = LipschitzPair::new(|x, y, u| l(x, y, u), |x, y, v| hh(x, y, v));
                let res = nonlinear_bound_sampled(g, h, &pair, sampling)?;
                Outcome::from_result(res, vec![], || {
                    solve_exact(g, &|x, y, eta, tau, u| lookup(h, x, y) * l(eta, tau, u))
                })
            }
            Problem::Linear { g, h, p } => {
                let res = linear_bound(g, h, p)?;
                Outcome::from_result(res, vec![], || {
                    solve_exact(g, &|x, y, eta, tau, u| {
                        lookup(h, x, y) * lookup(p, eta, tau) * u
                    })
                })
            }
            Problem::APriori {
                g,
                kernel,
                q,
                r,
                envelope,
                lipschitz,
            } => {
                let envelope = match envelope {
                    Some(e) => e.clone(),
                    None => zero_section(g, kernel.as_ref())?.map(f64::abs)?,
                };
                let res = a_priori_bound(&envelope, q, r)?;
                let extra = vec![
                    lipschitz_check(lipschitz, kernel, q, r, sampling)?,
                    check_envelope(g, kernel.as_ref(), &envelope)?,
                ];
                Outcome::from_result(res, extra, || {
                    solve_exact(g, kernel.as_ref())?.map(f64::abs)
                })
            }
            Problem::Difference {
                g,
                kernel,
                q,
                r,
                phi,
                delta,
                lipschitz,
            } => {
                let u1 = solve_exact(g, kernel.as_ref())?;
                let shift = phi.map(|v| delta * v)?;
                let u2 = u1.zip_with(&shift, |a, b| a + b)?;
                let eps1 = residual_eps(&u1, g, kernel.as_ref())?;
                let eps2 = residual_eps(&u2, g, kernel.as_ref())?;
                let mut res = difference_bound(eps1, eps2, q, r)?;
                res.notes.push(format!("eps1 = {eps1:e}, eps2 = {eps2:e}"));
                let extra = vec![lipschitz_check(lipschitz, kernel, q, r, sampling)?];
                Outcome::from_result(res, extra, || u1.zip_with(&u2, |a, b| (a - b).abs()))
            }
        }
    }
}
