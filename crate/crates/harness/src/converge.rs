//! Refinement studies on uniform grids of the unit square.

use std::fmt;

use deltabound::{constant_bound, solve_exact, Grid2, GridFunction, InnerKernel, TimeScale};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergeTask {
    /// Constant-coefficient bound with `k = 1`, `p = c` at `(1, 1)`; the limit is `exp(c / 2)`.
    Constant { coefficient: f64 },
    /// Exact solution of `u = 1 + int int int u` at `(1, 1)`; the limit is
    /// `sum_n 1 / ((2n)! n!)`.
    Solve,
}

impl ConvergeTask {
    pub fn parse(name: &str, coefficient: f64) -> Result<Self, HarnessError> {
        match name {
            "constant" => Ok(ConvergeTask::Constant { coefficient }),
            "solve" => Ok(ConvergeTask::Solve),
            other => Err(HarnessError::Config(format!(
                "unknown convergence task `{other}` (expected constant or solve)"
            ))),
        }
    }

    /// Continuum value at `(1, 1)`.
    pub fn limit(self) -> f64 {
        match self {
            ConvergeTask::Constant { coefficient } => (coefficient / 2.0).exp(),
            ConvergeTask::Solve => {
                let mut total = 0.0;
                let mut term = 1.0;
                for n in 0..30u32 {
                    total += term;
                    let m = f64::from(n + 1);
                    term /= m * (2.0 * m - 1.0) * (2.0 * m);
                }
                total
            }
        }
    }

    /// Discrete value at `(1, 1)` with `intervals` steps per axis.
    pub fn value(self, intervals: usize) -> Result<f64, HarnessError> {
        let axis = TimeScale::uniform(0.0, 1.0, intervals + 1)?;
        let grid = Grid2::shared(axis.clone(), axis);
        let (n1, n2) = (grid.n1(), grid.n2());
        let field = match self {
            ConvergeTask::Constant { coefficient } => {
                let p = GridFunction::constant(grid, coefficient)?;
                constant_bound(1.0, &p)?.into_bound().ok_or_else(|| {
                    HarnessError::Config(format!("coefficient {coefficient} is negative"))
                })?
            }
            ConvergeTask::Solve => {
                let g = GridFunction::constant(grid, 1.0)?;
                solve_exact(&g, &InnerKernel(|_eta, _tau, u| u))?
            }
        };
        Ok(field.get(n1 - 1, n2 - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeRow {
    pub intervals: usize,
    pub value: f64,
    pub error: f64,
    /// `log2` of the error ratio to the previous level; `None` for the first level
    /// or when either error is zero.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeTable {
    pub limit: f64,
    pub rows: Vec<ConvergeRow>,
}

/// Evaluates `task` at each refinement level; levels count intervals per axis and must increase.
pub fn run_converge(task: ConvergeTask, levels: &[usize]) -> Result<ConvergeTable, HarnessError> {
    if levels.is_empty() {
        return Err(HarnessError::Config("no refinement levels given".into()));
    }
    if levels[0] == 0 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HarnessError::Config(format!(
            "refinement levels must be positive and strictly increasing, got {levels:?}"
        )));
    }
    let limit = task.limit();
    let mut rows: Vec<ConvergeRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let value = task.value(n)?;
        let error = (value - limit).abs();
        let order = rows.last().and_then(|prev| {
            (prev.error > 0.0 && error > 0.0)
                .then(|| (prev.error / error).log2() / (n as f64 / prev.intervals as f64).log2())
        });
        rows.push(ConvergeRow {
            intervals: n,
            value,
            error,
            order,
        });
    }
    Ok(ConvergeTable { limit, rows })
}

impl ConvergeTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,value,error,order\n");
        for r in &self.rows {
            let order = r.order.map_or(String::new(), crate::report::sig17);
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.intervals,
                crate::report::sig17(r.value),
                crate::report::sig17(r.error),
                order
            ));
        }
        out
    }
}

impl fmt::Display for ConvergeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "limit {:.15}", self.limit)?;
        for r in &self.rows {
            write!(
                f,
                "\n  n {:>5} value {:.15} error {:.3e}",
                r.intervals, r.value, r.error
            )?;
            if let Some(o) = r.order {
                write!(f, " order {o:.4}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_task_converges_at_first_order() {
        let t = run_converge(
            ConvergeTask::Constant { coefficient: 0.5 },
            &[16, 32, 64, 128],
        )
        .unwrap();
        for r in &t.rows[1..] {
            assert!((r.order.unwrap() - 1.0).abs() < 0.2, "{t}");
        }
        assert!(t.rows.windows(2).all(|w| w[1].error < w[0].error));
    }

    #[test]
    fn zero_coefficient_is_exact() {
        let t = run_converge(ConvergeTask::Constant { coefficient: 0.0 }, &[2, 4, 8]).unwrap();
        assert!(t.rows.iter().all(|r| r.error == 0.0 && r.order.is_none()));
    }

    #[test]
    fn solve_task_increases_towards_the_series() {
        let t = run_converge(ConvergeTask::Solve, &[4, 8, 16, 32]).unwrap();
        assert!((t.limit - 1.521_065_8).abs() < 1e-6, "{}", t.limit);
        assert!(t.rows.windows(2).all(|w| w[1].value > w[0].value));
        assert!(t.rows.iter().all(|r| r.value < t.limit));
        let gaps: Vec<f64> = t.rows.windows(2).map(|w| w[1].value - w[0].value).collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0]));
    }

    #[test]
    fn levels_must_increase() {
        assert!(run_converge(ConvergeTask::Solve, &[8, 8]).is_err());
        assert!(run_converge(ConvergeTask::Solve, &[0, 8]).is_err());
        assert!(run_converge(ConvergeTask::Solve, &[]).is_err());
        assert!(ConvergeTask::parse("quadratic", 0.5).is_err());
    }
}
