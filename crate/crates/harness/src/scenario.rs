//! Scenario documents: grid axes, function bindings in the expression language,
//! the task to run and its tolerances.

use std::collections::BTreeMap;
use std::sync::Arc;

use deltabound::{Grid2, GridFunction, TimeScale};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;
use crate::expr::{parse_expr, Env, Expr, Var};

/// How one axis of the grid is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisSpec {
    /// Explicit strictly increasing points.
    Points(Vec<f64>),
    /// `n` equally spaced points from `lo` to `hi`.
    Uniform { lo: f64, hi: f64, n: usize },
    /// The integers `lo..=hi`.
    Integers { lo: i64, hi: i64 },
    /// `first * base^i`, `i = 0..n`.
    Geometric { base: f64, first: f64, n: usize },
}

impl AxisSpec {
    pub fn build(&self) -> Result<TimeScale, HarnessError> {
        let ts = match self {
            AxisSpec::Points(p) => TimeScale::new(p.clone()),
            AxisSpec::Uniform { lo, hi, n } => TimeScale::uniform(*lo, *hi, *n),
            AxisSpec::Integers { lo, hi } => TimeScale::integers(*lo, *hi),
            AxisSpec::Geometric { base, first, n } => TimeScale::geometric(*base, *first, *n),
        };
        ts.map_err(|e| HarnessError::Config(format!("invalid axis {self:?}: {e}")))
    }
}

/// Which estimate a scenario exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// `u = k + int int int p u` against `k e_A`.
    Constant,
    /// `u = q + int int int p u` against `q e_A`, `q` positive nondecreasing.
    Monotone,
    /// `u = g + h int int int L(u)` against the `(L, H)` estimate.
    Nonlinear,
    /// `u = g + h int int int p u` against the linear estimate.
    Linear,
    /// `|u|` for `u = g + int int int K(u)` against the a-priori estimate.
    APriori,
    /// `|u1 - u2|` for the exact and a perturbed solution against the difference estimate.
    Difference,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Constant,
        Task::Monotone,
        Task::Nonlinear,
        Task::Linear,
        Task::APriori,
        Task::Difference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Constant => "constant",
            Task::Monotone => "monotone",
            Task::Nonlinear => "nonlinear",
            Task::Linear => "linear",
            Task::APriori => "a-priori",
            Task::Difference => "difference",
        }
    }

    /// Required function bindings and the variables each may use.
    pub fn required(self) -> &'static [(&'static str, &'static [Var])] {
        const XY: &[Var] = &[Var::X, Var::Y];
        const NONE: &[Var] = &[];
        match self {
            Task::Constant => &[("p", XY), ("k", NONE)],
            Task::Monotone => &[("p", XY), ("q", XY)],
            Task::Nonlinear => &[
                ("g", XY),
                ("h", XY),
                ("L", &[Var::X, Var::Y, Var::U]),
                ("H", &[Var::X, Var::Y, Var::V]),
            ],
            Task::Linear => &[("g", XY), ("h", XY), ("p", XY)],
            Task::APriori | Task::Difference => &[
                ("g", XY),
                ("K", &[Var::X, Var::Y, Var::S, Var::T, Var::U]),
                ("q", XY),
                ("r", XY),
            ],
        }
    }

    /// Optional bindings with their defaults.
    pub fn optional(self) -> &'static [(&'static str, &'static [Var], &'static str)] {
        const XY: &[Var] = &[Var::X, Var::Y];
        match self {
            Task::APriori => &[("envelope", XY, "")],
            Task::Difference => &[("phi", XY, "1"), ("delta", &[], "0.1")],
            _ => &[],
        }
    }
}

impl std::str::FromStr for Task {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown task `{s}`")))
    }
}

fn default_relative() -> f64 {
    1e-9
}

fn default_samples() -> usize {
    32
}

fn default_range() -> [f64; 2] {
    [0.0, 10.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative slack when comparing actual values with bounds.
    #[serde(default = "default_relative")]
    pub relative: f64,
    /// Draws per grid point for sampled hypothesis checks.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Range of `u` for sampled hypothesis checks.
    #[serde(default = "default_range")]
    pub u_range: [f64; 2],
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            relative: default_relative(),
            samples: default_samples(),
            u_range: default_range(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub functions: BTreeMap<String, String>,
    pub task: Task,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Short stable digest of the canonical serialization.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        hex::encode(&hash[..8])
    }

    pub fn grid(&self) -> Result<Arc<Grid2>, HarnessError> {
        Ok(Grid2::shared(self.axis1.build()?, self.axis2.build()?))
    }

    /// Parses and checks every binding the task needs; returns them by name.
    pub fn compile(&self) -> Result<Bindings, HarnessError> {
        let mut exprs = BTreeMap::new();
        let required = self.task.required().iter().map(|(n, v)| (*n, *v, None));
        let optional = self
            .task
            .optional()
            .iter()
            .map(|(n, v, d)| (*n, *v, Some(*d)));
        for (name, allowed, default) in required.chain(optional) {
            let source = match (self.functions.get(name), default) {
                (Some(s), _) => s.as_str(),
                (None, Some("")) => continue,
                (None, Some(d)) => d,
                (None, None) => {
                    return Err(HarnessError::Config(format!(
                        "task `{}` needs a binding for `{name}`",
                        self.task.name()
                    )))
                }
            };
            let expr = parse_expr(source).map_err(|source| HarnessError::Parse {
                name: name.to_owned(),
                source,
            })?;
            if let Some(bad) = expr.free_vars().into_iter().find(|v| !allowed.contains(v)) {
                return Err(HarnessError::Config(format!(
                    "`{name}` may not use variable `{}`",
                    bad.name()
                )));
            }
            exprs.insert(name.to_owned(), expr);
        }
        let known: Vec<&str> = self
            .task
            .required()
            .iter()
            .map(|r| r.0)
            .chain(self.task.optional().iter().map(|o| o.0))
            .collect();
        if let Some(extra) = self.functions.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(HarnessError::Config(format!(
                "binding `{extra}` is not used by task `{}`",
                self.task.name()
            )));
        }
        Ok(Bindings { exprs })
    }
}

/// Compiled function bindings of a scenario.
#[derive(Debug, Clone)]
pub struct Bindings {
    exprs: BTreeMap<String, Expr>,
}

impl Bindings {
    pub fn expr(&self, name: &str) -> Option<&Expr> {
        self.exprs.get(name)
    }

    fn require(&self, name: &str) -> Result<&Expr, HarnessError> {
        self.expr(name)
            .ok_or_else(|| HarnessError::Config(format!("missing binding `{name}`")))
    }

    /// Samples a binding of `(x, y)` on the grid.
    pub fn grid_function(
        &self,
        name: &str,
        grid: &Arc<Grid2>,
    ) -> Result<GridFunction, HarnessError> {
        let expr = self.require(name)?;
        let mut values = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let (i, j) = grid.indices(k);
            let (x, y) = grid.point(i, j);
            let v = expr
                .eval(&Env::xy(x, y))
                .map_err(|source| HarnessError::Eval {
                    name: name.to_owned(),
                    x,
                    y,
                    source,
                })?;
            values.push(v);
        }
        Ok(GridFunction::from_values(grid.clone(), values)?)
    }

    /// Evaluates a constant binding.
    pub fn constant(&self, name: &str) -> Result<f64, HarnessError> {
        let expr = self.require(name)?;
        expr.eval(&Env::new()).map_err(|source| HarnessError::Eval {
            name: name.to_owned(),
            x: f64::NAN,
            y: f64::NAN,
            source,
        })
    }
}
