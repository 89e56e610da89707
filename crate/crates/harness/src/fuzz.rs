//! Randomized search for bound violations.
//!
//! Every trial draws a grid from one scale family and per-point data in
//! `[0, 2]`, then runs all six estimates against the exact (or perturbed)
//! solutions. A violating case is shrunk by greedily dropping grid points
//! while it keeps violating.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use deltabound::exec::map_indices;
use deltabound::{
    check_kernel_lipschitz, zero_section, Grid2, GridFunction, HypothesisCheck, Kernel, Sampling,
    Strategy, TimeScale,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::HarnessError;
use crate::problem::{Field3, Problem};
use crate::report::BoundReport;
use crate::scenario::Task;

const MIN_POINTS: usize = 3;
const MAX_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Consecutive integers.
    Integer,
    /// Equally spaced points on a random interval.
    Uniform,
    /// `first * base^i` with `base` in `[1.05, 1.5]`.
    Geometric,
    /// Sorted random points in `[0, 5]`.
    Random,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Integer,
        Family::Uniform,
        Family::Geometric,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Integer => "integer",
            Family::Uniform => "uniform",
            Family::Geometric => "geometric",
            Family::Random => "random",
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = rng.gen_range(MIN_POINTS..=MAX_POINTS);
        match self {
            Family::Integer => {
                let lo = rng.gen_range(-5i64..=5);
                (0..n as i64).map(|k| (lo + k) as f64).collect()
            }
            Family::Uniform => {
                let lo = rng.gen_range(-2.0..=2.0);
                let span = rng.gen_range(0.5..=5.0);
                TimeScale::uniform(lo, lo + span, n)
                    .expect("valid uniform scale")
                    .points()
                    .to_vec()
            }
            Family::Geometric => {
                let base = rng.gen_range(1.05..=1.5);
                let first = rng.gen_range(0.1..=1.0);
                TimeScale::geometric(base, first, n)
                    .expect("valid geometric scale")
                    .points()
                    .to_vec()
            }
            Family::Random => loop {
                let mut pts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=5.0)).collect();
                pts.sort_by(f64::total_cmp);
                if pts.windows(2).all(|w| w[0] < w[1]) {
                    break pts;
                }
            },
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown scale family `{s}`")))
    }
}

/// Concave increasing profiles for the nonlinear integrand `a phi(u) + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Affine,
    Log,
    Saturating,
    Sqrt,
}

impl Profile {
    const ALL: [Profile; 4] = [
        Profile::Affine,
        Profile::Log,
        Profile::Saturating,
        Profile::Sqrt,
    ];

    fn value(self, u: f64) -> f64 {
        match self {
            Profile::Affine => u,
            Profile::Log => u.ln_1p(),
            Profile::Saturating => u / (1.0 + u),
            Profile::Sqrt => (1.0 + u).sqrt() - 1.0,
        }
    }

    /// Derivative at `v`, which bounds every chord slope to the right of `v`.
    fn slope(self, v: f64) -> f64 {
        match self {
            Profile::Affine => 1.0,
            Profile::Log => 1.0 / (1.0 + v),
            Profile::Saturating => 1.0 / ((1.0 + v) * (1.0 + v)),
            Profile::Sqrt => 0.5 / (1.0 + v).sqrt(),
        }
    }
}

/// 1-Lipschitz response of the integral-equation kernel to `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Identity,
    Sin,
    Tanh,
}

impl Response {
    const ALL: [Response; 3] = [Response::Identity, Response::Sin, Response::Tanh];

    fn value(self, u: f64) -> f64 {
        match self {
            Response::Identity => u,
            Response::Sin => u.sin(),
            Response::Tanh => u.tanh(),
        }
    }
}

/// Perturbation shapes for the two-solution estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Ones,
    Checkerboard,
    Spike,
}

impl Shape {
    const ALL: [Shape; 3] = [Shape::Ones, Shape::Checkerboard, Shape::Spike];
}

/// `q(x, y) r(eta, tau) theta f(u) + c(eta, tau)`, Lipschitz in `u` with constant `q r`.
pub struct DataKernel {
    q: GridFunction,
    r: GridFunction,
    c: GridFunction,
    theta: f64,
    response: Response,
}

impl Kernel for DataKernel {
    fn eval(&self, x: f64, y: f64, eta: f64, tau: f64, u: f64) -> f64 {
        let grid = self.q.grid();
        match (grid.locate(x, y), grid.locate(eta, tau)) {
            (Ok((i, j)), Ok((a, b))) => {
                self.q.get(i, j) * self.r.get(a, b) * self.theta * self.response.value(u)
                    + self.c.get(a, b)
            }
            _ => f64::NAN,
        }
    }
}

const FIELDS: [&str; 10] = ["p", "q", "g", "h", "r", "a", "b", "kq", "c", "extra"];

/// Random data for one trial, stored by grid index so points can be dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub family: Family,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major `n1 x n2` tables keyed by role.
    pub fields: BTreeMap<&'static str, Vec<f64>>,
    pub k: f64,
    pub profile: Profile,
    pub theta: f64,
    pub response: Response,
    pub shape: Shape,
    pub delta: f64,
}

fn prefix_normalized(raw: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let mut s = raw.to_vec();
    for i in 0..n1 {
        for j in 0..n2 {
            let up = if i > 0 { s[(i - 1) * n2 + j] } else { 0.0 };
            let left = if j > 0 { s[i * n2 + j - 1] } else { 0.0 };
            let diag = if i > 0 && j > 0 {
                s[(i - 1) * n2 + j - 1]
            } else {
                0.0
            };
            s[i * n2 + j] += up + left - diag;
        }
    }
    let top = s.iter().copied().fold(0.0_f64, f64::max);
    s.iter()
        .map(|v| {
            0.05 + 1.95
                * if top > 0.0 {
                    (v / top).clamp(0.0, 1.0)
                } else {
                    0.0
                }
        })
        .collect()
}

impl Case {
    pub fn draw(family: Family, rng: &mut ChaCha8Rng) -> Self {
        let axis1 = family.draw(rng);
        let axis2 = family.draw(rng);
        let (n1, n2) = (axis1.len(), axis2.len());
        let table = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n1 * n2).map(|_| rng.gen_range(0.0..=2.0)).collect()
        };
        let mut fields = BTreeMap::new();
        for name in FIELDS {
            let raw = table(rng);
            let values = if name == "q" {
                prefix_normalized(&raw, n1, n2)
            } else {
                raw
            };
            fields.insert(name, values);
        }
        let k = 10.0 - rng.gen_range(0.0..10.0);
        let profile = *Profile::ALL.choose(rng).unwrap();
        let theta = rng.gen_range(0.0..=1.0);
        let response = *Response::ALL.choose(rng).unwrap();
        let shape = *Shape::ALL.choose(rng).unwrap();
        let delta = rng.gen_range(0.01..=1.0);
        let spike = rng.gen_range(0..n1 * n2);
        let phi = (0..n1 * n2)
            .map(|idx| match shape {
                Shape::Ones => 1.0,
                Shape::Checkerboard => {
                    if (idx / n2 + idx % n2) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                Shape::Spike => f64::from(idx == spike),
            })
            .collect();
        fields.insert("phi", phi);
        Self {
            family,
            axis1,
            axis2,
            fields,
            k,
            profile,
            theta,
            response,
            shape,
            delta,
        }
    }

    pub fn grid(&self) -> deltabound::Result<Arc<Grid2>> {
        Ok(Grid2::shared(
            TimeScale::new(self.axis1.clone())?,
            TimeScale::new(self.axis2.clone())?,
        ))
    }

    /// The case with one grid line removed.
    pub fn drop_line(&self, axis: usize, index: usize) -> Self {
        let mut out = self.clone();
        let n2 = self.axis2.len();
        let keep = |idx: usize| {
            if axis == 0 {
                idx / n2 != index
            } else {
                idx % n2 != index
            }
        };
        for values in out.fields.values_mut() {
            *values = values
                .iter()
                .enumerate()
                .filter(|(idx, _)| keep(*idx))
                .map(|(_, v)| *v)
                .collect();
        }
        if axis == 0 {
            out.axis1.remove(index);
        } else {
            out.axis2.remove(index);
        }
        out
    }

    fn field(&self, grid: &Arc<Grid2>, name: &str) -> deltabound::Result<GridFunction> {
        GridFunction::from_values(grid.clone(), self.fields[name].clone())
    }

    fn kernel(&self, grid: &Arc<Grid2>) -> deltabound::Result<DataKernel> {
        Ok(DataKernel {
            q: self.field(grid, "kq")?,
            r: self.field(grid, "r")?,
            c: self.field(grid, "c")?,
            theta: self.theta,
            response: self.response,
        })
    }

    /// The kernel Lipschitz hypothesis shared by the a-priori and difference tasks.
    pub fn kernel_check(&self, config: &FuzzConfig) -> deltabound::Result<HypothesisCheck> {
        let grid = self.grid()?;
        let kernel = self.kernel(&grid)?;
        check_kernel_lipschitz(&kernel, &kernel.q, &kernel.r, &config.sampling)
    }

    /// The problem for `task`; `lipschitz` reuses an earlier [`Case::kernel_check`].
    pub fn problem(
        &self,
        task: Task,
        lipschitz: Option<HypothesisCheck>,
    ) -> deltabound::Result<Problem> {
        let grid = self.grid()?;
        let f = |name: &str| self.field(&grid, name);
        Ok(match task {
            Task::Constant => Problem::Constant {
                k: self.k,
                p: f("p")?,
            },
            Task::Monotone => Problem::Monotone {
                q: f("q")?,
                p: f("p")?,
            },
            Task::Nonlinear => {
                let (a, b) = (f("a")?, f("b")?);
                let a2 = a.clone();
                let profile = self.profile;
                let l: Field3 = Arc::new(move |x, y, u| {
                    a.at(x, y).unwrap_or(f64::NAN) * profile.value(u)
                        + b.at(x, y).unwrap_or(f64::NAN)
                });
                let hh: Field3 =
                    Arc::new(move |x, y, v| a2.at(x, y).unwrap_or(f64::NAN) * profile.slope(v));
                Problem::Nonlinear {
                    g: f("g")?,
                    h: f("h")?,
                    l,
                    hh,
                }
            }
            Task::Linear => Problem::Linear {
                g: f("g")?,
                h: f("h")?,
                p: f("p")?,
            },
            Task::APriori => {
                let g = f("g")?;
                let kernel = self.kernel(&grid)?;
                let extra = f("extra")?;
                let envelope =
                    zero_section(&g, &kernel)?.zip_with(&extra, |z, e| z.abs() + 0.1 * e)?;
                Problem::APriori {
                    g,
                    q: kernel.q.clone(),
                    r: kernel.r.clone(),
                    kernel: Arc::new(kernel),
                    envelope: Some(envelope),
                    lipschitz,
                }
            }
            Task::Difference => {
                let kernel = self.kernel(&grid)?;
                Problem::Difference {
                    g: f("g")?,
                    q: kernel.q.clone(),
                    r: kernel.r.clone(),
                    kernel: Arc::new(kernel),
                    phi: f("phi")?,
                    delta: self.delta,
                    lipschitz,
                }
            }
        })
    }

    pub fn check(&self, task: Task, config: &FuzzConfig) -> deltabound::Result<BoundReport> {
        self.check_with(task, config, None)
    }

    fn check_with(
        &self,
        task: Task,
        config: &FuzzConfig,
        lipschitz: Option<HypothesisCheck>,
    ) -> deltabound::Result<BoundReport> {
        let outcome = self.problem(task, lipschitz)?.run(&config.sampling)?;
        Ok(outcome.into_report(String::new(), task, config.tolerance))
    }
}

/// Greedily removes grid lines from `case` while `still_fails` holds, keeping at
/// least two points per axis. `still_fails(case)` must hold on entry.
pub fn shrink(case: &Case, still_fails: impl Fn(&Case) -> bool) -> Case {
    let mut current = case.clone();
    loop {
        let mut progressed = false;
        for axis in 0..2 {
            let mut index = 0;
            loop {
                let len = if axis == 0 {
                    current.axis1.len()
                } else {
                    current.axis2.len()
                };
                if len <= 2 || index >= len {
                    break;
                }
                let candidate = current.drop_line(axis, index);
                if still_fails(&candidate) {
                    current = candidate;
                    progressed = true;
                } else {
                    index += 1;
                }
            }
        }
        if !progressed {
            return current;
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    pub families: Vec<Family>,
    pub tolerance: f64,
    pub sampling: Sampling,
    pub strategy: Strategy,
}

impl FuzzConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            families: Family::ALL.to_vec(),
            tolerance: 1e-9,
            sampling: Sampling::default(),
            strategy: Strategy::default(),
        }
    }
}

/// Per-task tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub refused: usize,
    /// Non-finite intermediate values, typically overflow on wide grids.
    pub skipped: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub task: Task,
    pub original: (usize, usize),
    pub shrunk: Case,
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzSummary {
    pub trials: usize,
    pub seed: u64,
    pub families: Vec<Family>,
    pub tallies: BTreeMap<Task, Tally>,
    pub counterexamples: Vec<Counterexample>,
    /// Largest `actual / bound` seen per task.
    pub tightness: BTreeMap<Task, f64>,
}

impl FuzzSummary {
    pub fn violations(&self) -> usize {
        self.tallies.values().map(|t| t.violations).sum()
    }

    pub fn refused(&self) -> usize {
        self.tallies.values().map(|t| t.refused).sum()
    }
}

struct TrialResult {
    per_task: Vec<(Task, Tally, f64, Option<Counterexample>)>,
}

fn run_trial(config: &FuzzConfig, trial: usize) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let family = *config
        .families
        .choose(&mut rng)
        .expect("nonempty family list");
    let case = Case::draw(family, &mut rng);
    let lipschitz = case.kernel_check(config).ok();
    let per_task = Task::ALL
        .into_iter()
        .map(|task| {
            let mut tally = Tally::default();
            let mut tight = 0.0;
            let mut counterexample = None;
            match case.check_with(task, config, lipschitz.clone()) {
                Err(_) => tally.skipped = 1,
                Ok(report) if report.summary.is_none() => tally.refused = 1,
                Ok(report) => {
                    tally.checked = 1;
                    let summary = report.summary.expect("summary present");
                    tight = summary.tightness;
                    if summary.violations > 0 {
                        tally.violations = 1;
                        let violates =
                            |c: &Case| c.check(task, config).is_ok_and(|r| r.violations() > 0);
                        let shrunk = shrink(&case, violates);
                        let min_margin = shrunk
                            .check(task, config)
                            .ok()
                            .and_then(|r| r.summary)
                            .map_or(f64::NAN, |s| s.min_margin);
                        counterexample = Some(Counterexample {
                            trial,
                            task,
                            original: (case.axis1.len(), case.axis2.len()),
                            shrunk,
                            min_margin,
                        });
                    }
                }
            }
            (task, tally, tight, counterexample)
        })
        .collect();
    TrialResult { per_task }
}

/// Runs `config.trials` independent trials; the summary depends only on the config.
pub fn run_fuzz(config: &FuzzConfig) -> Result<FuzzSummary, HarnessError> {
    if config.trials == 0 {
        return Err(HarnessError::Config(
            "fuzzing needs at least one trial".into(),
        ));
    }
    if config.families.is_empty() {
        return Err(HarnessError::Config("no scale family selected".into()));
    }
    let results = map_indices(config.strategy, config.trials, |t| run_trial(config, t));
    let mut families = config.families.clone();
    families.sort();
    families.dedup();
    let mut summary = FuzzSummary {
        trials: config.trials,
        seed: config.seed,
        families,
        tallies: Task::ALL
            .into_iter()
            .map(|t| (t, Tally::default()))
            .collect(),
        counterexamples: Vec::new(),
        tightness: Task::ALL.into_iter().map(|t| (t, 0.0)).collect(),
    };
    for result in results {
        for (task, tally, tight, cx) in result.per_task {
            let entry = summary.tallies.get_mut(&task).expect("all tasks present");
            entry.checked += tally.checked;
            entry.refused += tally.refused;
            entry.skipped += tally.skipped;
            entry.violations += tally.violations;
            let t = summary.tightness.get_mut(&task).expect("all tasks present");
            *t = t.max(tight);
            summary.counterexamples.extend(cx);
        }
    }
    Ok(summary)
}

impl fmt::Display for FuzzSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.families.iter().map(|fam| fam.name()).collect();
        writeln!(
            f,
            "fuzz trials {} seed {} families {}",
            self.trials,
            self.seed,
            names.join(",")
        )?;
        for (task, t) in &self.tallies {
            writeln!(
                f,
                "  {:<10} checked {:>5} refused {:>3} skipped {:>3} violations {:>3} tightness {:.12}",
                task.name(),
                t.checked,
                t.refused,
                t.skipped,
                t.violations,
                self.tightness[task]
            )?;
        }
        for cx in &self.counterexamples {
            writeln!(
                f,
                "  counterexample trial {} task {} grid {}x{} shrunk to {}x{} min margin {:e}",
                cx.trial,
                cx.task.name(),
                cx.original.0,
                cx.original.1,
                cx.shrunk.axis1.len(),
                cx.shrunk.axis2.len(),
                cx.min_margin
            )?;
            writeln!(f, "    axis1 {:?}", cx.shrunk.axis1)?;
            writeln!(f, "    axis2 {:?}", cx.shrunk.axis2)?;
        }
        write!(f, "violations {}", self.violations())
    }
}
