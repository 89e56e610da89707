//! Explicit Gronwall-type estimates for triple-integral inequalities on a grid.
//!
//! Each evaluator checks the side conditions of its estimate first. A failed
//! condition refuses the evaluation: the returned [`BoundResult`] carries the
//! hypothesis report and no bound. Structural problems (mismatched grids,
//! overflow) are reported as [`Error`]s instead.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{cumulative_double, cumulative_triple, ts_exp_axis1};
use crate::error::{Error, Result};
use crate::exec::{map_indices, Strategy};
use crate::timescale::{Grid2, GridFunction};

/// Relative slack allowed when comparing the two sides of a sampled condition.
pub(crate) const CHECK_RTOL: f64 = 1e-12;

/// Outcome of one side-condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    /// Largest amount by which the condition was exceeded; `0` when it held everywhere.
    pub worst_violation: f64,
}

impl HypothesisCheck {
    pub fn new(name: impl Into<String>, passed: bool, worst_violation: f64) -> Self {
        Self {
            name: name.into(),
            passed,
            worst_violation,
        }
    }
}

impl fmt::Display for HypothesisCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "FAIL" };
        write!(
            f,
            "{status} {} (worst violation {:e})",
            self.name, self.worst_violation
        )
    }
}

/// A computed estimate together with the report on its hypotheses.
#[derive(Debug, Clone)]
pub struct BoundResult {
    bound: Option<GridFunction>,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Interpretation notes attached by the evaluator.
    pub notes: Vec<String>,
}

impl BoundResult {
    pub(crate) fn evaluate(
        hypotheses: Vec<HypothesisCheck>,
        compute: impl FnOnce() -> Result<GridFunction>,
    ) -> Result<Self> {
        let bound = if hypotheses.iter().all(|h| h.passed) {
            let b = compute()?;
            b.ensure_finite()?;
            Some(b)
        } else {
            None
        };
        Ok(Self {
            bound,
            hypotheses,
            notes: Vec::new(),
        })
    }

    pub(crate) fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_owned());
        self
    }

    /// The bound, or `None` when a hypothesis failed and evaluation was refused.
    pub fn bound(&self) -> Option<&GridFunction> {
        self.bound.as_ref()
    }

    pub fn into_bound(self) -> Option<GridFunction> {
        self.bound
    }

    pub fn is_refused(&self) -> bool {
        self.bound.is_none()
    }

    pub fn failed_hypotheses(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.hypotheses.iter().filter(|h| !h.passed)
    }
}

pub(crate) fn nonnegative(name: &str, f: &GridFunction) -> HypothesisCheck {
    let min = f.min_value();
    HypothesisCheck::new(name, min >= 0.0, (-min).max(0.0))
}

pub(crate) fn nonnegative_scalar(name: &str, v: f64) -> HypothesisCheck {
    HypothesisCheck::new(
        name,
        v >= 0.0,
        if v.is_nan() {
            f64::INFINITY
        } else {
            (-v).max(0.0)
        },
    )
}

fn positive(name: &str, f: &GridFunction) -> HypothesisCheck {
    let min = f.min_value();
    HypothesisCheck::new(name, min > 0.0, (-min).max(0.0))
}

pub(crate) fn same_grid(fs: &[&GridFunction]) -> Result<()> {
    fs.windows(2).try_for_each(|w| w[0].check_same_grid(w[1]))
}

/// `g + h * c * e`, pointwise.
pub(crate) fn affine_product(
    g: &GridFunction,
    h: &GridFunction,
    c: &GridFunction,
    e: &GridFunction,
) -> Result<GridFunction> {
    let values = (0..g.values().len())
        .map(|k| g.values()[k] + h.values()[k] * c.values()[k] * e.values()[k])
        .collect();
    GridFunction::from_values(g.grid().clone(), values)
}

/// `E = e_A(x, x0)` with `A = cumulative_double(coef)`.
pub(crate) fn exponential_factor(coef: &GridFunction) -> Result<GridFunction> {
    ts_exp_axis1(&cumulative_double(coef))
}

/// Estimate for `u <= k + int int int p u`: `u(x, y) <= k e_A(x, x0)` with
/// `A(s, y) = int_{x0}^{s} int_{y0}^{y} p`.
pub fn constant_bound(k: f64, p: &GridFunction) -> Result<BoundResult> {
    let hyps = vec![nonnegative_scalar("k >= 0", k), nonnegative("p >= 0", p)];
    BoundResult::evaluate(hyps, || exponential_factor(p)?.map(|e| k * e))
}

/// Estimate for `u <= q + int int int p u` with `q` positive and nondecreasing:
/// `u(x, y) <= q(x, y) e_A(x, x0)`.
pub fn monotone_bound(q: &GridFunction, p: &GridFunction) -> Result<BoundResult> {
    same_grid(&[q, p])?;
    let hyps = vec![
        nonnegative("p >= 0", p),
        positive("q > 0", q),
        check_nondecreasing(q),
    ];
    Ok(
        BoundResult::evaluate(hyps, || exponential_factor(p)?.mul(q))?
            .with_note("exponent coefficient is p alone, not p*u"),
    )
}

/// The pair `(L, H)` of a nonlinear integrand `L(x, y, u)` and its one-sided
/// slope bound `H(x, y, v)`:
/// `0 <= L(x, y, u) - L(x, y, v) <= H(x, y, v) (u - v)` for `u >= v >= 0`.
pub struct LipschitzPair<L, H> {
    pub l: L,
    pub h: H,
}

impl<L, H> LipschitzPair<L, H>
where
    L: Fn(f64, f64, f64) -> f64 + Sync,
    H: Fn(f64, f64, f64) -> f64 + Sync,
{
    pub fn new(l: L, h: H) -> Self {
        Self { l, h }
    }
}

/// Sampling plan for black-box conditions on `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub lo: f64,
    pub hi: f64,
    /// Draws per grid point (or per grid pair).
    pub samples: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 10.0,
            samples: 32,
            seed: 0x5eed,
        }
    }
}

impl Sampling {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Self {
        Self {
            lo,
            hi,
            samples,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "empty sampling range [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument(
                "sample count must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Deterministic stream of ordered pairs `(u, v)` with `u >= v` for slot `stream`.
    /// The first pair is always `(hi, lo)`.
    pub(crate) fn ordered_pairs(&self, stream: u64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let (lo, hi) = (self.lo, self.hi);
        (0..self.samples).map(move |k| {
            if k == 0 || lo == hi {
                return (hi, lo);
            }
            let a = rng.gen_range(lo..=hi);
            let b = rng.gen_range(lo..=hi);
            (a.max(b), a.min(b))
        })
    }
}

/// Checks `0 <= L(x,y,u) - L(x,y,v) <= H(x,y,v)(u - v)` for sampled `u >= v`
/// drawn from the sampling range at every grid point.
pub fn check_lipschitz_pair<L, H>(
    lp: &LipschitzPair<L, H>,
    grid: &Grid2,
    sampling: &Sampling,
) -> Result<HypothesisCheck>
where
    L: Fn(f64, f64, f64) -> f64 + Sync,
    H: Fn(f64, f64, f64) -> f64 + Sync,
{
    sampling.validate()?;
    if sampling.lo < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sampling range must lie in [0, inf), got lower end {}",
            sampling.lo
        )));
    }
    let per_point = map_indices(Strategy::default(), grid.len(), |k| {
        let (i, j) = grid.indices(k);
        let (x, y) = grid.point(i, j);
        let mut worst = 0.0_f64;
        let mut passed = true;
        for (u, v) in sampling.ordered_pairs(k as u64) {
            let lu = (lp.l)(x, y, u);
            let lv = (lp.l)(x, y, v);
            let slope = (lp.h)(x, y, v) * (u - v);
            let diff = lu - lv;
            let violation = (-diff).max(diff - slope);
            let slack = CHECK_RTOL * (lu.abs() + lv.abs() + slope.abs());
            if !(violation <= slack) {
                passed = false;
            }
            worst = worst.max(if violation.is_nan() {
                f64::INFINITY
            } else {
                violation
            });
        }
        (passed, worst)
    });
    let passed = per_point.iter().all(|p| p.0);
    let worst = per_point.iter().fold(0.0_f64, |m, p| m.max(p.1));
    Ok(HypothesisCheck::new(
        "L increasing with slope bound H",
        passed,
        worst,
    ))
}

/// Checks that `q` is nondecreasing along both axes; the worst violation is the
/// largest single-step drop.
pub fn check_nondecreasing(q: &GridFunction) -> HypothesisCheck {
    let grid = q.grid();
    let mut worst = 0.0_f64;
    for i in 0..grid.n1() {
        for j in 0..grid.n2() {
            let here = q.get(i, j);
            if i + 1 < grid.n1() {
                worst = worst.max(here - q.get(i + 1, j));
            }
            if j + 1 < grid.n2() {
                worst = worst.max(here - q.get(i, j + 1));
            }
        }
    }
    HypothesisCheck::new("q nondecreasing", worst <= 0.0, worst)
}

/// Estimate for `u <= g + h int int int L(eta, tau, u)` with `(L, H)` satisfying the
/// one-sided slope condition, using the default [`Sampling`].
pub fn nonlinear_bound<L, H>(
    g: &GridFunction,
    h: &GridFunction,
    lp: &LipschitzPair<L, H>,
) -> Result<BoundResult>
where
    L: Fn(f64, f64, f64) -> f64 + Sync,
    H: Fn(f64, f64, f64) -> f64 + Sync,
{
    nonlinear_bound_sampled(g, h, lp, &Sampling::default())
}

/// `u <= g + h (int int int L(eta, tau, g)) e_A(x, x0)` with
/// `A = int int H(eta, tau, g) h`.
pub fn nonlinear_bound_sampled<L, H>(
    g: &GridFunction,
    h: &GridFunction,
    lp: &LipschitzPair<L, H>,
    sampling: &Sampling,
) -> Result<BoundResult>
where
    L: Fn(f64, f64, f64) -> f64 + Sync,
    H: Fn(f64, f64, f64) -> f64 + Sync,
{
    same_grid(&[g, h])?;
    let grid = g.grid().clone();
    let along_g = |f: &(dyn Fn(f64, f64, f64) -> f64 + Sync)| {
        GridFunction::from_fn(grid.clone(), |x, y| f(x, y, g.at(x, y).unwrap_or(f64::NAN)))
    };
    let l_of_g = along_g(&lp.l)?;
    let h_of_g = along_g(&lp.h)?;
    let hyps = vec![
        nonnegative("g >= 0", g),
        nonnegative("h >= 0", h),
        nonnegative("L(x, y, g) >= 0", &l_of_g),
        nonnegative("H(x, y, g) >= 0", &h_of_g),
        check_lipschitz_pair(lp, &grid, sampling)?,
    ];
    BoundResult::evaluate(hyps, || {
        let c = cumulative_triple(&l_of_g);
        let e = exponential_factor(&h_of_g.mul(h)?)?;
        affine_product(g, h, &c, &e)
    })
}

/// Estimate for `u <= g + h int int int p u`:
/// `u <= g + h (int int int p g) e_A(x, x0)` with `A = int int p h`.
pub fn linear_bound(g: &GridFunction, h: &GridFunction, p: &GridFunction) -> Result<BoundResult> {
    same_grid(&[g, h, p])?;
    let hyps = vec![
        nonnegative("g >= 0", g),
        nonnegative("h >= 0", h),
        nonnegative("p >= 0", p),
    ];
    BoundResult::evaluate(hyps, || linear_bound_unchecked(g, h, p))
}

pub(crate) fn linear_bound_unchecked(
    g: &GridFunction,
    h: &GridFunction,
    p: &GridFunction,
) -> Result<GridFunction> {
    let c = cumulative_triple(&p.mul(g)?);
    let e = exponential_factor(&p.mul(h)?)?;
    affine_product(g, h, &c, &e)
}
