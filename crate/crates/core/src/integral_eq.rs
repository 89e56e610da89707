//! The dynamic Volterra-type equation
//! `u(x, y) = g(x, y) + int_{x0}^{x} int_{x0}^{s} int_{y0}^{y} K(x, y, eta, tau, u(eta, tau))`
//! on a finite grid: exact forward solver, Picard iteration, defects of
//! approximate solutions and the a-priori / two-solution estimates.

use crate::bounds::{
    exponential_factor, linear_bound_unchecked, nonnegative, nonnegative_scalar, same_grid,
    BoundResult, HypothesisCheck, Sampling, CHECK_RTOL,
};
use crate::calculus::cumulative_triple;
use crate::error::{Error, Result};
use crate::exec::{try_map_indices, Strategy};
use crate::timescale::{Grid2, GridFunction};

/// Integrand `K(x, y, eta, tau, u)` of the integral equation.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64, eta: f64, tau: f64, u: f64) -> f64;

    /// True when `K` does not depend on the outer point `(x, y)`. The solver then
    /// reuses partial sums across outer points and runs in `O(n1 n2)`.
    fn ignores_outer(&self) -> bool {
        false
    }
}

impl<F> Kernel for F
where
    F: Fn(f64, f64, f64, f64, f64) -> f64 + Sync,
{
    fn eval(&self, x: f64, y: f64, eta: f64, tau: f64, u: f64) -> f64 {
        self(x, y, eta, tau, u)
    }
}

/// A kernel `K(eta, tau, u)` that does not see the outer point.
pub struct InnerKernel<F>(pub F);

impl<F> Kernel for InnerKernel<F>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    fn eval(&self, _x: f64, _y: f64, eta: f64, tau: f64, u: f64) -> f64 {
        (self.0)(eta, tau, u)
    }

    fn ignores_outer(&self) -> bool {
        true
    }
}

/// Visiting order of the forward sweep in [`solve_exact_ordered`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    /// Axis-1 index outer, axis-2 index inner, both increasing.
    RowMajor,
    /// Axis-1 index outer increasing, axis-2 index inner decreasing.
    ReversedInner,
    /// Axis-2 index outer, axis-1 index inner, both increasing.
    ColumnMajor,
}

/// Triple integral of `K(x_i, y_j, ., ., u)` at one outer point, summed directly.
///
/// Only `eta` with `sigma_1(eta) < x_i` carry weight, so `u` is read at points
/// strictly below and to the left of `(i, j)` only.
fn triple_at<K: Kernel + ?Sized>(
    grid: &Grid2,
    kernel: &K,
    u: &GridFunction,
    i: usize,
    j: usize,
) -> Result<f64> {
    let (x, y) = grid.point(i, j);
    let mut total = 0.0;
    for a in 0..i.saturating_sub(1) {
        let eta = grid.axis1().get(a);
        let weight = grid.axis1().mu_at(a) * (x - grid.axis1().get(a + 1));
        let mut inner = 0.0;
        for b in 0..j {
            let tau = grid.axis2().get(b);
            let k = kernel.eval(x, y, eta, tau, u.get(a, b));
            if !k.is_finite() {
                return Err(Error::NonFiniteValue { x, y });
            }
            inner += k * grid.axis2().mu_at(b);
        }
        total += weight * inner;
    }
    Ok(total)
}

/// Applies the integral operator: `g + int int int K(., ., eta, tau, u)`.
fn apply_operator<K: Kernel + ?Sized>(
    g: &GridFunction,
    kernel: &K,
    u: &GridFunction,
    strategy: Strategy,
) -> Result<GridFunction> {
    g.check_same_grid(u)?;
    let grid = g.grid().clone();
    if kernel.ignores_outer() {
        let (x0, y0) = grid.origin();
        let mut integrand = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let (eta, tau) = grid.point(i, j);
                integrand.push(kernel.eval(x0, y0, eta, tau, u.get(i, j)));
            }
        }
        // The last row and column carry zero weight; only weighted entries must be finite.
        let weighted_finite = (0..grid.n1() - 1)
            .all(|i| (0..grid.n2() - 1).all(|j| integrand[grid.offset(i, j)].is_finite()));
        if !weighted_finite {
            let k = integrand.iter().position(|v| !v.is_finite()).unwrap_or(0);
            let (i, j) = grid.indices(k);
            let (x, y) = grid.point(i, j);
            return Err(Error::NonFiniteValue { x, y });
        }
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                if i + 1 == grid.n1() || j + 1 == grid.n2() {
                    integrand[grid.offset(i, j)] = 0.0;
                }
            }
        }
        let t = cumulative_triple(&GridFunction::from_raw(grid.clone(), integrand));
        return g.zip_with(&t, |a, b| a + b);
    }
    let values = try_map_indices(strategy, grid.len(), |k| {
        let (i, j) = grid.indices(k);
        Ok(g.values()[k] + triple_at(&grid, kernel, u, i, j)?)
    })?;
    GridFunction::from_values(grid, values)
}

/// Solves the integral equation exactly on the grid by one forward sweep.
///
/// The triple integral at `(x, y)` only involves `u` at points `(eta, tau)` with
/// `eta < x` and `tau < y`, so every value is an explicit expression of values
/// computed earlier in the sweep.
pub fn solve_exact<K: Kernel + ?Sized>(g: &GridFunction, kernel: &K) -> Result<GridFunction> {
    if kernel.ignores_outer() {
        solve_inner(g, kernel)
    } else {
        solve_exact_ordered(g, kernel, SweepOrder::RowMajor)
    }
}

/// [`solve_exact`] with an explicit visiting order and no prefix-sum shortcut.
pub fn solve_exact_ordered<K: Kernel + ?Sized>(
    g: &GridFunction,
    kernel: &K,
    order: SweepOrder,
) -> Result<GridFunction> {
    let grid = g.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let order: Box<dyn Iterator<Item = (usize, usize)>> = match order {
        SweepOrder::RowMajor => Box::new((0..n1).flat_map(move |i| (0..n2).map(move |j| (i, j)))),
        SweepOrder::ReversedInner => {
            Box::new((0..n1).flat_map(move |i| (0..n2).rev().map(move |j| (i, j))))
        }
        SweepOrder::ColumnMajor => {
            Box::new((0..n2).flat_map(move |j| (0..n1).map(move |i| (i, j))))
        }
    };
    let mut u = g.clone();
    for (i, j) in order {
        let value = g.get(i, j) + triple_at(&grid, kernel, &u, i, j)?;
        if !value.is_finite() {
            let (x, y) = grid.point(i, j);
            return Err(Error::NonFiniteValue { x, y });
        }
        u.values_mut()[grid.offset(i, j)] = value;
    }
    Ok(u)
}

/// Row-by-row forward solve for kernels that ignore the outer point.
fn solve_inner<K: Kernel + ?Sized>(g: &GridFunction, kernel: &K) -> Result<GridFunction> {
    let grid = g.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let (x0, y0) = grid.origin();
    let mu1 = grid.axis1().graininess();
    let mu2 = grid.axis2().graininess();
    let mut u = vec![0.0; n1 * n2];
    // cum[j] = sum_{eta < x_{i-1}} mu_1(eta) sum_{tau < y_j} K(eta, tau, u) mu_2(tau)
    let mut cum = vec![0.0; n2];
    // row[j] = sum_{tau < y_j} K(x_{i-1}, tau, u) mu_2(tau)
    let mut row = vec![0.0; n2];
    let mut triple = vec![0.0; n2];
    for i in 0..n1 {
        if i > 0 {
            for j in 0..n2 {
                triple[j] += mu1[i - 1] * cum[j];
                cum[j] += mu1[i - 1] * row[j];
            }
        }
        for j in 0..n2 {
            let value = g.get(i, j) + triple[j];
            if !value.is_finite() {
                let (x, y) = grid.point(i, j);
                return Err(Error::NonFiniteValue { x, y });
            }
            u[grid.offset(i, j)] = value;
        }
        if i + 1 < n1 {
            for j in 1..n2 {
                let (eta, tau) = grid.point(i, j - 1);
                let k = kernel.eval(x0, y0, eta, tau, u[grid.offset(i, j - 1)]);
                if !k.is_finite() {
                    return Err(Error::NonFiniteValue { x: eta, y: tau });
                }
                row[j] = row[j - 1] + k * mu2[j - 1];
            }
        }
    }
    GridFunction::from_values(grid, u)
}

/// Picard iteration `u_{n+1} = g + int int int K(., ., eta, tau, u_n)` started at `u0`.
///
/// Stops at the first `n` with `sup |u_{n+1} - u_n| <= tol` and returns `u_{n+1}`
/// together with `max(n, 1)`, the number of sweeps needed to reach the fixed
/// point (the confirming sweep is not counted).
pub fn picard_iterate<K: Kernel + ?Sized>(
    g: &GridFunction,
    kernel: &K,
    u0: &GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<(GridFunction, usize)> {
    picard_iterate_with(g, kernel, u0, tol, max_iter, Strategy::default())
}

pub fn picard_iterate_with<K: Kernel + ?Sized>(
    g: &GridFunction,
    kernel: &K,
    u0: &GridFunction,
    tol: f64,
    max_iter: usize,
    strategy: Strategy,
) -> Result<(GridFunction, usize)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    g.check_same_grid(u0)?;
    let mut current = u0.clone();
    let mut last = f64::INFINITY;
    for n in 0..=max_iter {
        let next = apply_operator(g, kernel, &current, strategy)?;
        last = next.sup_distance(&current)?;
        if last <= tol {
            return Ok((next, n.max(1)));
        }
        current = next;
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        residual: last,
    })
}

/// The least `eps` for which `u` is an `eps`-approximate solution:
/// `sup |u - (g + int int int K(., ., eta, tau, u))|`.
pub fn residual_eps<K: Kernel + ?Sized>(
    u: &GridFunction,
    g: &GridFunction,
    kernel: &K,
) -> Result<f64> {
    residual_eps_with(u, g, kernel, Strategy::default())
}

pub fn residual_eps_with<K: Kernel + ?Sized>(
    u: &GridFunction,
    g: &GridFunction,
    kernel: &K,
    strategy: Strategy,
) -> Result<f64> {
    apply_operator(g, kernel, u, strategy)?.sup_distance(u)
}

/// A grid function paired with its defect against the integral equation.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub u: GridFunction,
    pub epsilon: f64,
}

impl ApproxSolution {
    pub fn new<K: Kernel + ?Sized>(u: GridFunction, g: &GridFunction, kernel: &K) -> Result<Self> {
        let epsilon = residual_eps(&u, g, kernel)?;
        Ok(Self { u, epsilon })
    }
}

/// A-priori estimate for solutions of the equation when
/// `|K(x,y,eta,tau,u) - K(x,y,eta,tau,v)| <= q(x,y) r(eta,tau) |u - v|` and
/// `|g + int int int K(., ., eta, tau, 0)| <= envelope`:
/// `|u| <= envelope + q (int int int r envelope) e_A(x, x0)` with `A = int int r q`.
pub fn a_priori_bound(
    envelope: &GridFunction,
    q: &GridFunction,
    r: &GridFunction,
) -> Result<BoundResult> {
    same_grid(&[envelope, q, r])?;
    let hyps = vec![
        nonnegative("envelope >= 0", envelope),
        nonnegative("q >= 0", q),
        nonnegative("r >= 0", r),
    ];
    let res = BoundResult::evaluate(hyps, || linear_bound_unchecked(envelope, q, r))?;
    Ok(res.with_note("outer factors evaluated at (x, y)"))
}

/// Estimate on `|u1 - u2|` for an `eps1`- and an `eps2`-approximate solution:
/// `(eps1 + eps2) [1 + q (int int int r) e_A(x, x0)]` with `A = int int r q`.
///
/// This is the linear estimate applied to
/// `|u1 - u2| <= (eps1 + eps2) + q int int int r |u1 - u2|`.
pub fn difference_bound(
    eps1: f64,
    eps2: f64,
    q: &GridFunction,
    r: &GridFunction,
) -> Result<BoundResult> {
    same_grid(&[q, r])?;
    let hyps = vec![
        nonnegative_scalar("eps1 >= 0", eps1),
        nonnegative_scalar("eps2 >= 0", eps2),
        nonnegative("q >= 0", q),
        nonnegative("r >= 0", r),
    ];
    let eps = eps1 + eps2;
    let res = BoundResult::evaluate(hyps, || {
        let c = cumulative_triple(r);
        let e = exponential_factor(&r.mul(q)?)?;
        let values = (0..q.values().len())
            .map(|k| eps * (1.0 + q.values()[k] * c.values()[k] * e.values()[k]))
            .collect();
        GridFunction::from_values(q.grid().clone(), values)
    })?;
    Ok(res.with_note(
        "closed form of the linear estimate with free term eps1 + eps2; the unknown difference does not appear",
    ))
}

/// Samples `|K(x,y,eta,tau,u) - K(x,y,eta,tau,v)| <= q(x,y) r(eta,tau) |u - v|`
/// over every outer point `(x, y)` and every inner point with `eta < x`, `tau < y`.
pub fn check_kernel_lipschitz<K: Kernel + ?Sized>(
    kernel: &K,
    q: &GridFunction,
    r: &GridFunction,
    sampling: &Sampling,
) -> Result<HypothesisCheck> {
    sampling.validate()?;
    same_grid(&[q, r])?;
    let grid = q.grid().clone();
    let per_point = try_map_indices(Strategy::default(), grid.len(), |k| {
        let (i, j) = grid.indices(k);
        let (x, y) = grid.point(i, j);
        let mut worst = 0.0_f64;
        let mut passed = true;
        for a in 0..i {
            for b in 0..j {
                let (eta, tau) = grid.point(a, b);
                let slope = q.get(i, j) * r.get(a, b);
                let stream = (k * grid.len() + grid.offset(a, b)) as u64;
                for (u, v) in sampling.ordered_pairs(stream) {
                    let ku = kernel.eval(x, y, eta, tau, u);
                    let kv = kernel.eval(x, y, eta, tau, v);
                    let lhs = (ku - kv).abs();
                    let rhs = slope * (u - v).abs();
                    let violation = lhs - rhs;
                    let slack = CHECK_RTOL * (ku.abs() + kv.abs() + rhs);
                    if !(violation <= slack) {
                        passed = false;
                    }
                    worst = worst.max(if violation.is_nan() {
                        f64::INFINITY
                    } else {
                        violation
                    });
                }
            }
        }
        Ok::<_, Error>((passed, worst))
    })?;
    Ok(HypothesisCheck::new(
        "kernel Lipschitz in u with constant q r",
        per_point.iter().all(|p| p.0),
        per_point.iter().fold(0.0_f64, |m, p| m.max(p.1)),
    ))
}

/// Compares `|g + int int int K(., ., eta, tau, 0)|` with `envelope` pointwise.
pub fn check_envelope<K: Kernel + ?Sized>(
    g: &GridFunction,
    kernel: &K,
    envelope: &GridFunction,
) -> Result<HypothesisCheck> {
    same_grid(&[g, envelope])?;
    let zero_section = zero_section(g, kernel)?;
    let mut passed = true;
    let mut worst = 0.0_f64;
    for (z, p) in zero_section.values().iter().zip(envelope.values()) {
        let excess = z.abs() - p;
        if excess > CHECK_RTOL * p.abs() {
            passed = false;
        }
        worst = worst.max(excess);
    }
    Ok(HypothesisCheck::new(
        "envelope dominates zero section",
        passed,
        worst,
    ))
}

/// `g + int int int K(., ., eta, tau, 0)`.
pub fn zero_section<K: Kernel + ?Sized>(g: &GridFunction, kernel: &K) -> Result<GridFunction> {
    apply_operator(
        g,
        kernel,
        &GridFunction::zeros(g.grid().clone()),
        Strategy::default(),
    )
}
