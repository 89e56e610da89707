//! Brute-force reference computations written straight from the definitions:
//! nested delta sums in the stated `Delta tau Delta eta Delta s` order, no prefix
//! sums and no order swap.
#![allow(dead_code)]

use std::sync::Arc;

use deltabound::{Grid2, GridFunction};

/// `int_{x0}^{x} int_{y0}^{y} f` at grid indices `(i, j)`.
pub fn naive_double(f: &GridFunction, i: usize, j: usize) -> f64 {
    let g = f.grid();
    let mut total = 0.0;
    for a in 0..i {
        let mut inner = 0.0;
        for b in 0..j {
            inner += f.get(a, b) * g.axis2().mu_at(b);
        }
        total += inner * g.axis1().mu_at(a);
    }
    total
}

/// `int_{x0}^{x} int_{x0}^{s} int_{y0}^{y} f` at `(i, j)`.
pub fn naive_triple(f: &GridFunction, i: usize, j: usize) -> f64 {
    let g = f.grid();
    let mut total = 0.0;
    for s in 0..i {
        total += naive_double(f, s, j) * g.axis1().mu_at(s);
    }
    total
}

pub fn naive_triple_grid(f: &GridFunction) -> GridFunction {
    let g = f.grid().clone();
    let values = (0..g.len())
        .map(|k| {
            let (i, j) = g.indices(k);
            naive_triple(f, i, j)
        })
        .collect();
    GridFunction::from_values(g, values).unwrap()
}

/// `prod_{s < x} (1 + mu_1(s) a(s, y))` with `a = int int coef`, everything recomputed per point.
pub fn naive_exp_of_double(coef: &GridFunction, i: usize, j: usize) -> f64 {
    let g = coef.grid();
    (0..i)
        .map(|s| 1.0 + g.axis1().mu_at(s) * naive_double(coef, s, j))
        .product()
}

/// Solves `u = g + int int int K(x, y, eta, tau, u)` by forward recursion on the
/// definitional triple sum.
pub fn naive_solve(g: &GridFunction, k: &dyn Fn(f64, f64, f64, f64, f64) -> f64) -> GridFunction {
    let grid: Arc<Grid2> = g.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut u = vec![0.0; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            let (x, y) = grid.point(i, j);
            let mut total = 0.0;
            for s in 0..i {
                let mut mid = 0.0;
                for a in 0..s {
                    let mut inner = 0.0;
                    for b in 0..j {
                        let (eta, tau) = grid.point(a, b);
                        inner += k(x, y, eta, tau, u[a * n2 + b]) * grid.axis2().mu_at(b);
                    }
                    mid += inner * grid.axis1().mu_at(a);
                }
                total += mid * grid.axis1().mu_at(s);
            }
            u[i * n2 + j] = g.get(i, j) + total;
        }
    }
    GridFunction::from_values(grid, u).unwrap()
}

/// Largest pointwise relative disagreement, with magnitudes below `floor` treated as `floor`.
pub fn max_rel_diff(a: &GridFunction, b: &GridFunction, floor: f64) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}
