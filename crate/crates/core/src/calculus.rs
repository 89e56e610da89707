//! Delta derivatives, delta integrals and the time-scale exponential on finite grids.
//!
//! Every non-maximal point of a finite scale is isolated, so all of these are
//! exact finite expressions: derivatives are forward difference quotients,
//! integrals are `sum f(s) mu(s)` over half-open ranges and the exponential is
//! a finite product.

use crate::error::{Error, Result};
use crate::timescale::{GridFunction, TimeScale};

/// `f^{Delta_1}(x, y) = (f(sigma_1(x), y) - f(x, y)) / mu_1(x)`.
pub fn delta_derivative_1(f: &GridFunction, x: f64, y: f64) -> Result<f64> {
    let grid = f.grid();
    let (i, j) = grid.locate(x, y)?;
    if i + 1 == grid.n1() {
        return Err(Error::MaximalPoint(x));
    }
    Ok((f.get(i + 1, j) - f.get(i, j)) / grid.axis1().mu_at(i))
}

/// `f^{Delta_2}(x, y) = (f(x, sigma_2(y)) - f(x, y)) / mu_2(y)`.
pub fn delta_derivative_2(f: &GridFunction, x: f64, y: f64) -> Result<f64> {
    let grid = f.grid();
    let (i, j) = grid.locate(x, y)?;
    if j + 1 == grid.n2() {
        return Err(Error::MaximalPoint(y));
    }
    Ok((f.get(i, j + 1) - f.get(i, j)) / grid.axis2().mu_at(j))
}

/// Cauchy delta integral `int_a^b f(s) Delta s = sum_{s in [a, b)} f(s) mu(s)`.
pub fn delta_integral_1d(ts: &TimeScale, f: &[f64], a: f64, b: f64) -> Result<f64> {
    if f.len() != ts.len() {
        return Err(Error::LengthMismatch {
            expected: ts.len(),
            got: f.len(),
        });
    }
    let ia = ts.index_of(a)?;
    let ib = ts.index_of(b)?;
    if ia > ib {
        return Err(Error::Ordering { lower: a, upper: b });
    }
    Ok((ia..ib).map(|k| f[k] * ts.mu_at(k)).sum())
}

/// Two-dimensional cumulative delta integral
/// `A(s, y) = sum_{eta in [x0, s)} sum_{tau in [y0, y)} p(eta, tau) mu_1(eta) mu_2(tau)`.
///
/// Built from row prefix sums in a single pass; `A` vanishes on both origin lines.
pub fn cumulative_double(p: &GridFunction) -> GridFunction {
    let grid = p.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mu1 = grid.axis1().graininess();
    let mu2 = grid.axis2().graininess();
    let mut out = vec![0.0; n1 * n2];
    for i in 0..n1 - 1 {
        // row[j] = mu_1(i) * sum_{b < j} p(i, b) mu_2(b)
        let mut row = 0.0;
        for j in 1..n2 {
            row += p.get(i, j - 1) * mu2[j - 1];
            out[grid.offset(i + 1, j)] = out[grid.offset(i, j)] + mu1[i] * row;
        }
    }
    GridFunction::from_raw(grid, out)
}

/// Triple cumulative delta integral
/// `T(x, y) = int_{x0}^{x} int_{x0}^{s} int_{y0}^{y} F(eta, tau) Delta tau Delta eta Delta s`.
///
/// Uses the order-swapped form
/// `T(x, y) = sum_{eta < x} mu_1(eta) (x - sigma_1(eta)) sum_{tau < y} F(eta, tau) mu_2(tau)`,
/// where the outer `s`-integral has collapsed to the weight `x - sigma_1(eta)`.
/// The weights are accumulated one axis-1 step at a time
/// (`x_{i+1} - sigma(eta) = (x_i - sigma(eta)) + mu_1(x_i)`), which keeps the whole
/// evaluation `O(n1 n2)` and free of cancellation for nonnegative `F`.
pub fn cumulative_triple(f: &GridFunction) -> GridFunction {
    let grid = f.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mu1 = grid.axis1().graininess();
    let mu2 = grid.axis2().graininess();
    // inner[j] = sum_{eta < x_i} mu_1(eta) sum_{tau < y_j} F(eta, tau) mu_2(tau)
    let mut inner = vec![0.0; n2];
    let mut out = vec![0.0; n1 * n2];
    for i in 0..n1 - 1 {
        // Weight of every eta < x_i grows by mu_1(x_i) when x moves to sigma(x_i);
        // eta = x_i itself enters with weight sigma(x_i) - sigma(x_i) = 0.
        for j in 0..n2 {
            out[grid.offset(i + 1, j)] = out[grid.offset(i, j)] + mu1[i] * inner[j];
        }
        let mut row = 0.0;
        for j in 1..n2 {
            row += f.get(i, j - 1) * mu2[j - 1];
            inner[j] += mu1[i] * row;
        }
    }
    GridFunction::from_raw(grid, out)
}

/// Time-scale exponential along axis 1 with a `y`-dependent coefficient:
/// `E(x, y) = prod_{s in [x0, x)} (1 + mu_1(s) a(s, y))`, `E(x0, y) = 1`.
///
/// Fails with [`Error::NotRegressive`] at the first factor that is not positive.
pub fn ts_exp_axis1(a: &GridFunction) -> Result<GridFunction> {
    let grid = a.grid().clone();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut out = vec![1.0; n1 * n2];
    for i in 0..n1 - 1 {
        let mu = grid.axis1().mu_at(i);
        for j in 0..n2 {
            let factor = 1.0 + mu * a.get(i, j);
            if !(factor > 0.0) {
                let (x, y) = grid.point(i, j);
                return Err(Error::NotRegressive { x, y, factor });
            }
            out[grid.offset(i + 1, j)] = out[grid.offset(i, j)] * factor;
        }
    }
    GridFunction::from_values(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::Grid2;
    use std::sync::Arc;

    fn zgrid(n1: i64, n2: i64) -> Arc<Grid2> {
        Grid2::shared(
            TimeScale::integers(0, n1).unwrap(),
            TimeScale::integers(0, n2).unwrap(),
        )
    }

    #[test]
    fn derivative_examples() {
        let g = zgrid(3, 3);
        let f = GridFunction::from_fn(g.clone(), |x, _| x).unwrap();
        assert_eq!(delta_derivative_1(&f, 1.0, 2.0), Ok(1.0));
        let sq = GridFunction::from_fn(zgrid(3, 1), |x, _| x * x).unwrap();
        assert_eq!(delta_derivative_1(&sq, 1.0, 0.0), Ok(3.0));
        let c = GridFunction::constant(g.clone(), 4.2).unwrap();
        for x in 0..3 {
            for y in 0..4 {
                assert_eq!(delta_derivative_1(&c, x as f64, y as f64), Ok(0.0));
                assert_eq!(delta_derivative_2(&c, y as f64, x as f64), Ok(0.0));
            }
        }
        let fy = GridFunction::from_fn(g, |_, y| y).unwrap();
        assert_eq!(delta_derivative_2(&fy, 3.0, 0.0), Ok(1.0));

        let xy_grid = Grid2::shared(
            TimeScale::integers(0, 1).unwrap(),
            TimeScale::new(vec![0.0, 2.0, 3.0]).unwrap(),
        );
        let xy = GridFunction::from_fn(xy_grid, |x, y| x * y).unwrap();
        assert_eq!(delta_derivative_2(&xy, 1.0, 2.0), Ok(1.0));
    }

    #[test]
    fn derivative_at_maximal_point_is_an_error() {
        let f = GridFunction::zeros(zgrid(3, 2));
        assert_eq!(
            delta_derivative_1(&f, 3.0, 0.0),
            Err(Error::MaximalPoint(3.0))
        );
        assert_eq!(
            delta_derivative_2(&f, 0.0, 2.0),
            Err(Error::MaximalPoint(2.0))
        );
        assert_eq!(delta_derivative_1(&f, 0.5, 0.0), Err(Error::NotMember(0.5)));
    }

    #[test]
    fn integral_examples() {
        let ts = TimeScale::new(vec![0.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(delta_integral_1d(&ts, &[1.0; 4], 0.0, 2.0), Ok(2.0));
        let z = TimeScale::integers(0, 3).unwrap();
        assert_eq!(
            delta_integral_1d(&z, &[0.0, 1.0, 2.0, 3.0], 0.0, 3.0),
            Ok(3.0)
        );
        assert_eq!(delta_integral_1d(&ts, &[7.0; 4], 0.5, 0.5), Ok(0.0));
        assert!(matches!(
            delta_integral_1d(&ts, &[1.0; 4], 1.0, 0.5),
            Err(Error::Ordering { .. })
        ));
        assert!(delta_integral_1d(&ts, &[1.0; 3], 0.0, 1.0).is_err());
    }

    #[test]
    fn cumulative_double_examples() {
        let g = zgrid(4, 4);
        let a = cumulative_double(&GridFunction::constant(g.clone(), 1.0).unwrap());
        for i in 0..5usize {
            for j in 0..5 {
                assert_eq!(a.get(i, j), (i * j) as f64);
            }
        }
        let zero = cumulative_double(&GridFunction::zeros(g));
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cumulative_double_refinement_limit() {
        for n in [8usize, 32, 128] {
            let ts = TimeScale::uniform(0.0, 1.0, n + 1).unwrap();
            let g = Grid2::shared(ts.clone(), ts);
            let a = cumulative_double(&GridFunction::constant(g, 1.5).unwrap());
            assert!((a.get(n, n) - 1.5).abs() < 1e-12);
            assert!((a.get(n / 2, n) - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_triple_examples() {
        let g = zgrid(4, 4);
        let t = cumulative_triple(&GridFunction::constant(g.clone(), 1.0).unwrap());
        assert_eq!(t.at(3.0, 2.0), Ok(6.0));
        for i in 0..5usize {
            for j in 0..5 {
                let expected = (j * i * i.saturating_sub(1) / 2) as f64;
                assert_eq!(t.get(i, j), expected);
            }
            assert_eq!(t.get(i, 0), 0.0);
            assert_eq!(t.get(0, i), 0.0);
        }
        let zero = cumulative_triple(&GridFunction::zeros(g));
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exponential_examples() {
        let g = zgrid(3, 2);
        let one = ts_exp_axis1(&GridFunction::zeros(g.clone())).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let e = ts_exp_axis1(&GridFunction::constant(g, 1.0).unwrap()).unwrap();
        assert_eq!(e.at(3.0, 1.0), Ok(8.0));
        assert_eq!(e.at(0.0, 2.0), Ok(1.0));
    }

    #[test]
    fn exponential_compound_limit() {
        let c = 0.7;
        let mut prev_err = f64::INFINITY;
        for n in [16usize, 64, 256, 1024] {
            let ts = TimeScale::uniform(0.0, 1.0, n + 1).unwrap();
            let g = Grid2::shared(ts, TimeScale::integers(0, 1).unwrap());
            let e = ts_exp_axis1(&GridFunction::constant(g, c).unwrap()).unwrap();
            let err = (e.get(n, 0) - c.exp()).abs();
            // (1 + c/n)^n -> e^c from below with error ~ c^2 e^c / (2n)
            assert!(e.get(n, 0) < c.exp());
            assert!(err < prev_err);
            assert!(err * n as f64 <= c * c * c.exp() / 2.0 * 1.01);
            prev_err = err;
        }
    }

    #[test]
    fn regressivity_violation_names_the_point() {
        let g = Grid2::shared(
            TimeScale::new(vec![0.0, 0.5, 2.0]).unwrap(),
            TimeScale::integers(0, 1).unwrap(),
        );
        let a = GridFunction::from_fn(g, |x, y| if x == 0.5 && y == 1.0 { -1.0 } else { -0.1 })
            .unwrap();
        match ts_exp_axis1(&a) {
            Err(Error::NotRegressive { x, y, factor }) => {
                assert_eq!((x, y), (0.5, 1.0));
                assert_eq!(factor, -0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
