mod common;

use common::oracles::{max_rel_diff, naive_double, naive_exp_of_double, naive_triple_grid};
use common::{arb_grid_with, arb_scale};
use deltabound::{
    cumulative_double, cumulative_triple, delta_derivative_1, delta_integral_1d, ts_exp_axis1,
    Grid2, GridFunction, TimeScale,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fundamental_theorem_along_axis1((grid, fs) in arb_grid_with(2, 12, 1, -2.0, 2.0)) {
        let f = &fs[0];
        let big_f = GridFunction::from_fn(grid.clone(), |x, y| {
            let column: Vec<f64> = (0..grid.n1()).map(|i| f.at(grid.axis1().get(i), y).unwrap()).collect();
            delta_integral_1d(grid.axis1(), &column, grid.axis1().min(), x).unwrap()
        }).unwrap();
        for i in 0..grid.n1() - 1 {
            for j in 0..grid.n2() {
                let (x, y) = grid.point(i, j);
                let d = delta_derivative_1(&big_f, x, y).unwrap();
                let want = f.get(i, j);
                prop_assert!((d - want).abs() <= 1e-12 * want.abs().max(big_f.sup_abs()).max(1.0),
                    "at ({x}, {y}): {d} vs {want}");
            }
        }
    }

    #[test]
    fn collapsed_triple_matches_nested_sum((_grid, fs) in arb_grid_with(2, 20, 1, 0.0, 2.0)) {
        let fast = cumulative_triple(&fs[0]);
        let slow = naive_triple_grid(&fs[0]);
        prop_assert!(max_rel_diff(&fast, &slow, 1e-300) <= 1e-12);
    }

    #[test]
    fn double_matches_nested_sum((grid, fs) in arb_grid_with(2, 15, 1, -1.0, 2.0)) {
        let a = cumulative_double(&fs[0]);
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let want = naive_double(&fs[0], i, j);
                prop_assert!((a.get(i, j) - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn exponential_matches_direct_product((grid, fs) in arb_grid_with(2, 12, 1, 0.0, 2.0)) {
        let e = ts_exp_axis1(&cumulative_double(&fs[0])).unwrap();
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let want = naive_exp_of_double(&fs[0], i, j);
                prop_assert!((e.get(i, j) - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn exponential_semigroup((grid, fs) in arb_grid_with(3, 12, 1, 0.0, 2.0), split in 0usize..12) {
        let a = &fs[0];
        let e = ts_exp_axis1(a).unwrap();
        let z = split % grid.n1();
        let head = ts_exp_axis1(&a.restrict((z + 1).max(2), grid.n2()).unwrap()).unwrap();
        for i in z..grid.n1() {
            for j in 0..grid.n2() {
                let tail: f64 = (z..i).map(|s| 1.0 + grid.axis1().mu_at(s) * a.get(s, j)).product();
                let joined = head.get(z, j) * tail;
                prop_assert!((e.get(i, j) - joined).abs() <= 1e-12 * e.get(i, j));
            }
        }
    }

    #[test]
    fn integral_is_additive(ts in arb_scale(3, 15), seed in prop::collection::vec(-3.0..3.0f64, 15), picks in (0usize..15, 0usize..15, 0usize..15)) {
        let f = &seed[..ts.len()];
        let mut idx = [picks.0 % ts.len(), picks.1 % ts.len(), picks.2 % ts.len()];
        idx.sort();
        let (a, b, c) = (ts.get(idx[0]), ts.get(idx[1]), ts.get(idx[2]));
        let whole = delta_integral_1d(&ts, f, a, c).unwrap();
        let parts = delta_integral_1d(&ts, f, a, b).unwrap() + delta_integral_1d(&ts, f, b, c).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + whole.abs()));
    }

    #[test]
    fn exponential_monotone_in_coefficient((_grid, fs) in arb_grid_with(2, 10, 2, 0.0, 2.0)) {
        let lo = &fs[0];
        let hi = lo.zip_with(&fs[1], |a, b| a + b).unwrap();
        let e_lo = ts_exp_axis1(lo).unwrap();
        let e_hi = ts_exp_axis1(&hi).unwrap();
        for (a, b) in e_lo.values().iter().zip(e_hi.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn mixed_derivative_recovers_integrand((grid, fs) in arb_grid_with(4, 12, 2, 0.0, 2.0)) {
        let pu = fs[0].mul(&fs[1]).unwrap();
        let w = cumulative_triple(&pu);
        let d = w.delta_1().unwrap().delta_1().unwrap().delta_2().unwrap();
        for i in 0..grid.n1() - 2 {
            for j in 0..grid.n2() - 1 {
                let want = pu.get(i, j);
                let got = d.get(i, j);
                prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "({i},{j}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn triple_refinement_limit() {
    // int_0^x int_0^s int_0^y c = c x^2 y / 2; left sums converge at first order
    let c = 0.8;
    let mut prev = f64::INFINITY;
    for n in [8usize, 16, 32, 64] {
        let ts = TimeScale::uniform(0.0, 1.0, n + 1).unwrap();
        let g = Grid2::shared(ts.clone(), ts);
        let t = cumulative_triple(&GridFunction::constant(g, c).unwrap());
        let err = (t.get(n, n) - c / 2.0).abs();
        assert!(err < prev);
        // exact: c * (1 - h) / 2 with h = 1/n
        assert!((t.get(n, n) - c * (1.0 - 1.0 / n as f64) / 2.0).abs() < 1e-14);
        prev = err;
    }
}
