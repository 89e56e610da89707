#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use deltabound::{Grid2, GridFunction, TimeScale};
use proptest::prelude::*;

/// Random finite time scale with `lo..=hi` points and gaps in `[0.05, 1.5]`.
pub fn arb_scale(lo: usize, hi: usize) -> impl Strategy<Value = TimeScale> {
    (
        -3.0..3.0f64,
        prop::collection::vec(0.05..1.5f64, (lo - 1)..hi),
    )
        .prop_map(|(start, gaps)| {
            let mut points = vec![start];
            for g in gaps {
                let last = *points.last().unwrap();
                points.push(last + g);
            }
            TimeScale::new(points).unwrap()
        })
}

pub fn arb_grid(lo: usize, hi: usize) -> impl Strategy<Value = Arc<Grid2>> {
    (arb_scale(lo, hi), arb_scale(lo, hi)).prop_map(|(a, b)| Grid2::shared(a, b))
}

/// A grid together with `count` grid functions with values in `[lo, hi]`.
pub fn arb_grid_with(
    n_lo: usize,
    n_hi: usize,
    count: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = (Arc<Grid2>, Vec<GridFunction>)> {
    arb_grid(n_lo, n_hi).prop_flat_map(move |grid| {
        let n = grid.len();
        (
            Just(grid),
            prop::collection::vec(prop::collection::vec(lo..=hi, n), count),
        )
            .prop_map(|(grid, data)| {
                let fs = data
                    .into_iter()
                    .map(|v| GridFunction::from_values(grid.clone(), v).unwrap())
                    .collect();
                (grid, fs)
            })
    })
}
