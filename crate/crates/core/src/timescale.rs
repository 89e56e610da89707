//! Finite time scales, the product grid and functions sampled on it.

use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite time scale: a strictly increasing list of at least two finite points.
///
/// Every point except the maximum is right-scattered, so the forward jump
/// `sigma` moves to the next point and the graininess `mu` is the gap to it.
/// At the maximum `sigma(t) = t` and `mu(t) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    points: Vec<f64>,
}

impl TimeScale {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        for (index, &value) in points.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinitePoint { index, value });
            }
        }
        for (index, w) in points.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NotIncreasing {
                    index: index + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(Self { points })
    }

    /// The integers `lo, lo + 1, ..., hi`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!(
                "empty integer range {lo}..={hi}"
            )));
        }
        Self::new((lo..=hi).map(|k| k as f64).collect())
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        points[n - 1] = hi;
        Self::new(points)
    }

    /// The quantum scale `first * base^i` for `i = 0..n`.
    pub fn geometric(base: f64, first: f64, n: usize) -> Result<Self> {
        if !(base > 1.0) || !(first > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric scale needs base > 1 and first > 0, got base {base}, first {first}"
            )));
        }
        Self::new((0..n).map(|i| first * base.powi(i as i32)).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a time scale has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn get(&self, index: usize) -> f64 {
        self.points[index]
    }

    /// Position of `t` in the scale. Membership is exact equality.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let i = self.points.partition_point(|&p| p < t);
        match self.points.get(i) {
            Some(&p) if p == t => Ok(i),
            _ => Err(Error::NotMember(t)),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.index_of(t).is_ok()
    }

    /// Forward jump of the point at `index`.
    pub fn sigma_at(&self, index: usize) -> f64 {
        self.points[(index + 1).min(self.points.len() - 1)]
    }

    /// Backward jump of the point at `index`.
    pub fn rho_at(&self, index: usize) -> f64 {
        self.points[index.saturating_sub(1)]
    }

    /// Graininess of the point at `index`.
    pub fn mu_at(&self, index: usize) -> f64 {
        self.sigma_at(index) - self.points[index]
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        self.index_of(t).map(|i| self.sigma_at(i))
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        self.index_of(t).map(|i| self.rho_at(i))
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        self.index_of(t).map(|i| self.mu_at(i))
    }

    pub fn is_maximal(&self, t: f64) -> Result<bool> {
        self.index_of(t).map(|i| i + 1 == self.points.len())
    }

    /// All graininess values, `0` at the maximal point.
    pub fn graininess(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.mu_at(i)).collect()
    }

    /// The scale restricted to its first `len` points.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix of length {len} from a scale of {} points",
                self.len()
            )));
        }
        Self::new(self.points[..len].to_vec())
    }

    /// The scale with the point at `index` removed.
    pub fn without(&self, index: usize) -> Result<Self> {
        let mut points = self.points.clone();
        if index >= points.len() {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range"
            )));
        }
        points.remove(index);
        Self::new(points)
    }
}

/// The product domain of two time scales, with origin at their minima.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    axis1: TimeScale,
    axis2: TimeScale,
}

impl Grid2 {
    pub fn new(axis1: TimeScale, axis2: TimeScale) -> Self {
        Self { axis1, axis2 }
    }

    pub fn shared(axis1: TimeScale, axis2: TimeScale) -> Arc<Self> {
        Arc::new(Self::new(axis1, axis2))
    }

    pub fn axis1(&self) -> &TimeScale {
        &self.axis1
    }

    pub fn axis2(&self) -> &TimeScale {
        &self.axis2
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.axis1.min(), self.axis2.min())
    }

    pub fn n1(&self) -> usize {
        self.axis1.len()
    }

    pub fn n2(&self) -> usize {
        self.axis2.len()
    }

    pub fn len(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat row-major offset of `(i, j)`; axis-1 index is the row.
    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        i * self.n2() + j
    }

    /// Inverse of [`Grid2::offset`].
    #[inline]
    pub fn indices(&self, offset: usize) -> (usize, usize) {
        (offset / self.n2(), offset % self.n2())
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.axis1.get(i), self.axis2.get(j))
    }

    /// Grid indices of `(x, y)`, or a membership error.
    pub fn locate(&self, x: f64, y: f64) -> Result<(usize, usize)> {
        Ok((self.axis1.index_of(x)?, self.axis2.index_of(y)?))
    }
}

/// One finite real value per grid point, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid2>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(grid: Arc<Grid2>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let f = Self { grid, values };
        f.ensure_finite()?;
        Ok(f)
    }

    pub fn from_fn(grid: Arc<Grid2>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.n1())
            .flat_map(|i| (0..grid.n2()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, y) = grid.point(i, j);
                f(x, y)
            })
            .collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Arc<Grid2>, c: f64) -> Result<Self> {
        let n = grid.len();
        Self::from_values(grid, vec![c; n])
    }

    pub fn zeros(grid: Arc<Grid2>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub(crate) fn from_raw(grid: Arc<Grid2>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grid(&self) -> &Arc<Grid2> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.offset(i, j)]
    }

    /// Value at the grid point with coordinates `(x, y)`.
    pub fn at(&self, x: f64, y: f64) -> Result<f64> {
        let (i, j) = self.grid.locate(x, y)?;
        Ok(self.get(i, j))
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// First grid point holding a non-finite value, as an error.
    pub fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => {
                let (i, j) = self.grid.indices(k);
                let (x, y) = self.grid.point(i, j);
                Err(Error::NonFiniteValue { x, y })
            }
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid.clone(), values)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup norm.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup norm of the difference to `other`.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Restriction to the leading `n1 x n2` block of the grid.
    pub fn restrict(&self, n1: usize, n2: usize) -> Result<Self> {
        let grid = Grid2::shared(self.grid.axis1().prefix(n1)?, self.grid.axis2().prefix(n2)?);
        let values = (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(Self::from_raw(grid, values))
    }

    /// Partial delta derivative along axis 1 at every non-maximal axis-1 point.
    ///
    /// The result lives on the grid whose axis 1 drops its maximal point; the
    /// jump structure of the remaining points is unchanged, so the operator can
    /// be applied again.
    pub fn delta_1(&self) -> Result<Self> {
        let g = &self.grid;
        let n1 = g.n1();
        let n2 = g.n2();
        let axis1 = g.axis1().prefix(n1 - 1)?;
        let mut values = Vec::with_capacity((n1 - 1) * n2);
        for i in 0..n1 - 1 {
            let mu = g.axis1().mu_at(i);
            for j in 0..n2 {
                values.push((self.get(i + 1, j) - self.get(i, j)) / mu);
            }
        }
        Self::from_values(Grid2::shared(axis1, g.axis2().clone()), values)
    }

    /// Partial delta derivative along axis 2; see [`GridFunction::delta_1`].
    pub fn delta_2(&self) -> Result<Self> {
        let g = &self.grid;
        let n1 = g.n1();
        let n2 = g.n2();
        let axis2 = g.axis2().prefix(n2 - 1)?;
        let mut values = Vec::with_capacity(n1 * (n2 - 1));
        for i in 0..n1 {
            for j in 0..n2 - 1 {
                let mu = g.axis2().mu_at(j);
                values.push((self.get(i, j + 1) - self.get(i, j)) / mu);
            }
        }
        Self::from_values(Grid2::shared(g.axis1().clone(), axis2), values)
    }
}
