//! Per-point comparison of actual values with a bound.

use std::fmt::{self, Write as _};

use deltabound::{GridFunction, HypothesisCheck};

use crate::scenario::Task;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub actual: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub max_margin: f64,
    pub min_margin: f64,
    pub violations: usize,
    /// `max actual / bound` over points with a positive bound.
    pub tightness: f64,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub digest: String,
    pub task: Task,
    pub tolerance: f64,
    pub rows: Vec<Row>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub notes: Vec<String>,
    /// `None` when the bound was refused.
    pub summary: Option<Summary>,
}

/// Relative slack of `bound` over `actual`; `-actual` where the bound vanishes.
pub fn margin(actual: f64, bound: f64) -> f64 {
    if bound == 0.0 {
        -actual
    } else {
        (bound - actual) / bound.abs()
    }
}

impl BoundReport {
    pub fn new(
        digest: String,
        task: Task,
        tolerance: f64,
        hypotheses: Vec<HypothesisCheck>,
        notes: Vec<String>,
        comparison: Option<(GridFunction, GridFunction)>,
    ) -> Self {
        let mut rows = Vec::new();
        let mut summary = None;
        if let Some((actual, bound)) = comparison {
            let grid = actual.grid();
            rows.reserve(grid.len());
            for (k, (&a, &b)) in actual.values().iter().zip(bound.values()).enumerate() {
                let (i, j) = grid.indices(k);
                let (x, y) = grid.point(i, j);
                rows.push(Row {
                    x,
                    y,
                    actual: a,
                    bound: b,
                    margin: margin(a, b),
                });
            }
            summary = Some(summarize(&rows, tolerance));
        }
        Self {
            digest,
            task,
            tolerance,
            rows,
            hypotheses,
            notes,
            summary,
        }
    }

    pub fn hypothesis_failures(&self) -> usize {
        self.hypotheses.iter().filter(|h| !h.passed).count()
    }

    pub fn violations(&self) -> usize {
        self.summary.map_or(0, |s| s.violations)
    }

    pub fn is_clean(&self) -> bool {
        self.hypothesis_failures() == 0 && self.violations() == 0
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("x,y,actual,bound,margin\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                sig17(r.x),
                sig17(r.y),
                sig17(r.actual),
                sig17(r.bound),
                sig17(r.margin)
            )
            .unwrap();
        }
        out
    }
}

fn summarize(rows: &[Row], tolerance: f64) -> Summary {
    let mut s = Summary {
        max_margin: f64::NEG_INFINITY,
        min_margin: f64::INFINITY,
        violations: 0,
        tightness: 0.0,
    };
    for r in rows {
        s.max_margin = s.max_margin.max(r.margin);
        s.min_margin = s.min_margin.min(r.margin);
        if !(r.margin >= -tolerance) {
            s.violations += 1;
        }
        if r.bound > 0.0 {
            s.tightness = s.tightness.max(r.actual / r.bound);
        }
    }
    s
}

/// Decimal with 17 significant digits, enough to round-trip binary64.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} task {}", self.digest, self.task.name())?;
        for h in &self.hypotheses {
            writeln!(f, "  {h}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        match &self.summary {
            Some(s) => write!(
                f,
                "  points {} violations {} min margin {:.6e} max margin {:.6e} tightness {:.15}",
                self.rows.len(),
                s.violations,
                s.min_margin,
                s.max_margin,
                s.tightness
            ),
            None => write!(
                f,
                "  bound refused: {} hypothesis failure(s)",
                self.hypothesis_failures()
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use deltabound::{Grid2, TimeScale};

    fn report(actual: &[f64], bound: &[f64]) -> BoundReport {
        let grid = Grid2::shared(
            TimeScale::integers(0, 1).unwrap(),
            TimeScale::integers(0, 1).unwrap(),
        );
        let a = GridFunction::from_values(grid.clone(), actual.to_vec()).unwrap();
        let b = GridFunction::from_values(grid, bound.to_vec()).unwrap();
        BoundReport::new(
            "d".into(),
            Task::Constant,
            1e-9,
            vec![],
            vec![],
            Some((a, b)),
        )
    }

    #[test]
    fn margins_and_summary() {
        let r = report(&[1.0, 2.0, 0.0, 3.0], &[1.0, 4.0, 0.0, 2.0]);
        assert_eq!(r.rows[1].margin, 0.5);
        assert_eq!(r.rows[2].margin, 0.0);
        let s = r.summary.unwrap();
        assert_eq!(s.violations, 1);
        assert_eq!(s.min_margin, -0.5);
        assert_eq!(s.max_margin, 0.5);
        assert_eq!(s.tightness, 1.5);
        assert!(!r.is_clean());
        let count = r
            .rows
            .iter()
            .filter(|row| row.margin < -r.tolerance)
            .count();
        assert_eq!(count, s.violations);
    }

    #[test]
    fn tolerance_absorbs_rounding() {
        let r = report(&[1.0 + 1e-12, 1.0, 1.0, 1.0], &[1.0; 4]);
        assert_eq!(r.violations(), 0);
        assert!(r.is_clean());
    }

    #[test]
    fn csv_round_trips() {
        let r = report(&[0.1, 1.0 / 3.0, 2.0, 1e-300], &[0.2, 0.5, 2.0, 1.0]);
        let csv = r.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y,actual,bound,margin"));
        for (line, row) in csv.lines().skip(1).zip(&r.rows) {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cells, vec![row.x, row.y, row.actual, row.bound, row.margin]);
        }
        assert_eq!(sig17(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn refused_reports_have_no_rows() {
        let r = BoundReport::new(
            "d".into(),
            Task::Linear,
            1e-9,
            vec![HypothesisCheck::new("p >= 0", false, 1.0)],
            vec![],
            None,
        );
        assert!(r.rows.is_empty());
        assert_eq!(r.hypothesis_failures(), 1);
        assert!(r.to_string().contains("refused"));
    }
}
