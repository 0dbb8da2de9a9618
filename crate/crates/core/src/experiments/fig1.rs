//! The volume-ratio center over an `(m, d)` grid. No randomness.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::theory::volume_ratio_center;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub m: usize,
    pub d: usize,
    pub center: f64,
}

/// Rows in grid order: outer loop over `m`, inner over `d`.
pub fn run_fig1_surface(m_grid: &[usize], d_grid: &[usize]) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::with_capacity(m_grid.len() * d_grid.len());
    for &m in m_grid {
        for &d in d_grid {
            rows.push(Fig1Row { m, d, center: volume_ratio_center(m, d)? });
        }
    }
    Ok(rows)
}

/// Counts of grid points breaking each qualitative claim.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Fig1Violations {
    pub nonnegative: usize,
    pub decreasing_in_m: usize,
    pub increasing_in_d: usize,
}

impl Fig1Violations {
    pub fn total(&self) -> usize {
        self.nonnegative + self.decreasing_in_m + self.increasing_in_d
    }
}

/// Checks that the center is negative, nondecreasing in `m` and
/// nonincreasing in `d` across the tabulated grid.
pub fn check_fig1_claims(rows: &[Fig1Row]) -> Fig1Violations {
    let table: BTreeMap<(usize, usize), f64> = rows.iter().map(|r| ((r.m, r.d), r.center)).collect();
    let mut by_d: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut by_m: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut v = Fig1Violations::default();
    // BTreeMap iterates in (m, d) order.
    for (&(m, d), &c) in &table {
        if !(c < 0.0) {
            v.nonnegative += 1;
        }
        by_d.entry(d).or_default().push(c);
        by_m.entry(m).or_default().push(c);
    }
    for series in by_d.values() {
        v.decreasing_in_m += series.windows(2).filter(|w| w[1] < w[0]).count();
    }
    for series in by_m.values() {
        v.increasing_in_d += series.windows(2).filter(|w| w[1] > w[0]).count();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn single_point_is_negative() {
        let rows = run_fig1_surface(&[500], &[10]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].center < 0.0);
    }

    #[test]
    fn claims_hold_on_a_small_grid() {
        let rows = run_fig1_surface(&[50, 100, 400], &[1, 5, 20]).unwrap();
        assert_eq!(check_fig1_claims(&rows).total(), 0);
    }

    #[test]
    fn detects_violations() {
        let rows = vec![
            Fig1Row { m: 10, d: 1, center: -0.1 },
            Fig1Row { m: 20, d: 1, center: -0.2 },
            Fig1Row { m: 20, d: 2, center: 0.1 },
        ];
        let v = check_fig1_claims(&rows);
        assert_eq!(v, Fig1Violations { nonnegative: 1, decreasing_in_m: 1, increasing_in_d: 1 });
    }

    #[test]
    fn rejects_d_at_least_m() {
        assert!(matches!(run_fig1_surface(&[10], &[10]), Err(Error::BadShape(_))));
    }
}
