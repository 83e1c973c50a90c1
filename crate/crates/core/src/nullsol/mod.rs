//! Numerical null solutions: the contour-integral solution `v` supported in
//! the half-space `{x_1 <= 0}` and the slab-supported solution `u` built from
//! it by solving a Cauchy problem with Gevrey-cutoff data.
//!
//! Scope: d = 2, with `heat` and `schrodinger` as the verified presets;
//! generic operators of order m <= 3 are accepted but experimental.

mod branch;
mod halfspace;
mod slab;

pub use branch::{default_contour, puiseux_branch, ContourSpec, PuiseuxBranch};
pub use halfspace::{auto_sigma_max, hormander_v, v_derivative, v_field, TraceIntegrals};
pub use slab::{slab_solution, SlabParams, SlabSolutionRun};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NullSolError {
    #[error("operator must be bivariate (d = 2), got d = {0}")]
    NotBivariate(usize),
    #[error("branch index {index} out of range for order {m}")]
    BranchIndex { index: usize, m: u32 },
    #[error("root collision along the contour near sigma = {sigma:.6}: separation {separation:e}")]
    RootCollision { sigma: f64, separation: f64 },
    #[error("branch tracking stalled near sigma = {sigma:.6}: {msg}")]
    TrackingFailed { sigma: f64, msg: String },
    #[error("residual {residual:e} exceeds tolerance {tol:e} at sigma = {sigma:.6}")]
    ResidualTooLarge {
        sigma: f64,
        residual: f64,
        tol: f64,
    },
    #[error("contour parameter out of range: {0}")]
    BadContour(String),
    #[error(
        "integrand decay precheck failed: cos(r pi/2) = {decay:.4} cannot dominate \
         |x_d| = {xd:.3} growth at sigma_max = {sigma_max:.1}"
    )]
    DecayPrecheck { decay: f64, xd: f64, sigma_max: f64 },
    #[error("slab parameters invalid: {0}")]
    BadSlabParams(String),
    #[error(transparent)]
    Poly(#[from] crate::polyalg::PolyError),
    #[error(transparent)]
    Data(#[from] crate::funcdata::DataError),
    #[error(transparent)]
    Cauchy(#[from] crate::cauchy::CauchyError),
    #[error(transparent)]
    Roots(#[from] crate::numeric::RootError),
}

/// Rectangular evaluation grid in the `(x_1, x_d)` plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalGrid {
    pub x1_min: f64,
    pub x1_max: f64,
    pub xd_min: f64,
    pub xd_max: f64,
    pub h: f64,
}

impl EvalGrid {
    fn axis(min: f64, max: f64, h: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut x = min;
        while x <= max + 1e-9 * h {
            out.push(x);
            x += h;
        }
        out
    }

    pub fn x1_nodes(&self) -> Vec<f64> {
        Self::axis(self.x1_min, self.x1_max, self.h)
    }

    pub fn xd_nodes(&self) -> Vec<f64> {
        Self::axis(self.xd_min, self.xd_max, self.h)
    }

    /// Largest `|x_d|` on the grid (the slab half-width `B`).
    pub fn xd_bound(&self) -> f64 {
        self.xd_min.abs().max(self.xd_max.abs())
    }
}

/// Complex samples with absolute error estimates, stored per `x_1` column.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub grid: EvalGrid,
    /// `values[i][j]` is the sample at `(x1_nodes[i], xd_nodes[j])`.
    pub values: Vec<Vec<(Complex64, f64)>>,
}

impl SampledField {
    pub fn global_max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportClass {
    Negligible,
    Significant,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnReport {
    pub x1: f64,
    pub max_abs: f64,
    pub max_err: f64,
    pub class: SupportClass,
}

/// Per-column support classification of a sampled field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportReport {
    pub tol_rel: f64,
    pub global_max: f64,
    pub columns: Vec<ColumnReport>,
    /// `[min, max]` of the significant columns, padded by one spacing.
    pub slab_bounds: Option<[f64; 2]>,
}

/// Classify each `x_1` column of the field against `tol_rel * global max`,
/// using the error bars: a column is indeterminate when the bar straddles the
/// threshold.
pub fn support_report(field: &SampledField, tol_rel: f64) -> SupportReport {
    let global_max = field.global_max();
    let threshold = tol_rel * global_max;
    let x1s = field.grid.x1_nodes();
    let mut columns = Vec::with_capacity(field.values.len());
    let mut significant: Vec<f64> = Vec::new();
    for (i, col) in field.values.iter().enumerate() {
        let max_abs = col.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
        let max_err = col.iter().map(|(_, e)| *e).fold(0.0, f64::max);
        let class = if max_abs + max_err <= threshold {
            SupportClass::Negligible
        } else if max_abs - max_err > threshold {
            SupportClass::Significant
        } else {
            SupportClass::Indeterminate
        };
        if class == SupportClass::Significant {
            significant.push(x1s[i]);
        }
        columns.push(ColumnReport {
            x1: x1s[i],
            max_abs,
            max_err,
            class,
        });
    }
    let slab_bounds = if significant.is_empty() {
        None
    } else {
        Some([
            significant.first().unwrap() - field.grid.h,
            significant.last().unwrap() + field.grid.h,
        ])
    };
    SupportReport {
        tol_rel,
        global_max,
        columns,
        slab_bounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> EvalGrid {
        EvalGrid {
            x1_min: -1.0,
            x1_max: 1.0,
            xd_min: 0.0,
            xd_max: 0.0,
            h: 0.5,
        }
    }

    #[test]
    fn all_zero_field_is_negligible() {
        let g = grid();
        let n = g.x1_nodes().len();
        let field = SampledField {
            grid: g,
            values: vec![vec![(Complex64::new(0.0, 0.0), 0.0)]; n],
        };
        let rep = support_report(&field, 1e-3);
        assert!(rep
            .columns
            .iter()
            .all(|c| c.class == SupportClass::Negligible));
        assert!(rep.slab_bounds.is_none());
    }

    #[test]
    fn bump_field_brackets_support() {
        let g = grid();
        let x1s = g.x1_nodes();
        let values: Vec<Vec<(Complex64, f64)>> = x1s
            .iter()
            .map(|&x| {
                let v = if x.abs() < 0.3 { 1.0 } else { 0.0 };
                vec![(Complex64::new(v, 0.0), 1e-9)]
            })
            .collect();
        let field = SampledField { grid: g, values };
        let rep = support_report(&field, 1e-3);
        let b = rep.slab_bounds.unwrap();
        assert!(b[0] <= 0.0 && 0.0 <= b[1]);
        assert!(b[0] >= -1.0 && b[1] <= 1.0);
    }

    #[test]
    fn straddling_error_bar_is_indeterminate() {
        let g = grid();
        let x1s = g.x1_nodes();
        let values: Vec<Vec<(Complex64, f64)>> = x1s
            .iter()
            .enumerate()
            .map(|(i, _)| {
                if i == 0 {
                    vec![(Complex64::new(1.0, 0.0), 0.0)]
                } else {
                    // Exactly at threshold with a bar across it.
                    vec![(Complex64::new(1e-3, 0.0), 1e-4)]
                }
            })
            .collect();
        let field = SampledField { grid: g, values };
        let rep = support_report(&field, 1e-3);
        assert_eq!(rep.columns[1].class, SupportClass::Indeterminate);
    }
}
