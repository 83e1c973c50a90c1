//! Rasterized-domain geometry: occupancy grids for open sets, exact
//! Euclidean distance fields, characteristic-slice component analysis, and
//! the Runge-pair / P-convexity verdicts.
//!
//! Conventions: a [`GridDomain`] covers an axis-aligned window with cells of
//! spacing `h`; cell centers sit at `origin + (i + 1/2) h`. The open set `X`
//! is the union of the open cells marked true. Connectivity is always face
//! adjacency (4-neighborhood in 2D, 6 in 3D), so complement components never
//! leak diagonally. A complement component touching the window boundary is
//! classified unbounded; the window is a computational device, not part of
//! the geometry.

mod checks;
mod components;
mod edt;
mod io;
mod rasterize;

pub use checks::{
    escape_path_check, p_convexity_check, p_convexity_check_with_tol, quasiconcave_1d,
    runge_pair_check, tube_check, EscapeOutcome, QuasiResult,
};
pub use components::{complement_components, slice_components, SliceComponent, SliceComponentReport};
pub use edt::{distance_field, DistanceField};
pub use io::{rasterize_mask_file, write_overlay_pgm};
pub use rasterize::{rasterize, DomainSpec, Shape, Window};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("bad domain spec: {0}")]
    BadSpec(String),
    #[error("domains must share window, spacing, and dimension")]
    GridMismatch,
    #[error("containment X1 ⊆ X2 violated at cell {cell:?}")]
    ContainmentViolated { cell: Vec<usize> },
    #[error("escape gate violated: d_X(x) = {d_start} not below dist(K, X^c) = {k_dist}")]
    GateViolated { d_start: f64, k_dist: f64 },
    #[error("slice coordinate {0} outside the window")]
    SliceOutOfRange(f64),
    #[error("cell index {cell:?} invalid: {msg}")]
    BadCell { cell: Vec<usize>, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("image error: {0}")]
    Image(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Where a grid came from; geometric provenance allows window-doubling
/// reruns for boundary-ambiguous verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Provenance {
    Geometry(rasterize::DomainSpec),
    Mask { path: String, threshold: f64 },
    Synthetic,
}

/// Rasterized open set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDomain {
    dim: usize,
    origin: Vec<f64>,
    extents: Vec<f64>,
    spacing: f64,
    shape: Vec<usize>,
    occupancy: Vec<bool>,
    provenance: Provenance,
}

impl GridDomain {
    pub fn new(
        origin: Vec<f64>,
        extents: Vec<f64>,
        spacing: f64,
        occupancy: Vec<bool>,
        provenance: Provenance,
    ) -> Result<Self, DomainError> {
        let dim = origin.len();
        if dim == 0 || dim > 3 || extents.len() != dim {
            return Err(DomainError::BadSpec(format!(
                "dimension must be 1..=3, got origin len {dim} / extents len {}",
                extents.len()
            )));
        }
        if !(spacing > 0.0) || extents.iter().any(|&e| e <= 0.0) {
            return Err(DomainError::BadSpec(
                "window extents and spacing must be positive".into(),
            ));
        }
        let shape: Vec<usize> = extents
            .iter()
            .map(|&e| ((e / spacing).round() as usize).max(1))
            .collect();
        let cells: usize = shape.iter().product();
        if occupancy.len() != cells {
            return Err(DomainError::BadSpec(format!(
                "occupancy length {} does not match shape {:?}",
                occupancy.len(),
                shape
            )));
        }
        Ok(GridDomain {
            dim,
            origin,
            extents,
            spacing,
            shape,
            occupancy,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn cell_count(&self) -> usize {
        self.occupancy.len()
    }

    pub fn linear_index(&self, cell: &[usize]) -> usize {
        debug_assert_eq!(cell.len(), self.dim);
        let mut idx = 0;
        for k in (0..self.dim).rev() {
            idx = idx * self.shape[k] + cell[k];
        }
        idx
    }

    pub fn cell_of_linear(&self, mut idx: usize) -> Vec<usize> {
        let mut cell = vec![0usize; self.dim];
        for k in 0..self.dim {
            cell[k] = idx % self.shape[k];
            idx /= self.shape[k];
        }
        cell
    }

    pub fn is_inside(&self, cell: &[usize]) -> bool {
        cell.len() == self.dim && cell.iter().zip(&self.shape).all(|(&c, &s)| c < s)
    }

    pub fn occupied(&self, cell: &[usize]) -> bool {
        self.occupancy[self.linear_index(cell)]
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    /// World coordinates of a cell center.
    pub fn center(&self, cell: &[usize]) -> Vec<f64> {
        cell.iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + (i as f64 + 0.5) * self.spacing)
            .collect()
    }

    /// Cell touching the window boundary (some index at 0 or shape-1)?
    pub fn on_window_boundary(&self, cell: &[usize]) -> bool {
        cell.iter()
            .zip(&self.shape)
            .any(|(&c, &s)| c == 0 || c + 1 == s)
    }

    pub fn same_layout(&self, other: &GridDomain) -> bool {
        self.dim == other.dim
            && self.shape == other.shape
            && self.spacing == other.spacing
            && self
                .origin
                .iter()
                .zip(&other.origin)
                .all(|(a, b)| (a - b).abs() < 1e-9 * self.spacing)
    }

    /// Cell-wise containment `self ⊆ other`.
    pub fn subset_of(&self, other: &GridDomain) -> Result<(), DomainError> {
        if !self.same_layout(other) {
            return Err(DomainError::GridMismatch);
        }
        for (i, (&a, &b)) in self.occupancy.iter().zip(&other.occupancy).enumerate() {
            if a && !b {
                return Err(DomainError::ContainmentViolated {
                    cell: self.cell_of_linear(i),
                });
            }
        }
        Ok(())
    }

    /// Index of the slice `x_1 = c` (nearest column of cell centers).
    pub fn slice_index(&self, c: f64) -> Result<usize, DomainError> {
        let rel = (c - self.origin[0]) / self.spacing - 0.5;
        let idx = rel.round();
        if idx < -0.501 || idx > self.shape[0] as f64 - 0.499 {
            return Err(DomainError::SliceOutOfRange(c));
        }
        Ok((idx.max(0.0) as usize).min(self.shape[0] - 1))
    }

    /// The slice `x_1 = c` as a (d-1)-dimensional grid (occupancy copied).
    pub fn slice_at(&self, index: usize) -> GridDomain {
        assert!(self.dim >= 2, "slicing requires d >= 2");
        let sub_shape: Vec<usize> = self.shape[1..].to_vec();
        let cells: usize = sub_shape.iter().product();
        let mut occupancy = Vec::with_capacity(cells);
        for lin in 0..cells {
            let mut rest = lin;
            let mut cell = Vec::with_capacity(self.dim);
            cell.push(index);
            for k in 0..self.dim - 1 {
                cell.push(rest % sub_shape[k]);
                rest /= sub_shape[k];
            }
            occupancy.push(self.occupied(&cell));
        }
        GridDomain {
            dim: self.dim - 1,
            origin: self.origin[1..].to_vec(),
            extents: self.extents[1..].to_vec(),
            spacing: self.spacing,
            shape: sub_shape,
            occupancy,
            provenance: Provenance::Synthetic,
        }
    }

    /// Coordinate of slice `index` along the first axis.
    pub fn slice_coordinate(&self, index: usize) -> f64 {
        self.origin[0] + (index as f64 + 0.5) * self.spacing
    }

    /// Face neighbors within the grid.
    pub fn neighbors(&self, cell: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            if cell[k] > 0 {
                let mut n = cell.to_vec();
                n[k] -= 1;
                out.push(n);
            }
            if cell[k] + 1 < self.shape[k] {
                let mut n = cell.to_vec();
                n[k] += 1;
                out.push(n);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    RungePair,
    PConvex,
    Tube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

/// Witness geometry attached to failing (or ambiguous) verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A compact complement component inside `X_2`, on slice `x_1 = c`.
    SliceComponent {
        c: f64,
        component: usize,
        cells: Vec<Vec<usize>>,
    },
    /// Interior dip of `d_X` along a slice run: indices and values at
    /// `i < j < k`.
    QuasiconcavityTriple {
        c: f64,
        run_axis_cells: [Vec<usize>; 3],
        values: [f64; 3],
    },
    /// A basin of `d_X` in a 2D slice whose escape saddle exceeds its
    /// minimum (d = 3 check).
    Basin {
        c: f64,
        min_cell: Vec<usize>,
        saddle_cell: Vec<usize>,
        depth: f64,
    },
    /// Component whose boundedness is cut off by the window.
    WindowLimited { c: f64, component: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(kind: VerdictKind) -> Self {
        Verdict {
            kind,
            outcome: Outcome::Pass,
            witness: None,
        }
    }

    pub fn fail(kind: VerdictKind, witness: Witness) -> Self {
        Verdict {
            kind,
            outcome: Outcome::Fail,
            witness: Some(witness),
        }
    }

    pub fn indeterminate(kind: VerdictKind, witness: Witness) -> Self {
        Verdict {
            kind,
            outcome: Outcome::Indeterminate,
            witness: Some(witness),
        }
    }
}
