//! Connected-component labeling (face adjacency) of complement cells, per
//! characteristic slice or on whole spatial grids.

use super::{DomainError, GridDomain};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// One connected component of `(complement of X1)` cells, with its
//  boundedness and X2-containment flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceComponent {
    /// Cell indices in the (sliced) grid.
    pub cells: Vec<Vec<usize>>,
    /// Touches no window boundary (window contact implies "unbounded").
    pub bounded: bool,
    /// Every cell lies in X2.
    pub contained_in_x2: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceComponentReport {
    /// Slice coordinate (cell-center abscissa actually used).
    pub c: f64,
    pub slice_index: usize,
    pub components: Vec<SliceComponent>,
}

/// Face-adjacency components of the complement of `x1` (cells false in
/// `x1`), with containment evaluated against `x2`. Both grids must share
/// layout; `x1 ⊆ x2` is enforced by the public callers.
pub fn complement_components(
    x1: &GridDomain,
    x2: &GridDomain,
) -> Result<Vec<SliceComponent>, DomainError> {
    if !x1.same_layout(x2) {
        return Err(DomainError::GridMismatch);
    }
    let n = x1.cell_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] || x1.occupancy()[start] {
            continue;
        }
        let mut cells = Vec::new();
        let mut bounded = true;
        let mut contained = true;
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(lin) = queue.pop_front() {
            let cell = x1.cell_of_linear(lin);
            if x1.on_window_boundary(&cell) {
                bounded = false;
            }
            if !x2.occupancy()[lin] {
                contained = false;
            }
            for nb in x1.neighbors(&cell) {
                let nlin = x1.linear_index(&nb);
                if !seen[nlin] && !x1.occupancy()[nlin] {
                    seen[nlin] = true;
                    queue.push_back(nlin);
                }
            }
            cells.push(cell);
        }
        cells.sort();
        components.push(SliceComponent {
            cells,
            bounded,
            contained_in_x2: contained,
        });
    }
    Ok(components)
}

/// Components of `(ℝ^d \ X1) ∩ {x_1 = c}` with boundedness and
/// X2-containment flags. Characteristic slices are orthogonal to the first
/// axis in the normalized frame.
pub fn slice_components(
    x1: &GridDomain,
    x2: &GridDomain,
    c: f64,
) -> Result<SliceComponentReport, DomainError> {
    if !x1.same_layout(x2) {
        return Err(DomainError::GridMismatch);
    }
    x1.subset_of(x2)?;
    let index = x1.slice_index(c)?;
    let s1 = x1.slice_at(index);
    let s2 = x2.slice_at(index);
    let components = complement_components(&s1, &s2)?;
    Ok(SliceComponentReport {
        c: x1.slice_coordinate(index),
        slice_index: index,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rasterize::{rasterize, Shape, Window};

    fn window2() -> Window {
        Window::new(vec![-2.0, -2.0], vec![4.0, 4.0])
    }

    #[test]
    fn punctured_plane_slice_has_bounded_component() {
        let x1 = rasterize(
            &Shape::Difference {
                a: Box::new(Shape::Full),
                b: Box::new(Shape::Ball {
                    center: vec![0.0, 0.0],
                    radius: 0.08,
                }),
            },
            &window2(),
            0.1,
        )
        .unwrap();
        let x2 = rasterize(&Shape::Full, &window2(), 0.1).unwrap();
        let report = slice_components(&x1, &x2, 0.05).unwrap();
        assert_eq!(report.components.len(), 1);
        let comp = &report.components[0];
        assert!(comp.bounded);
        assert!(comp.contained_in_x2);
        assert_eq!(comp.cells.len(), 2);
    }

    #[test]
    fn half_plane_slice_component_unbounded() {
        let x1 = rasterize(
            &Shape::Rect {
                min: vec![-10.0, 0.0],
                max: vec![10.0, 10.0],
            },
            &window2(),
            0.1,
        )
        .unwrap();
        let x2 = rasterize(&Shape::Full, &window2(), 0.1).unwrap();
        let report = slice_components(&x1, &x2, 0.3).unwrap();
        assert_eq!(report.components.len(), 1);
        assert!(!report.components[0].bounded);
    }

    #[test]
    fn slice_missing_complement_is_empty() {
        let x1 = rasterize(&Shape::Full, &window2(), 0.1).unwrap();
        let x2 = rasterize(&Shape::Full, &window2(), 0.1).unwrap();
        let report = slice_components(&x1, &x2, 0.0).unwrap();
        assert!(report.components.is_empty());
    }

    #[test]
    fn containment_enforced() {
        let x1 = rasterize(&Shape::Full, &window2(), 0.1).unwrap();
        let x2 = rasterize(
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            &window2(),
            0.1,
        )
        .unwrap();
        assert!(matches!(
            slice_components(&x1, &x2, 0.0),
            Err(DomainError::ContainmentViolated { .. })
        ));
    }
}
