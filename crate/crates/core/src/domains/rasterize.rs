//! Constructive-geometry specs and their rasterization: cells are marked by
//! the open-set membership of their centers. `difference` subtracts the
//! closure of the second operand, so differences of open sets stay open
//! (removing a closed point-ball from the plane keeps the result open).

use super::{DomainError, GridDomain, Provenance};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Window {
    pub origin: Vec<f64>,
    pub extents: Vec<f64>,
}

impl Window {
    pub fn new(origin: Vec<f64>, extents: Vec<f64>) -> Self {
        Window { origin, extents }
    }

    /// Window with the same center and doubled extents.
    pub fn doubled(&self) -> Window {
        let origin = self
            .origin
            .iter()
            .zip(&self.extents)
            .map(|(o, e)| o - 0.5 * e)
            .collect();
        let extents = self.extents.iter().map(|e| 2.0 * e).collect();
        Window { origin, extents }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Full,
    Empty,
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Rect {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Union {
        of: Vec<Shape>,
    },
    Intersection {
        of: Vec<Shape>,
    },
    Difference {
        a: Box<Shape>,
        b: Box<Shape>,
    },
}

impl Shape {
    /// Open membership (strict inequalities).
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Shape::Full => true,
            Shape::Empty => false,
            Shape::Ball { center, radius } => {
                let d2: f64 = p
                    .iter()
                    .zip(center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum();
                d2 < radius * radius
            }
            Shape::Rect { min, max } => p
                .iter()
                .zip(min.iter().zip(max))
                .all(|(x, (lo, hi))| lo < x && x < hi),
            Shape::Union { of } => of.iter().any(|s| s.contains(p)),
            Shape::Intersection { of } => of.iter().all(|s| s.contains(p)),
            Shape::Difference { a, b } => a.contains(p) && !b.contains_closed(p),
        }
    }

    /// Closed membership (boundary included).
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        match self {
            Shape::Full => true,
            Shape::Empty => false,
            Shape::Ball { center, radius } => {
                let d2: f64 = p
                    .iter()
                    .zip(center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum();
                d2 <= radius * radius
            }
            Shape::Rect { min, max } => p
                .iter()
                .zip(min.iter().zip(max))
                .all(|(x, (lo, hi))| lo <= x && x <= hi),
            Shape::Union { of } => of.iter().any(|s| s.contains_closed(p)),
            Shape::Intersection { of } => of.iter().all(|s| s.contains_closed(p)),
            Shape::Difference { a, b } => a.contains_closed(p) && !b.contains(p),
        }
    }

    /// Restriction to the hyperplane `x_1 = c`, as a shape in the remaining
    /// variables.
    pub fn slice_first(&self, c: f64) -> Shape {
        match self {
            Shape::Full => Shape::Full,
            Shape::Empty => Shape::Empty,
            Shape::Ball { center, radius } => {
                let d = c - center[0];
                let rem = radius * radius - d * d;
                if rem <= 0.0 {
                    Shape::Empty
                } else {
                    Shape::Ball {
                        center: center[1..].to_vec(),
                        radius: rem.sqrt(),
                    }
                }
            }
            Shape::Rect { min, max } => {
                if min[0] < c && c < max[0] {
                    Shape::Rect {
                        min: min[1..].to_vec(),
                        max: max[1..].to_vec(),
                    }
                } else {
                    Shape::Empty
                }
            }
            Shape::Union { of } => Shape::Union {
                of: of.iter().map(|s| s.slice_first(c)).collect(),
            },
            Shape::Intersection { of } => Shape::Intersection {
                of: of.iter().map(|s| s.slice_first(c)).collect(),
            },
            Shape::Difference { a, b } => Shape::Difference {
                a: Box::new(a.slice_first(c)),
                b: Box::new(b.slice_first(c)),
            },
        }
    }

    fn check_dim(&self, dim: usize) -> Result<(), DomainError> {
        match self {
            Shape::Full | Shape::Empty => Ok(()),
            Shape::Ball { center, .. } => {
                if center.len() == dim {
                    Ok(())
                } else {
                    Err(DomainError::BadSpec(format!(
                        "ball center has {} coordinates, window has {dim}",
                        center.len()
                    )))
                }
            }
            Shape::Rect { min, max } => {
                if min.len() == dim && max.len() == dim {
                    Ok(())
                } else {
                    Err(DomainError::BadSpec("rect bounds dimension mismatch".into()))
                }
            }
            Shape::Union { of } | Shape::Intersection { of } => {
                of.iter().try_for_each(|s| s.check_dim(dim))
            }
            Shape::Difference { a, b } => {
                a.check_dim(dim)?;
                b.check_dim(dim)
            }
        }
    }
}

/// Full constructive-geometry description: window + spacing + shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub window: Window,
    pub spacing: f64,
    pub shape: Shape,
}

/// Rasterize a shape: a cell is marked true iff its center lies in the open
/// set. Deterministic by construction.
pub fn rasterize(shape: &Shape, window: &Window, spacing: f64) -> Result<GridDomain, DomainError> {
    let dim = window.origin.len();
    shape.check_dim(dim)?;
    if !(spacing > 0.0) {
        return Err(DomainError::BadSpec("spacing must be positive".into()));
    }
    let shape_counts: Vec<usize> = window
        .extents
        .iter()
        .map(|&e| ((e / spacing).round() as usize).max(1))
        .collect();
    let cells: usize = shape_counts.iter().product();
    let mut occupancy = Vec::with_capacity(cells);
    for lin in 0..cells {
        let mut rest = lin;
        let mut p = Vec::with_capacity(dim);
        for k in 0..dim {
            let i = rest % shape_counts[k];
            rest /= shape_counts[k];
            p.push(window.origin[k] + (i as f64 + 0.5) * spacing);
        }
        occupancy.push(shape.contains(&p));
    }
    GridDomain::new(
        window.origin.clone(),
        window.extents.clone(),
        spacing,
        occupancy,
        Provenance::Geometry(DomainSpec {
            window: window.clone(),
            spacing,
            shape: shape.clone(),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window2() -> Window {
        Window::new(vec![-2.0, -2.0], vec![4.0, 4.0])
    }

    #[test]
    fn ball_rasterization() {
        let dom = rasterize(
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            &window2(),
            0.1,
        )
        .unwrap();
        // Cell with center nearest the origin is inside.
        let idx = dom.slice_index(0.0).unwrap();
        let cell = vec![idx, dom.slice_index(0.0).unwrap()];
        assert!(dom.occupied(&cell));
        // Corner cell is outside.
        assert!(!dom.occupied(&[0, 0]));
    }

    #[test]
    fn punctured_plane() {
        let dom = rasterize(
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
        // The four cells with centers (±0.05, ±0.05) are removed.
        let removed = dom.occupancy().iter().filter(|&&b| !b).count();
        assert_eq!(removed, 4);
    }

    #[test]
    fn empty_spec_all_false() {
        let dom = rasterize(&Shape::Empty, &window2(), 0.5).unwrap();
        assert!(dom.occupancy().iter().all(|&b| !b));
    }

    #[test]
    fn slice_of_ball_is_smaller_ball() {
        let ball = Shape::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        match ball.slice_first(0.6) {
            Shape::Ball { center, radius } => {
                assert_eq!(center, vec![0.0]);
                assert!((radius - 0.8).abs() < 1e-12);
            }
            other => panic!("unexpected slice {other:?}"),
        }
        assert!(matches!(ball.slice_first(1.5), Shape::Empty));
    }
}
