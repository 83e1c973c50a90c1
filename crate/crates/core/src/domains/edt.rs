//! Exact Euclidean distance transform by the per-dimension lower-envelope
//! method (Felzenszwalb-Huttenlocher): squared distances in index space, one
//! parabola sweep per axis, then scaled to world units. Ties in the envelope
//! are resolved deterministically by the sweep order.

use super::{DomainError, GridDomain};

/// Grid-aligned distances to the complement (and optionally the window
/// exterior). `f64::INFINITY` marks cells with no complement anywhere.
#[derive(Debug, Clone)]
pub struct DistanceField {
    shape: Vec<usize>,
    spacing: f64,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn value(&self, cell: &[usize]) -> f64 {
        let mut idx = 0;
        for k in (0..self.shape.len()).rev() {
            idx = idx * self.shape[k] + cell[k];
        }
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

/// One-dimensional squared-distance envelope; `f` holds squared distances
/// (INFINITY for non-seeds).
fn envelope_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    // Hull of parabolas: v = vertex indices, z = boundaries.
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    let mut started = false;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        if !started {
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            started = true;
            continue;
        }
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                break;
            }
        }
        if s <= z[k] && k == 0 {
            // Replace the very first parabola.
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            k = 0;
            continue;
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    if !started {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0usize;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *slot = d * d + f[p];
    }
}

/// Exact Euclidean distance transform of `x` to its complement cells'
/// centers; with `exterior_counts`, the window exterior also acts as
/// complement (distance from a center to the nearest window face).
pub fn distance_field(x: &GridDomain, exterior_counts: bool) -> Result<DistanceField, DomainError> {
    let shape = x.shape().to_vec();
    let n: usize = shape.iter().product();
    // Squared distance in index units.
    let mut dist: Vec<f64> = x
        .occupancy()
        .iter()
        .map(|&occ| if occ { f64::INFINITY } else { 0.0 })
        .collect();

    // Sweep each axis with the 1-D envelope over all lines.
    let dim = shape.len();
    let mut strides = vec![1usize; dim];
    for k in 1..dim {
        strides[k] = strides[k - 1] * shape[k - 1];
    }
    for axis in 0..dim {
        let len = shape[axis];
        if len == 1 {
            continue;
        }
        let stride = strides[axis];
        let mut line = vec![0.0f64; len];
        let mut out = vec![0.0f64; len];
        // Iterate all lines along `axis`.
        let outer: usize = n / len;
        for o in 0..outer {
            // Map outer counter to a base offset skipping the swept axis.
            let mut rest = o;
            let mut base = 0usize;
            for k in 0..dim {
                if k == axis {
                    continue;
                }
                let i = rest % shape[k];
                rest /= shape[k];
                base += i * strides[k];
            }
            for i in 0..len {
                line[i] = dist[base + i * stride];
            }
            envelope_1d(&line, &mut out);
            for i in 0..len {
                dist[base + i * stride] = out[i];
            }
        }
    }

    let h = x.spacing();
    let mut values: Vec<f64> = dist
        .iter()
        .map(|&d2| if d2.is_finite() { d2.sqrt() * h } else { f64::INFINITY })
        .collect();

    if exterior_counts {
        for lin in 0..n {
            let cell = x.cell_of_linear(lin);
            let p = x.center(&cell);
            let mut d_ext = f64::INFINITY;
            for k in 0..dim {
                d_ext = d_ext
                    .min(p[k] - x.origin()[k])
                    .min(x.origin()[k] + x.extents()[k] - p[k]);
            }
            if d_ext < values[lin] {
                values[lin] = d_ext;
            }
        }
    }

    Ok(DistanceField {
        shape,
        spacing: h,
        values,
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
    fn half_plane_distance_is_height() {
        // X = {x2 > 0}: d at (x1, y) is y (up to the interior h-offset).
        let dom = rasterize(
            &Shape::Rect {
                min: vec![-10.0, 0.0],
                max: vec![10.0, 10.0],
            },
            &window2(),
            0.1,
        )
        .unwrap();
        let d = distance_field(&dom, false).unwrap();
        let i = dom.slice_index(0.05).unwrap();
        // Distance to the nearest FALSE cell center one row below x2 = 0:
        // a cell at height y has distance y + h/2.
        for (j, expect) in [(25usize, 0.60f64), (30, 1.10), (39, 2.00)] {
            let got = d.value(&[i, j]);
            assert!(
                (got - expect).abs() < 1e-9,
                "row {j}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn punctured_plane_distance_brute_force() {
        let dom = rasterize(
            &Shape::Difference {
                a: Box::new(Shape::Full),
                b: Box::new(Shape::Ball {
                    center: vec![0.0, 0.0],
                    radius: 0.3,
                }),
            },
            &window2(),
            0.25,
        )
        .unwrap();
        let d = distance_field(&dom, false).unwrap();
        // Brute force over complement cells.
        let complement: Vec<Vec<f64>> = (0..dom.cell_count())
            .filter(|&lin| !dom.occupancy()[lin])
            .map(|lin| dom.center(&dom.cell_of_linear(lin)))
            .collect();
        assert!(!complement.is_empty());
        for lin in 0..dom.cell_count() {
            let p = dom.center(&dom.cell_of_linear(lin));
            let brute = complement
                .iter()
                .map(|q| {
                    p.iter()
                        .zip(q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let got = d.value(&dom.cell_of_linear(lin));
            assert!(
                (got - brute).abs() < 1e-9,
                "cell {lin}: {got} vs brute {brute}"
            );
        }
    }

    #[test]
    fn full_window_without_exterior_is_infinite() {
        let dom = rasterize(&Shape::Full, &window2(), 0.5).unwrap();
        let d = distance_field(&dom, false).unwrap();
        assert!(d.values().iter().all(|v| v.is_infinite()));
        // With the exterior counting, distances are to the window faces.
        let d = distance_field(&dom, true).unwrap();
        assert!(d.values().iter().all(|v| v.is_finite()));
        let mid = dom.slice_index(0.0).unwrap();
        assert!((d.value(&[mid, mid]) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn monotone_under_inclusion() {
        // Smaller set -> pointwise smaller distances.
        let big = rasterize(
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.5,
            },
            &window2(),
            0.125,
        )
        .unwrap();
        let small = rasterize(
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            &window2(),
            0.125,
        )
        .unwrap();
        let db = distance_field(&big, false).unwrap();
        let ds = distance_field(&small, false).unwrap();
        for (a, b) in ds.values().iter().zip(db.values()) {
            assert!(a <= b);
        }
    }
}
