//! Mask ingestion (PGM/PNG grayscale) and witness overlay export.
//!
//! Image row 0 maps to the TOP of the window (image convention), so the
//! domain's second axis is flipped relative to pixel rows. Masks are 2D
//! only.

use super::rasterize::Window;
use super::{DomainError, GridDomain, Provenance, Witness};
use std::path::Path;

/// Load a grayscale mask: a cell is in `X` iff its pixel value (0..=255)
/// exceeds `threshold`. The window's extents fix the spacing via the pixel
/// count (which must make the cells square).
pub fn rasterize_mask_file(
    path: &Path,
    threshold: f64,
    window: &Window,
) -> Result<GridDomain, DomainError> {
    if window.origin.len() != 2 {
        return Err(DomainError::BadSpec("mask ingestion is 2D only".into()));
    }
    let img = image::open(path)
        .map_err(|e| DomainError::Image(e.to_string()))?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(DomainError::Image("empty image".into()));
    }
    let sx = window.extents[0] / w as f64;
    let sy = window.extents[1] / h as f64;
    if (sx - sy).abs() > 1e-9 * sx.max(sy) {
        return Err(DomainError::BadSpec(format!(
            "non-square cells: window/pixel ratios {sx} vs {sy}"
        )));
    }
    let mut occupancy = vec![false; w * h];
    for (px, py, pixel) in img.enumerate_pixels() {
        let x = px as usize;
        let y = h - 1 - py as usize; // flip rows into domain orientation
        occupancy[x + w * y] = pixel.0[0] as f64 > threshold;
    }
    GridDomain::new(
        window.origin.clone(),
        window.extents.clone(),
        sx,
        occupancy,
        Provenance::Mask {
            path: path.display().to_string(),
            threshold,
        },
    )
}

/// Write a 2D domain as an ASCII PGM with an optional witness overlay:
/// background 0, `X`-cells 160, witness cells 255.
pub fn write_overlay_pgm(
    path: &Path,
    domain: &GridDomain,
    witness: Option<&Witness>,
) -> Result<(), DomainError> {
    if domain.dim() != 2 {
        return Err(DomainError::BadSpec("PGM export is 2D only".into()));
    }
    let (w, h) = (domain.shape()[0], domain.shape()[1]);
    let mut marked = vec![false; w * h];
    if let Some(wit) = witness {
        let cells: Vec<Vec<usize>> = match wit {
            Witness::SliceComponent { cells, .. } => cells.clone(),
            Witness::QuasiconcavityTriple { run_axis_cells, .. } => {
                run_axis_cells.iter().cloned().collect()
            }
            Witness::Basin {
                min_cell,
                saddle_cell,
                ..
            } => vec![min_cell.clone(), saddle_cell.clone()],
            Witness::WindowLimited { .. } => Vec::new(),
        };
        for c in cells {
            if c.len() == 2 && c[0] < w && c[1] < h {
                marked[c[0] + w * c[1]] = true;
            } else if c.len() == 1 && c[0] < h {
                // Witness cells from a slice report: paint the whole row.
                for x in 0..w {
                    marked[x + w * c[0]] = true;
                }
            }
        }
    }
    let mut out = String::with_capacity(w * h * 4 + 64);
    out.push_str(&format!("P2\n{w} {h}\n255\n"));
    for row in (0..h).rev() {
        let mut line = Vec::with_capacity(w);
        for col in 0..w {
            let v = if marked[col + w * row] {
                255
            } else if domain.occupied(&[col, row]) {
                160
            } else {
                0
            };
            line.push(v.to_string());
        }
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rasterize::{rasterize, Shape};

    #[test]
    fn pgm_round_trip_through_mask_reader() {
        let window = Window::new(vec![-1.0, -1.0], vec![2.0, 2.0]);
        let dom = rasterize(
            &Shape::Ball {
                center: vec![0.0, 0.0],
                radius: 0.7,
            },
            &window,
            0.1,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("charpde_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ball.pgm");
        write_overlay_pgm(&path, &dom, None).unwrap();
        let back = rasterize_mask_file(&path, 80.0, &window).unwrap();
        assert_eq!(back.shape(), dom.shape());
        assert_eq!(back.occupancy(), dom.occupancy());
    }
}
