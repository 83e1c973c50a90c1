pub mod analyze;
pub mod cauchy;
pub mod geometry;
pub mod nullsolution;

use charpde::polyalg::{parse_poly, MultiPoly};
use std::error::Error;

/// Operator presets: the two showcase operators, or an explicit symbol.
pub fn resolve_operator(
    op: Option<&str>,
    poly: Option<&str>,
    dim: usize,
) -> Result<MultiPoly, Box<dyn Error>> {
    let text = match (op, poly) {
        (Some(name), None) => match name {
            "heat" => "i*x1 + x2^2",
            "schrodinger" => "-x1 + x2^2",
            other => return Err(format!("unknown preset '{other}' (heat|schrodinger)").into()),
        },
        (None, Some(text)) => text,
        (Some(_), Some(_)) => {
            return Err("give either --op or --poly, not both".into());
        }
        (None, None) => return Err("missing operator: use --op or --poly".into()),
    };
    Ok(parse_poly(text, dim)?)
}

/// Parse "min,max,min,max,h" into an evaluation grid.
pub fn parse_grid(text: &str) -> Result<charpde::nullsol::EvalGrid, Box<dyn Error>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad grid '{text}': {e}"))?;
    if parts.len() != 5 {
        return Err(format!("grid must be x1min,x1max,xdmin,xdmax,h, got '{text}'").into());
    }
    Ok(charpde::nullsol::EvalGrid {
        x1_min: parts[0],
        x1_max: parts[1],
        xd_min: parts[2],
        xd_max: parts[3],
        h: parts[4],
    })
}
