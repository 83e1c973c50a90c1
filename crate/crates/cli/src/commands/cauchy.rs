use super::{parse_grid, resolve_operator};
use crate::report::{emit_json, envelope, write_csv};
use charpde::cauchy::{
    c_op_explicit, c_op_recursive, cauchy_solve, verify_prep_identity,
};
use charpde::funcdata::CauchyData;
use charpde::polyalg::{parse_poly, slab_decompose};
use clap::Args;
use serde::Serialize;
use std::error::Error;
use std::path::PathBuf;

#[derive(Args, Serialize, Clone)]
pub struct CauchyArgs {
    /// Operator preset (heat | schrodinger).
    #[arg(long)]
    pub op: Option<String>,
    /// Operator symbol, e.g. "i*x1 + x2^2".
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Boundary data as "h0=<poly>;h1=<poly>;..." in x1..x{d-1}
    /// (missing orders default to zero).
    #[arg(long)]
    pub data: Option<String>,
    /// Boundary data as a JSON array of symbolic Cauchy data.
    #[arg(long)]
    pub data_json: Option<PathBuf>,
    /// Series truncation order.
    #[arg(long, default_value_t = 12)]
    pub n: u32,
    /// Evaluation grid "x1min,x1max,xdmin,xdmax,h" (d = 2 sampling).
    #[arg(long)]
    pub grid: Option<String>,
    /// Also check recursion == explicit formula for all l <= lmax.
    #[arg(long, default_value_t = false)]
    pub verify_explicit: bool,
    #[arg(long, default_value_t = 12)]
    pub lmax: u32,
    /// CSV output of grid samples (x1, xd, re, im).
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct IdentityReport {
    l_range: [u32; 2],
    max_abs_residual: f64,
    exact: bool,
}

#[derive(Serialize)]
struct CauchyBody {
    truncation: u32,
    terminated: bool,
    traces_exact: bool,
    prep_identity: IdentityReport,
    explicit_check: Option<IdentityReport>,
    pde_residual_exact: Option<bool>,
    samples_written: Option<usize>,
}

fn parse_data(
    text: &str,
    dim_boundary: usize,
    m: usize,
) -> Result<Vec<CauchyData>, Box<dyn Error>> {
    let mut data = vec![CauchyData::zero(dim_boundary, charpde::polyalg::Mode::Exact); m];
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, expr) = part
            .split_once('=')
            .ok_or_else(|| format!("bad data entry '{part}', expected hJ=<poly>"))?;
        let name = name.trim();
        let idx: usize = name
            .strip_prefix('h')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad data name '{name}', expected h0..h{}", m - 1))?;
        if idx >= m {
            return Err(format!("data order {idx} out of range (m = {m})").into());
        }
        data[idx] = CauchyData::Poly(parse_poly(expr.trim(), dim_boundary)?);
    }
    Ok(data)
}

pub fn run(args: CauchyArgs) -> Result<bool, Box<dyn Error>> {
    let p = resolve_operator(args.op.as_deref(), args.poly.as_deref(), args.dim)?;
    let dec = slab_decompose(&p, true)?;
    let m = dec.m() as usize;
    let boundary_dim = args.dim - 1;

    let data: Vec<CauchyData> = match (&args.data, &args.data_json) {
        (Some(text), None) => parse_data(text, boundary_dim, m)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let list: Vec<CauchyData> = serde_json::from_str(&text)?;
            if list.len() != m {
                return Err(format!("need {m} data entries, got {}", list.len()).into());
            }
            list
        }
        (None, None) => return Err("missing boundary data: use --data or --data-json".into()),
        _ => return Err("give either --data or --data-json, not both".into()),
    };

    let sol = cauchy_solve(&dec, &data, args.n)?;

    // Boundary traces and the preparation identity (exact on symbolic data).
    let mut traces_exact = true;
    let mut prep_max = 0.0f64;
    let mut prep_exact = true;
    for s in 0..m as u32 {
        let rtrace = sol.trace(s).add(&data[s as usize].neg())?;
        if !rtrace.is_zero() {
            traces_exact = false;
        }
        let res = verify_prep_identity(&dec, &data, s)?;
        if !res.is_zero() {
            prep_exact = false;
            let probe: Vec<f64> = vec![0.37; boundary_dim];
            prep_max = prep_max.max(res.evaluate(&probe).0.norm());
        }
    }

    let explicit_check = if args.verify_explicit {
        let mut max_res = 0.0f64;
        let mut exact = true;
        for h in &data {
            for l in 0..=args.lmax {
                let a = c_op_recursive(&dec, l, h)?;
                if l >= dec.m() - 1 {
                    let b = c_op_explicit(&dec, l, h)?;
                    match a.add(&b.neg())?.is_zero() {
                        true => {}
                        false => {
                            exact = false;
                            let probe: Vec<f64> = vec![0.29; boundary_dim];
                            let d = a.evaluate(&probe).0 - b.evaluate(&probe).0;
                            max_res = max_res.max(d.norm());
                        }
                    }
                }
            }
        }
        Some(IdentityReport {
            l_range: [0, args.lmax],
            max_abs_residual: max_res,
            exact,
        })
    } else {
        None
    };

    let pde_residual_exact = if sol.terminated() {
        Some(sol.pde_residual_coeffs()?.iter().all(|r| r.is_zero()))
    } else {
        None
    };

    let samples_written = match (&args.grid, &args.out_csv) {
        (Some(grid), Some(path)) => {
            if args.dim != 2 {
                return Err("grid sampling is d = 2 only".into());
            }
            let grid = parse_grid(grid)?;
            let x1s = grid.x1_nodes();
            let xds = grid.xd_nodes();
            let mut rows = Vec::new();
            for &x1 in &x1s {
                for &xd in &xds {
                    let (v, _) = sol.eval(&[x1], xd);
                    rows.push(vec![
                        format!("{x1:.9}"),
                        format!("{xd:.9}"),
                        format!("{:.12e}", v.re),
                        format!("{:.12e}", v.im),
                    ]);
                }
            }
            let count = rows.len();
            write_csv(path, &["x1", "xd", "re_u", "im_u"], rows.into_iter())?;
            Some(count)
        }
        _ => None,
    };

    let pass = traces_exact
        && prep_exact
        && explicit_check.as_ref().map_or(true, |c| c.exact)
        && pde_residual_exact.unwrap_or(true);
    let body = CauchyBody {
        truncation: args.n,
        terminated: sol.terminated(),
        traces_exact,
        prep_identity: IdentityReport {
            l_range: [0, dec.m() - 1],
            max_abs_residual: prep_max,
            exact: prep_exact,
        },
        explicit_check,
        pde_residual_exact,
        samples_written,
    };
    emit_json(&envelope(args.clone(), body), args.out.as_deref())?;
    Ok(pass)
}
