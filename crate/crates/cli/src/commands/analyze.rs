use super::resolve_operator;
use crate::report::{emit_json, envelope};
use charpde::polyalg::{
    analyze_symbol, characteristic_directions_2d, slab_decompose, HypothesisReport,
};
use clap::Args;
use serde::Serialize;
use std::error::Error;
use std::path::PathBuf;

#[derive(Args, Serialize, Clone)]
pub struct AnalyzeArgs {
    /// Operator preset (heat | schrodinger).
    #[arg(long)]
    pub op: Option<String>,
    /// Operator symbol, e.g. "i*x1 + x2^2".
    #[arg(long)]
    pub poly: Option<String>,
    /// Number of variables.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Convert to binary64 coefficients before analysis.
    #[arg(long, default_value_t = false)]
    pub float: bool,
    /// Seed for the sampled single-direction heuristic (d >= 3).
    #[arg(long, default_value_t = 0xc0ffee)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct AnalyzeBody {
    canonical: String,
    degree: u32,
    q_list: Vec<String>,
    report: HypothesisReport,
    /// Real characteristic directions (d = 2 only).
    characteristic_directions: Option<Vec<[f64; 2]>>,
}

pub fn run(args: AnalyzeArgs) -> Result<bool, Box<dyn Error>> {
    let mut p = resolve_operator(args.op.as_deref(), args.poly.as_deref(), args.dim)?;
    if args.float {
        p = p.to_float();
    }
    let report = analyze_symbol(&p, args.seed)?;
    let q_list = match slab_decompose(&p, true) {
        Ok(dec) => dec.q_list().iter().map(|q| q.to_canonical_string()).collect(),
        Err(_) => Vec::new(),
    };
    let directions = if p.dim() == 2 {
        Some(characteristic_directions_2d(&p)?)
    } else {
        None
    };
    let pass = report.structural_pass();
    let body = AnalyzeBody {
        canonical: p.to_canonical_string(),
        degree: p.degree().unwrap_or(0),
        q_list,
        report,
        characteristic_directions: directions,
    };
    emit_json(&envelope(args.clone(), body), args.out.as_deref())?;
    Ok(pass)
}
