use crate::report::{emit_json, envelope};
use charpde::domains::{
    p_convexity_check, rasterize, rasterize_mask_file, runge_pair_check, tube_check,
    write_overlay_pgm, DomainSpec, GridDomain, Outcome, Verdict,
};
use clap::Args;
use serde::Serialize;
use std::error::Error;
use std::path::{Path, PathBuf};

fn load_domain(spec_path: &Path) -> Result<GridDomain, Box<dyn Error>> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec: DomainSpec = serde_json::from_str(&text)?;
    Ok(rasterize(&spec.shape, &spec.window, spec.spacing)?)
}

fn load_mask(
    path: &Path,
    threshold: f64,
    window_text: &str,
) -> Result<GridDomain, Box<dyn Error>> {
    // window as "ox,oy,ex,ey".
    let parts: Vec<f64> = window_text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err("mask window must be ox,oy,ex,ey".into());
    }
    let window = charpde::domains::Window::new(
        vec![parts[0], parts[1]],
        vec![parts[2], parts[3]],
    );
    Ok(rasterize_mask_file(path, threshold, &window)?)
}

#[derive(Serialize)]
struct VerdictBody {
    verdict: Verdict,
}

fn finish<C: Serialize + Clone>(
    config: &C,
    verdict: Verdict,
    out: Option<&Path>,
    overlay: Option<(&Path, &GridDomain)>,
) -> Result<bool, Box<dyn Error>> {
    if let (Some((path, domain)), Some(w)) = (overlay, verdict.witness.as_ref()) {
        if domain.dim() == 2 {
            write_overlay_pgm(path, domain, Some(w))?;
        }
    }
    let pass = verdict.outcome == Outcome::Pass;
    emit_json(&envelope(config.clone(), VerdictBody { verdict }), out)?;
    Ok(pass)
}

#[derive(Args, Serialize, Clone)]
pub struct RungeArgs {
    /// Domain spec JSON for X1 (window + spacing + shape).
    #[arg(long)]
    pub x1: Option<PathBuf>,
    /// Domain spec JSON for X2.
    #[arg(long)]
    pub x2: Option<PathBuf>,
    /// Grayscale mask for X1 (with --mask-window, --mask-threshold).
    #[arg(long)]
    pub x1_mask: Option<PathBuf>,
    #[arg(long)]
    pub x2_mask: Option<PathBuf>,
    #[arg(long, default_value = "-2,-2,4,4")]
    pub mask_window: String,
    #[arg(long, default_value_t = 127.0)]
    pub mask_threshold: f64,
    /// Write a witness overlay PGM here on failure.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_runge(args: RungeArgs) -> Result<bool, Box<dyn Error>> {
    let x1 = match (&args.x1, &args.x1_mask) {
        (Some(p), None) => load_domain(p)?,
        (None, Some(m)) => load_mask(m, args.mask_threshold, &args.mask_window)?,
        _ => return Err("give exactly one of --x1 / --x1-mask".into()),
    };
    let x2 = match (&args.x2, &args.x2_mask) {
        (Some(p), None) => load_domain(p)?,
        (None, Some(m)) => load_mask(m, args.mask_threshold, &args.mask_window)?,
        _ => return Err("give exactly one of --x2 / --x2-mask".into()),
    };
    let verdict = runge_pair_check(&x1, &x2)?;
    finish(
        &args,
        verdict,
        args.out.as_deref(),
        args.overlay.as_deref().map(|p| (p, &x1)),
    )
}

#[derive(Args, Serialize, Clone)]
pub struct PconvexArgs {
    /// Domain spec JSON.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Grayscale mask (with --mask-window, --mask-threshold).
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long, default_value = "-2,-2,4,4")]
    pub mask_window: String,
    #[arg(long, default_value_t = 127.0)]
    pub mask_threshold: f64,
    /// Quasiconcavity tolerance (default h/2).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_pconvex(args: PconvexArgs) -> Result<bool, Box<dyn Error>> {
    let x = match (&args.domain, &args.mask) {
        (Some(p), None) => load_domain(p)?,
        (None, Some(m)) => load_mask(m, args.mask_threshold, &args.mask_window)?,
        _ => return Err("give exactly one of --domain / --mask".into()),
    };
    let verdict = match args.tol {
        Some(t) => charpde::domains::p_convexity_check_with_tol(&x, t)?,
        None => p_convexity_check(&x)?,
    };
    finish(
        &args,
        verdict,
        args.out.as_deref(),
        args.overlay.as_deref().map(|p| (p, &x)),
    )
}

#[derive(Args, Serialize, Clone)]
pub struct TubeArgs {
    /// Time interval of X1 as "t0,t1".
    #[arg(long)]
    pub i1: String,
    /// Time interval of X2 as "t0,t1".
    #[arg(long)]
    pub i2: String,
    /// Spatial factor spec JSON for X1.
    #[arg(long)]
    pub x1n: PathBuf,
    /// Spatial factor spec JSON for X2.
    #[arg(long)]
    pub x2n: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_interval(text: &str) -> Result<[f64; 2], Box<dyn Error>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if parts.len() != 2 {
        return Err(format!("interval must be t0,t1, got '{text}'").into());
    }
    Ok([parts[0], parts[1]])
}

pub fn run_tube(args: TubeArgs) -> Result<bool, Box<dyn Error>> {
    let i1 = parse_interval(&args.i1)?;
    let i2 = parse_interval(&args.i2)?;
    let x1n = load_domain(&args.x1n)?;
    let x2n = load_domain(&args.x2n)?;
    let verdict = tube_check(i1, &x1n, i2, &x2n)?;
    finish(&args, verdict, args.out.as_deref(), None)
}
