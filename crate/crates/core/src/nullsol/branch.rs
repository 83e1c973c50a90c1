//! Root branches `t(s)` of `P(s e_1 + t e_d) = 0` tracked along the contour
//! `Im s = τ` by predictor-corrector continuation.
//!
//! Branches are anchored at `s = iτ` and ordered there by descending
//! imaginary part, ties broken by descending real part; `branch_index` refers
//! to this order. Continuation refuses to cross near-collisions of roots
//! (discriminant zeros), which bound the Puiseux convergence radius `M`.

use super::NullSolError;
use crate::numeric::{all_roots, polish_root, poly_eval, poly_eval_deriv};
use crate::polyalg::SlabDecomposition;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Contour and quadrature parameters for the half-space null solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Height of the horizontal contour `Im s = τ`; must exceed `(2M)^p`.
    pub tau: f64,
    /// Exponent of the damping factor `e^{-(s/i)^r}`, in `(1 - 1/p, 1)`.
    pub r: f64,
    /// Truncation of the contour to `|Re s| <= sigma_max`.
    pub sigma_max: f64,
    /// Initial panels per unit of phase frequency (oscillation-aware start).
    pub panels_per_cycle: usize,
    /// Absolute quadrature tolerance target.
    pub abs_tol: f64,
    /// Relative quadrature tolerance target.
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations per point.
    pub max_evals: usize,
}

impl ContourSpec {
    pub fn with_tau(&self, tau: f64) -> ContourSpec {
        ContourSpec {
            tau,
            ..self.clone()
        }
    }

    pub fn with_sigma_max(&self, sigma_max: f64) -> ContourSpec {
        ContourSpec {
            sigma_max,
            ..self.clone()
        }
    }
}

/// A continuously tracked root branch with diagnostic asymptotics.
#[derive(Debug, Clone)]
pub struct PuiseuxBranch {
    /// Ramification index estimated from the tracked asymptotics.
    pub p: u32,
    pub branch_index: usize,
    /// Leading Puiseux coefficients (diagnostic): `t(s) ≈ c1 s^{1-1/p}`.
    pub series_head: Vec<Complex64>,
    /// Estimate of the Puiseux radius `M` (from discriminant zeros in `s`).
    pub radius_m: f64,
    /// `max |t(s)| / |s|^{1-1/p}` over the track, with safety margin.
    pub growth_kappa: f64,
    tau: f64,
    /// Track nodes `(sigma, t)`, sorted by sigma.
    track: Vec<(f64, Complex64)>,
    /// Coefficients of `t -> P(s e_1 + t e_d)` as polynomials in `s`
    /// (low -> high in `t`), each stored low -> high in `s`.
    coeff_polys: Vec<Vec<Complex64>>,
}

fn coeff_polys_of(dec: &SlabDecomposition) -> Result<Vec<Vec<Complex64>>, NullSolError> {
    if dec.dim() != 2 {
        return Err(NullSolError::NotBivariate(dec.dim()));
    }
    let mut out = Vec::with_capacity(dec.m() as usize + 1);
    for q in dec.q_list() {
        let deg = q.degree_in(0).unwrap_or(0) as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (alpha, coeff) in q.terms() {
            c[alpha[0] as usize] = coeff.to_c64();
        }
        if q.is_zero() {
            c = vec![Complex64::new(0.0, 0.0)];
        }
        out.push(c);
    }
    Ok(out)
}

fn t_poly_at(coeff_polys: &[Vec<Complex64>], s: Complex64) -> Vec<Complex64> {
    coeff_polys
        .iter()
        .map(|c| poly_eval(c, s))
        .collect()
}

/// `∂P/∂s` coefficients in `t` at fixed `s`.
fn t_poly_ds_at(coeff_polys: &[Vec<Complex64>], s: Complex64) -> Vec<Complex64> {
    coeff_polys
        .iter()
        .map(|c| {
            let dc: Vec<Complex64> = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, v)| v * (k as f64))
                .collect();
            if dc.is_empty() {
                Complex64::new(0.0, 0.0)
            } else {
                poly_eval(&dc, s)
            }
        })
        .collect()
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            min = min.min((roots[i] - roots[j]).norm());
        }
    }
    min
}

/// Discriminant zeros in `s` for orders m <= 3 (closed-form discriminants);
/// used to estimate the Puiseux radius `M`.
fn discriminant_radius(coeff_polys: &[Vec<Complex64>], p: u32) -> f64 {
    fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    fn add(a: &[Complex64], b: &[Complex64], scale: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] += y * scale;
        }
        out
    }
    let m = coeff_polys.len() - 1;
    let disc: Vec<Complex64> = match m {
        2 => {
            // b^2 - 4ac with a = Q2, b = Q1, c = Q0.
            let b2 = mul(&coeff_polys[1], &coeff_polys[1]);
            let ac = mul(&coeff_polys[2], &coeff_polys[0]);
            add(&b2, &ac, -4.0)
        }
        3 => {
            // 18abcd - 4b^3d + b^2c^2 - 4ac^3 - 27a^2d^2 with
            // a = Q3, b = Q2, c = Q1, d = Q0.
            let (a, b, c, d) = (
                &coeff_polys[3],
                &coeff_polys[2],
                &coeff_polys[1],
                &coeff_polys[0],
            );
            let t1 = mul(&mul(a, b), &mul(c, d));
            let t2 = mul(&mul(b, b), &mul(b, d));
            let t3 = mul(&mul(b, c), &mul(b, c));
            let t4 = mul(a, &mul(c, &mul(c, c)));
            let t5 = mul(&mul(a, a), &mul(d, d));
            let mut acc = vec![Complex64::new(0.0, 0.0); 1];
            acc = add(&acc, &t1, 18.0);
            acc = add(&acc, &t2, -4.0);
            acc = add(&acc, &t3, 1.0);
            acc = add(&acc, &t4, -4.0);
            add(&acc, &t5, -27.0)
        }
        _ => return 0.0,
    };
    match all_roots(&disc) {
        Ok(roots) => roots
            .iter()
            .map(|z| z.norm().powf(1.0 / p as f64))
            .fold(0.0, f64::max),
        Err(_) => 0.0,
    }
}

/// Reasonable contour defaults for an order-m operator: `τ = 4`,
/// `r = (1 + max(1 - 1/p, 1/2)) / 2` with `p = m` as the a-priori guess, and
/// a generous evaluation budget. `sigma_max` is a placeholder to be replaced
/// via [`super::auto_sigma_max`].
pub fn default_contour(dec: &SlabDecomposition) -> ContourSpec {
    let p = dec.m().max(2) as f64;
    let lower = 1.0 - 1.0 / p;
    ContourSpec {
        tau: 4.0,
        r: 0.5 * (1.0 + lower),
        sigma_max: 200.0,
        panels_per_cycle: 4,
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_evals: 4_000_000,
    }
}

impl PuiseuxBranch {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Roots of `P(s e_1 + t e_d)` in `t` at the anchor `s = iτ`, in the
    /// canonical branch order.
    pub fn anchor_roots(coeff_polys: &[Vec<Complex64>], tau: f64) -> Result<Vec<Complex64>, NullSolError> {
        let s0 = Complex64::new(0.0, tau);
        let tp = t_poly_at(coeff_polys, s0);
        let mut roots = all_roots(&tp)?;
        roots.sort_by(|a, b| b.im.total_cmp(&a.im).then(b.re.total_cmp(&a.re)));
        Ok(roots)
    }

    /// Evaluate `t(σ + iτ)` by polishing from the nearest tracked node.
    pub fn eval(&self, sigma: f64) -> Complex64 {
        let idx = match self
            .track
            .binary_search_by(|(s, _)| s.total_cmp(&sigma))
        {
            Ok(i) => i,
            Err(i) => i.min(self.track.len() - 1),
        };
        // Nearest of idx and idx-1.
        let seed = if idx > 0
            && (self.track[idx - 1].0 - sigma).abs() < (self.track[idx].0 - sigma).abs()
        {
            self.track[idx - 1].1
        } else {
            self.track[idx].1
        };
        let s = Complex64::new(sigma, self.tau);
        let tp = t_poly_at(&self.coeff_polys, s);
        polish_root(&tp, seed, 60)
    }

    /// Residual `|P(s e_1 + t(σ) e_d)|` at a contour point.
    pub fn residual(&self, sigma: f64) -> f64 {
        let s = Complex64::new(sigma, self.tau);
        let tp = t_poly_at(&self.coeff_polys, s);
        poly_eval(&tp, self.eval(sigma)).norm()
    }

    /// Scale for residual comparisons at a contour point.
    pub fn residual_scale(&self, sigma: f64) -> f64 {
        let s = Complex64::new(sigma, self.tau);
        let tp = t_poly_at(&self.coeff_polys, s);
        let t = self.eval(sigma);
        tp.iter()
            .enumerate()
            .map(|(k, c)| c.norm() * t.norm().powi(k as i32))
            .fold(0.0, f64::max)
            .max(1e-300)
    }
}

/// Track branch `branch_index` along `Im s = τ` over `|σ| <= sigma_max`.
pub fn puiseux_branch(
    dec: &SlabDecomposition,
    branch_index: usize,
    contour: &ContourSpec,
) -> Result<PuiseuxBranch, NullSolError> {
    let coeff_polys = coeff_polys_of(dec)?;
    let m = dec.m();
    if branch_index >= m as usize {
        return Err(NullSolError::BranchIndex {
            index: branch_index,
            m,
        });
    }
    if contour.tau <= 0.0 {
        return Err(NullSolError::BadContour("tau must be positive".into()));
    }

    let anchors = PuiseuxBranch::anchor_roots(&coeff_polys, contour.tau)?;
    let t0 = anchors[branch_index];

    // March outward in both directions with adaptive steps.
    let mut track: Vec<(f64, Complex64)> = vec![(0.0, t0)];
    for dir in [1.0f64, -1.0] {
        let mut sigma = 0.0f64;
        let mut t = t0;
        let mut step = 0.05 * (1.0 + contour.tau);
        while sigma * dir < contour.sigma_max {
            let next_sigma = sigma + dir * step.min(contour.sigma_max - sigma * dir);
            let s_old = Complex64::new(sigma, contour.tau);
            let s_new = Complex64::new(next_sigma, contour.tau);

            // Predictor: dt/ds = -P_s / P_t.
            let tp_old = t_poly_at(&coeff_polys, s_old);
            let tp_ds_old = t_poly_ds_at(&coeff_polys, s_old);
            let (_, dpdt) = poly_eval_deriv(&tp_old, t);
            let dpds = poly_eval(&tp_ds_old, t);
            let prediction = if dpdt.norm() > 0.0 {
                t - dpds / dpdt * (s_new - s_old)
            } else {
                t
            };

            let tp_new = t_poly_at(&coeff_polys, s_new);
            let corrected = polish_root(&tp_new, prediction, 60);

            // Collision / jump guards against all roots at the new point.
            let roots = all_roots(&tp_new)?;
            let sep = min_separation(&roots);
            let scale = 1.0 + corrected.norm();
            if sep < 1e-9 * scale {
                return Err(NullSolError::RootCollision {
                    sigma: next_sigma,
                    separation: sep,
                });
            }
            let moved = (corrected - t).norm();
            if moved > 0.45 * sep && step > 1e-9 {
                step *= 0.5;
                continue;
            }
            let residual = poly_eval(&tp_new, corrected).norm();
            let res_scale: f64 = tp_new
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * corrected.norm().powi(k as i32))
                .fold(0.0, f64::max)
                .max(1e-300);
            if residual > 1e-10 * res_scale {
                if step > 1e-9 {
                    step *= 0.5;
                    continue;
                }
                return Err(NullSolError::ResidualTooLarge {
                    sigma: next_sigma,
                    residual,
                    tol: 1e-10 * res_scale,
                });
            }

            sigma = next_sigma;
            t = corrected;
            track.push((sigma, t));
            if moved < 0.1 * sep {
                step *= 1.6;
            }
            step = step.min(0.02 * (contour.sigma_max + 10.0));
        }
    }
    track.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Asymptotics from the outer 25% of the track: |t| ~ |c1| |s|^{1-1/p}.
    let outer: Vec<(f64, f64)> = track
        .iter()
        .filter(|(s, t)| s.abs() > 0.75 * contour.sigma_max && t.norm() > 0.0)
        .map(|(s, t)| {
            let sn = Complex64::new(*s, contour.tau).norm();
            (sn.ln(), t.norm().ln())
        })
        .collect();
    let slope = if outer.len() >= 2 {
        let n = outer.len() as f64;
        let sx: f64 = outer.iter().map(|(x, _)| x).sum();
        let sy: f64 = outer.iter().map(|(_, y)| y).sum();
        let sxx: f64 = outer.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = outer.iter().map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        0.5
    };
    let p = if slope >= 0.999 {
        1
    } else {
        (1.0 / (1.0 - slope)).round().max(1.0) as u32
    };
    let p = p.clamp(1, m);

    let exponent = 1.0 - 1.0 / p as f64;
    let growth_kappa = track
        .iter()
        .map(|(s, t)| {
            let sn = Complex64::new(*s, contour.tau).norm();
            t.norm() / sn.powf(exponent)
        })
        .fold(0.0, f64::max)
        * 1.25;

    // Leading coefficient diagnostic at the far end of the track.
    let series_head = {
        let (s_far, t_far) = *track.last().unwrap();
        let s = Complex64::new(s_far, contour.tau);
        vec![t_far / s.powf(exponent)]
    };

    let radius_m = discriminant_radius(&coeff_polys, p);
    if contour.tau <= (2.0 * radius_m).powi(p as i32) {
        return Err(NullSolError::BadContour(format!(
            "tau = {} must exceed (2M)^p = {}",
            contour.tau,
            (2.0 * radius_m).powi(p as i32)
        )));
    }
    let r_lower = 1.0 - 1.0 / p as f64;
    if !(contour.r > r_lower && contour.r < 1.0) {
        return Err(NullSolError::BadContour(format!(
            "r = {} outside (1 - 1/p, 1) = ({r_lower}, 1)",
            contour.r
        )));
    }

    Ok(PuiseuxBranch {
        p,
        branch_index,
        series_head,
        radius_m,
        growth_kappa,
        tau: contour.tau,
        track,
        coeff_polys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_poly, slab_decompose};

    fn heat() -> SlabDecomposition {
        slab_decompose(&parse_poly("i*x1 + x2^2", 2).unwrap(), true).unwrap()
    }

    fn schrodinger() -> SlabDecomposition {
        slab_decompose(&parse_poly("-x1 + x2^2", 2).unwrap(), true).unwrap()
    }

    #[test]
    fn heat_branch_matches_closed_form() {
        // i s + t^2 = 0 -> t = ±(-i s)^{1/2}; p = 2.
        let dec = heat();
        let mut spec = default_contour(&dec);
        spec.sigma_max = 60.0;
        let b = puiseux_branch(&dec, 0, &spec).unwrap();
        assert_eq!(b.p, 2);
        for sigma in [-50.0, -12.3, 0.0, 7.7, 49.0] {
            let s = Complex64::new(sigma, spec.tau);
            let closed = (-Complex64::new(0.0, 1.0) * s).sqrt();
            let t = b.eval(sigma);
            // The branch is one of ±closed; continuity picks a single sign.
            let d = (t - closed).norm().min((t + closed).norm());
            assert!(d < 1e-12 * (1.0 + closed.norm()), "sigma={sigma}: {d:e}");
        }
        // Branch 0 anchors at +sqrt(tau) (canonical order: Im desc, Re desc).
        let t0 = b.eval(0.0);
        assert!((t0 - Complex64::new(spec.tau.sqrt(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn schrodinger_branch() {
        // -s + t^2 = 0 -> t = ±s^{1/2}; at the anchor ±sqrt(iτ).
        let dec = schrodinger();
        let mut spec = default_contour(&dec);
        spec.sigma_max = 40.0;
        let b = puiseux_branch(&dec, 0, &spec).unwrap();
        assert_eq!(b.p, 2);
        let t0 = b.eval(0.0);
        let expect = Complex64::new(0.0, spec.tau).sqrt();
        assert!((t0 - expect).norm() < 1e-10);
        assert!(t0.im > 0.0);
    }

    #[test]
    fn residuals_small_along_contour() {
        let dec = heat();
        let mut spec = default_contour(&dec);
        spec.sigma_max = 30.0;
        let b = puiseux_branch(&dec, 1, &spec).unwrap();
        // 100 deterministic sample nodes.
        for i in 0..100 {
            let sigma = -30.0 + 60.0 * (i as f64) / 99.0;
            assert!(
                b.residual(sigma) <= 1e-10 * b.residual_scale(sigma),
                "sigma={sigma}"
            );
        }
    }

    #[test]
    fn branch_continuity_no_jumps() {
        let dec = schrodinger();
        let mut spec = default_contour(&dec);
        spec.sigma_max = 25.0;
        let b = puiseux_branch(&dec, 0, &spec).unwrap();
        let mut last = b.eval(-25.0);
        let mut step_max = 0.0f64;
        for i in 1..=500 {
            let sigma = -25.0 + 50.0 * (i as f64) / 500.0;
            let t = b.eval(sigma);
            step_max = step_max.max((t - last).norm());
            last = t;
        }
        // Roots are ±sqrt(s): separation 2|t| >= 2 sqrt(tau); consecutive
        // samples must move far less than half of that.
        assert!(step_max < spec.tau.sqrt() * 0.5, "max step {step_max}");
    }

    #[test]
    fn bad_branch_index() {
        let dec = heat();
        let spec = default_contour(&dec);
        assert!(matches!(
            puiseux_branch(&dec, 2, &spec),
            Err(NullSolError::BranchIndex { .. })
        ));
    }
}
