//! The half-space-supported null solution
//!
//! ```text
//! v(x) = ∫_{iτ-∞}^{iτ+∞} e^{i(x_1 s + x_d t(s))} e^{-(s/i)^r} ds
//! ```
//!
//! with `(s/i)^r` on the principal branch (real and positive on the positive
//! imaginary axis), its derivatives, and the scaled trace integrals consumed
//! by the slab pipeline. All integrals run along `Im s = τ`, truncated at
//! `|Re s| = sigma_max` with an explicit envelope bound for the discarded
//! tail: `|e^{i x_d t}| <= e^{|x_d| κ |s|^{1-1/p}}` is dominated by
//! `e^{-cos(rπ/2) |s|^r}` because `r > 1 - 1/p`.

use super::branch::{ContourSpec, PuiseuxBranch};
use super::{NullSolError, SampledField};
use crate::numeric::{integrate_adaptive, QuadResult};
use num_complex::Complex64;
use rayon::prelude::*;

fn ln_factorial(k: u32) -> f64 {
    let mut acc = 0.0f64;
    for j in 2..=k {
        acc += (j as f64).ln();
    }
    acc
}

/// `exp(z)` with the overflow edge mapped to infinity explicitly.
fn cexp(z: Complex64) -> Complex64 {
    if z.re > 709.0 {
        return Complex64::new(f64::INFINITY, f64::INFINITY);
    }
    if z.re < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    z.exp()
}

/// Damping exponent `(s/i)^r` on the principal branch.
fn damping(s: Complex64, r: f64) -> Complex64 {
    (s / Complex64::new(0.0, 1.0)).powf(r)
}

struct Envelope<'a> {
    spec: &'a ContourSpec,
    branch: &'a PuiseuxBranch,
    x1: f64,
    xd: f64,
    /// Power of `|s|` carried by the integrand factor.
    s_power: f64,
    /// Power of `|t(s)|` carried by the integrand factor.
    t_power: f64,
    /// Constant log-factor (e.g. `k ln ς - ln k!` for scaled traces).
    ln_const: f64,
}

impl<'a> Envelope<'a> {
    fn exponent(&self, sigma: f64) -> f64 {
        let sn = (sigma * sigma + self.spec.tau * self.spec.tau).sqrt();
        let growth = 1.0 - 1.0 / self.branch.p as f64;
        let c_r = (self.spec.r * std::f64::consts::FRAC_PI_2).cos();
        let t_bound = self.branch.growth_kappa * sn.powf(growth);
        -self.x1 * self.spec.tau
            + self.ln_const
            + self.s_power * sn.ln()
            + self.t_power * t_bound.max(1e-300).ln()
            + self.xd.abs() * t_bound
            - c_r * sn.powf(self.spec.r)
    }

    /// Bound for the two discarded tails `|σ| > sigma_max`.
    fn tail_bound(&self) -> Result<f64, NullSolError> {
        let s0 = self.spec.sigma_max;
        let f0 = self.exponent(s0);
        let f1 = self.exponent(2.0 * s0);
        if !(f1 < f0 - 1.0) {
            return Err(NullSolError::DecayPrecheck {
                decay: (self.spec.r * std::f64::consts::FRAC_PI_2).cos(),
                xd: self.xd,
                sigma_max: s0,
            });
        }
        // March out to where the envelope underflows.
        let mut s_end = 2.0 * s0;
        while self.exponent(s_end) > f0 - 760.0 && s_end < 1e12 {
            s_end *= 2.0;
        }
        let q = integrate_adaptive(
            |sigma| Complex64::new((self.exponent(sigma) - f0).exp(), 0.0),
            s0,
            s_end,
            1e-12,
            1e-3,
            100_000,
            16,
        );
        Ok(2.0 * q.value.re.max(0.0) * f0.exp() + 2.0 * q.error * f0.exp())
    }
}

fn oscillation_panels(spec: &ContourSpec, x1: f64, xd: f64) -> usize {
    let freq = x1.abs() + xd.abs() * (1.0 + self_kappa_guard()) + 0.25;
    let cycles = freq * 2.0 * spec.sigma_max / std::f64::consts::TAU;
    ((cycles * spec.panels_per_cycle as f64).ceil() as usize).clamp(16, 40_000)
}

fn self_kappa_guard() -> f64 {
    1.0
}

fn contour_integral<F>(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    x1: f64,
    xd: f64,
    factor: F,
) -> QuadResult
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    let tau = spec.tau;
    let r = spec.r;
    let f = |sigma: f64| -> Complex64 {
        let s = Complex64::new(sigma, tau);
        let t = branch.eval(sigma);
        let phase = Complex64::new(0.0, 1.0) * (x1 * s + xd * t) - damping(s, r);
        factor(s, t) * cexp(phase)
    };
    integrate_adaptive(
        f,
        -spec.sigma_max,
        spec.sigma_max,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals,
        oscillation_panels(spec, x1, xd),
    )
}

/// Sample `v` at the given `(x_1, x_d)` points. Errors carry quadrature and
/// contour-truncation contributions.
pub fn hormander_v(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    points: &[[f64; 2]],
) -> Result<Vec<(Complex64, f64)>, NullSolError> {
    points
        .par_iter()
        .map(|&[x1, xd]| {
            let env = Envelope {
                spec,
                branch,
                x1,
                xd,
                s_power: 0.0,
                t_power: 0.0,
                ln_const: 0.0,
            };
            let tail = env.tail_bound()?;
            let q = contour_integral(spec, branch, x1, xd, |_, _| Complex64::new(1.0, 0.0));
            Ok((q.value, q.error + tail))
        })
        .collect()
}

/// Sample `∂^α v` (true derivative: integrand factor `(is)^{α_1} (it)^{α_d}`).
/// Any nonzero order in an intermediate variable yields the zero field, since
/// `v` depends on `x_1` and `x_d` only.
pub fn v_derivative(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    alpha: &[u32],
    points: &[[f64; 2]],
) -> Result<Vec<(Complex64, f64)>, NullSolError> {
    let a1 = *alpha.first().unwrap_or(&0);
    let ad = *alpha.last().unwrap_or(&0);
    if alpha.len() > 2 && alpha[1..alpha.len() - 1].iter().any(|&a| a > 0) {
        return Ok(points.iter().map(|_| (Complex64::new(0.0, 0.0), 0.0)).collect());
    }
    points
        .par_iter()
        .map(|&[x1, xd]| {
            let env = Envelope {
                spec,
                branch,
                x1,
                xd,
                s_power: a1 as f64,
                t_power: ad as f64,
                ln_const: 0.0,
            };
            let tail = env.tail_bound()?;
            let i = Complex64::new(0.0, 1.0);
            let q = contour_integral(spec, branch, x1, xd, |s, t| {
                (i * s).powu(a1) * (i * t).powu(ad)
            });
            Ok((q.value, q.error + tail))
        })
        .collect()
}

/// Scaled boundary-trace integrals for the slab pipeline:
/// `∂_1^k (D_d^j v)(x_1, 0) ς^k / k! = ∫ t^j (i s ς)^k / k! · e^{i x_1 s - (s/i)^r} ds`.
///
/// Construction sizes a per-order contour truncation from the envelope
/// bound, so low orders integrate over short contours while high orders get
/// the reach they need.
pub struct TraceIntegrals<'a> {
    spec: &'a ContourSpec,
    branch: &'a PuiseuxBranch,
    varsigma: f64,
    max_trace_power: u32,
    sigma_by_order: Vec<f64>,
}

impl<'a> TraceIntegrals<'a> {
    /// `worst_x1`: most negative evaluation abscissa (largest `e^{-x1 τ}`);
    /// `tol_abs`: absolute tail target per integral.
    pub fn new(
        spec: &'a ContourSpec,
        branch: &'a PuiseuxBranch,
        varsigma: f64,
        k_max: u32,
        max_trace_power: u32,
        worst_x1: f64,
        tol_abs: f64,
    ) -> Result<Self, NullSolError> {
        let mut sigma_by_order = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            let ln_const = (k as f64) * varsigma.ln() - ln_factorial(k);
            let sigma = auto_sigma_max_with_const(
                spec,
                branch,
                worst_x1,
                0.0,
                k as f64,
                max_trace_power as f64,
                ln_const,
                tol_abs,
            )?;
            sigma_by_order.push(sigma);
        }
        Ok(TraceIntegrals {
            spec,
            branch,
            varsigma,
            max_trace_power,
            sigma_by_order,
        })
    }

    pub fn scaled_trace(
        &self,
        x1: f64,
        j: u32,
        k: u32,
    ) -> Result<(Complex64, f64), NullSolError> {
        debug_assert!(j <= self.max_trace_power);
        let varsigma = self.varsigma;
        let local = self
            .sigma_by_order
            .get(k as usize)
            .copied()
            .unwrap_or(self.spec.sigma_max);
        let spec = self.spec.with_sigma_max(local);
        let ln_const = (k as f64) * varsigma.ln() - ln_factorial(k);
        let env = Envelope {
            spec: &spec,
            branch: self.branch,
            x1,
            xd: 0.0,
            s_power: k as f64,
            t_power: j as f64,
            ln_const,
        };
        let tail = env.tail_bound()?;
        let q = contour_integral(&spec, self.branch, x1, 0.0, |s, t| {
            // (i s ς)^k / k! computed in log space to dodge overflow.
            let z = Complex64::new(0.0, 1.0) * s * varsigma;
            let w = (k as f64) * z.ln() - ln_factorial(k as u32);
            t.powu(j) * cexp(w)
        });
        Ok((q.value, q.error + tail))
    }
}

/// Smallest contour truncation (by doubling, then bisection refinement)
/// whose tail bound at the worst requested point stays below `tol_abs`.
pub fn auto_sigma_max(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    worst_x1: f64,
    xd_max: f64,
    s_power: f64,
    t_power: f64,
    tol_abs: f64,
) -> Result<f64, NullSolError> {
    auto_sigma_max_with_const(
        spec, branch, worst_x1, xd_max, s_power, t_power, 0.0, tol_abs,
    )
}

#[allow(clippy::too_many_arguments)]
fn auto_sigma_max_with_const(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    worst_x1: f64,
    xd_max: f64,
    s_power: f64,
    t_power: f64,
    ln_const: f64,
    tol_abs: f64,
) -> Result<f64, NullSolError> {
    let tail_at = |sigma_max: f64| -> Option<f64> {
        let trial = spec.with_sigma_max(sigma_max);
        let env = Envelope {
            spec: &trial,
            branch,
            x1: worst_x1,
            xd: xd_max,
            s_power,
            t_power,
            ln_const,
        };
        env.tail_bound().ok()
    };
    let mut hi = spec.sigma_max.max(8.0).min(64.0);
    let mut ok = false;
    for _ in 0..40 {
        if let Some(t) = tail_at(hi) {
            if t < tol_abs {
                ok = true;
                break;
            }
        }
        hi *= 2.0;
    }
    if !ok {
        return Err(NullSolError::BadContour(format!(
            "no contour truncation below sigma_max = {hi} meets tail tolerance {tol_abs:e}"
        )));
    }
    // Trim back: the doubling step overshoots by up to 2x.
    let mut lo = hi / 2.0;
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        match tail_at(mid) {
            Some(t) if t < tol_abs => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(hi)
}

/// Sample `v` on a rectangular grid into a [`SampledField`].
pub fn v_field(
    spec: &ContourSpec,
    branch: &PuiseuxBranch,
    grid: &super::EvalGrid,
) -> Result<SampledField, NullSolError> {
    let x1s = grid.x1_nodes();
    let xds = grid.xd_nodes();
    let mut points = Vec::with_capacity(x1s.len() * xds.len());
    for &x1 in &x1s {
        for &xd in &xds {
            points.push([x1, xd]);
        }
    }
    let flat = hormander_v(spec, branch, &points)?;
    let values = flat
        .chunks(xds.len())
        .map(|chunk| chunk.to_vec())
        .collect();
    Ok(SampledField {
        grid: *grid,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nullsol::branch::{default_contour, puiseux_branch};
    use crate::polyalg::{parse_poly, slab_decompose};

    fn heat_setup(tau: f64, sigma_max: f64) -> (ContourSpec, PuiseuxBranch) {
        let dec = slab_decompose(&parse_poly("i*x1 + x2^2", 2).unwrap(), true).unwrap();
        let mut spec = default_contour(&dec);
        spec.tau = tau;
        spec.r = 0.75;
        spec.sigma_max = sigma_max;
        let branch = puiseux_branch(&dec, 0, &spec).unwrap();
        (spec, branch)
    }

    #[test]
    fn halfspace_support_smoke() {
        let (spec, branch) = heat_setup(4.0, 400.0);
        let pts = [[-1.0, 0.0], [-0.5, 0.3], [0.5, 0.0], [1.0, 0.4]];
        let vals = hormander_v(&spec, &branch, &pts).unwrap();
        let neg_max = vals[..2].iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
        let pos_max = vals[2..].iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
        assert!(neg_max > 1e-2, "v should be visible on x1 < 0: {neg_max:e}");
        assert!(
            pos_max < 1e-8 * neg_max,
            "v should vanish on x1 > 0: {pos_max:e} vs {neg_max:e}"
        );
    }

    #[test]
    fn tau_independence_smoke() {
        let (spec_a, branch_a) = heat_setup(4.0, 400.0);
        let (spec_b, branch_b) = heat_setup(5.0, 400.0);
        let pts = [[-0.8, 0.2], [-1.3, -0.4]];
        let va = hormander_v(&spec_a, &branch_a, &pts).unwrap();
        let vb = hormander_v(&spec_b, &branch_b, &pts).unwrap();
        for ((a, ea), (b, eb)) in va.iter().zip(vb.iter()) {
            let d = (a - b).norm();
            assert!(
                d <= 1e-7 * a.norm().max(b.norm()) + ea + eb,
                "τ-dependence: {d:e} vs values {:e}",
                a.norm()
            );
        }
    }

    #[test]
    fn derivative_zero_order_matches_v() {
        let (spec, branch) = heat_setup(4.0, 300.0);
        let pts = [[-0.7, 0.1]];
        let v = hormander_v(&spec, &branch, &pts).unwrap();
        let d0 = v_derivative(&spec, &branch, &[0, 0], &pts).unwrap();
        assert!((v[0].0 - d0[0].0).norm() <= 1e-12 * v[0].0.norm() + v[0].1 + d0[0].1);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (spec, branch) = heat_setup(4.0, 300.0);
        let x = [-0.9, 0.25];
        let h = 1e-3;
        let pts = [
            [x[0] + h, x[1]],
            [x[0] - h, x[1]],
            [x[0] + 2.0 * h, x[1]],
            [x[0] - 2.0 * h, x[1]],
        ];
        let v = hormander_v(&spec, &branch, &pts).unwrap();
        // Richardson-extrapolated centered difference.
        let d_h = (v[0].0 - v[1].0) / (2.0 * h);
        let d_2h = (v[2].0 - v[3].0) / (4.0 * h);
        let fd = (d_h * 4.0 - d_2h) / 3.0;
        let dv = v_derivative(&spec, &branch, &[1, 0], &[x]).unwrap();
        let rel = (dv[0].0 - fd).norm() / dv[0].0.norm().max(1e-300);
        assert!(rel < 1e-4, "rel error {rel:e}");
    }

    #[test]
    fn scaled_traces_are_finite_to_high_order() {
        let (spec, branch) = heat_setup(4.0, 3000.0);
        let tr = TraceIntegrals::new(&spec, &branch, 0.0625, 45, 1, -1.25, 1e-12).unwrap();
        for k in [0u32, 5, 20, 45] {
            let (v, e) = tr.scaled_trace(-0.8, 1, k).unwrap();
            assert!(v.norm().is_finite(), "k={k}");
            assert!(e.is_finite(), "k={k}");
        }
    }
}
