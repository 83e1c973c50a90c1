//! All-roots solver for univariate polynomials with complex coefficients.
//!
//! Durand-Kerner (Weierstrass) simultaneous iteration followed by a Newton
//! polish of each root. Degrees here are small (the operator order m, or the
//! degree of a characteristic binary form), so robustness beats speed.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    #[error("root iteration did not converge; worst residual {residual:e}")]
    NoConvergence { residual: f64 },
}

/// Evaluate `p` (coefficients low -> high) at `z` by Horner's rule.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Evaluate `p` and `p'` at `z` in one pass.
pub fn poly_eval_deriv(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].norm() == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// All complex roots of the polynomial with the given coefficients
/// (low -> high order). Returns roots sorted by (re, im) for determinism.
pub fn all_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let coeffs = trim(coeffs);
    if coeffs.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // Monic normalization.
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    // Cauchy bound for the root radius.
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);

    // Initial guesses on a circle with an irrational angular offset so no
    // guess coincides with a symmetry axis of the polynomial.
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
            Complex64::from_polar(0.5 * radius.max(1e-3), theta)
        })
        .collect();

    let scale = monic.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let _guard_tol = 1e-14 * scale.max(1.0);
    let mut converged = false;
    for _ in 0..400 {
        let mut max_step = 0.0_f64;
        for i in 0..deg {
            let p = poly_eval(&monic, z[i]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided iterates: nudge apart deterministically.
                z[i] += Complex64::new(1e-8 * (i as f64 + 1.0), 1e-8);
                max_step = f64::INFINITY;
                continue;
            }
            let step = p / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 * radius.max(1.0) {
            converged = true;
            break;
        }
    }

    // Newton polish (helps multiple-root clusters settle symmetrically too).
    for zi in z.iter_mut() {
        *zi = polish_root(&monic, *zi, 40);
    }

    let worst = z
        .iter()
        .map(|&zi| poly_eval(&monic, zi).norm())
        .fold(0.0_f64, f64::max);
    // A multiple root of multiplicity q only reaches residual ~ eps^... ; use
    // a radius-aware acceptance threshold.
    let accept = 1e-7 * (1.0 + radius.powi(deg as i32));
    if !converged && worst > accept {
        return Err(RootError::NoConvergence { residual: worst });
    }
    if worst > accept {
        return Err(RootError::NoConvergence { residual: worst });
    }

    z.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(z)
}

/// Newton-polish a root estimate; falls back to the input when the iteration
/// stalls (e.g. at a multiple root where p' also vanishes).
pub fn polish_root(coeffs: &[Complex64], start: Complex64, iters: usize) -> Complex64 {
    let mut z = start;
    let mut best = z;
    let mut best_val = poly_eval(coeffs, z).norm();
    for _ in 0..iters {
        let (p, dp) = poly_eval_deriv(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        let val = poly_eval(coeffs, z).norm();
        if val < best_val {
            best_val = val;
            best = z;
        }
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_with_complex_roots() {
        // (z - (1+2i))(z - (3-i)) = z^2 - (4+i) z + (5+5i)
        let coeffs = [c(5.0, 5.0), c(-4.0, -1.0), c(1.0, 0.0)];
        let roots = all_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 2);
        let has = |r: Complex64| roots.iter().any(|&z| (z - r).norm() < 1e-10);
        assert!(has(c(1.0, 2.0)));
        assert!(has(c(3.0, -1.0)));
    }

    #[test]
    fn double_root() {
        // (z-2)^2
        let coeffs = [c(4.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0)];
        let roots = all_roots(&coeffs).unwrap();
        for r in roots {
            assert!((r - c(2.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn degree_five_real_roots() {
        // z(z-1)(z+1)(z-2)(z+2) = z^5 - 5 z^3 + 4 z
        let coeffs = [
            c(0.0, 0.0),
            c(4.0, 0.0),
            c(0.0, 0.0),
            c(-5.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ];
        let roots = all_roots(&coeffs).unwrap();
        let mut res: Vec<f64> = roots.iter().map(|z| z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-2.0, -1.0, 0.0, 1.0, 2.0];
        for (r, e) in res.iter().zip(expect.iter()) {
            assert!((r - e).abs() < 1e-9, "{r} vs {e}");
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(all_roots(&[c(0.0, 0.0)]).is_err());
    }
}
