//! Truncated Taylor (jet) arithmetic.
//!
//! A [`Jet`] stores Taylor coefficients `c_0..c_n` about a center, i.e.
//! `f(x) = Σ c_k (x - center)^k + O((x-center)^{n+1})`; the k-th derivative is
//! `c_k * k!`. Products are Cauchy products, analytic primitives (exp, real
//! powers, reciprocal) use the standard Taylor-mode recurrences.
//!
//! The Gevrey-cutoff pipeline needs jets of mollifier derivatives to orders
//! in the hundreds, where raw coefficients overflow binary64. For that the
//! module provides renormalized variants that carry a separate log-scale and
//! extract coefficients with the exponents combined in log space.

use super::DataError;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub center: f64,
    /// Taylor coefficients, low -> high; order = len - 1.
    pub coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(center: f64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Jet { center, coeffs }
    }

    /// The identity function `x`, as a jet about `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut j = Jet::constant(center, Complex64::new(center, 0.0), order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// `f^{(k)}(center) = c_k * k!`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        if k > self.order() {
            return Complex64::new(0.0, 0.0);
        }
        let mut factorial = 1.0f64;
        for j in 2..=k {
            factorial *= j as f64;
        }
        self.coeffs[k] * factorial
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let dx = x - self.center;
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * dx + c;
        }
        acc
    }

    fn check_compat(&self, other: &Jet) -> Result<(), DataError> {
        if self.center != other.center {
            return Err(DataError::CenterMismatch {
                a: self.center,
                b: other.center,
            });
        }
        if self.order() != other.order() {
            return Err(DataError::OrderMismatch {
                a: self.order(),
                b: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, DataError> {
        self.check_compat(other)?;
        Ok(Jet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy-product truncation: coefficient k is `Σ_{i+j=k} a_i b_j`.
    pub fn mul(&self, other: &Jet) -> Result<Jet, DataError> {
        self.check_compat(other)?;
        let n = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            if self.coeffs[i].norm() == 0.0 {
                continue;
            }
            for j in 0..=(n - i) {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(Jet {
            center: self.center,
            coeffs,
        })
    }

    /// `exp(f)` as a jet.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut w = vec![Complex64::new(0.0, 0.0); n + 1];
        w[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += (j as f64) * self.coeffs[j] * w[k - j];
            }
            w[k] = acc / (k as f64);
        }
        Jet {
            center: self.center,
            coeffs: w,
        }
    }

    /// `f^beta` for real `beta`; requires `f(center) != 0` (principal branch
    /// through `powf` of the leading value).
    pub fn powf(&self, beta: f64) -> Result<Jet, DataError> {
        let u0 = self.coeffs[0];
        if u0.norm() == 0.0 {
            return Err(DataError::SingularJet);
        }
        let n = self.order();
        let mut w = vec![Complex64::new(0.0, 0.0); n + 1];
        w[0] = u0.powf(beta);
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let factor = beta * (j as f64) - ((k - j) as f64);
                acc += factor * self.coeffs[j] * w[k - j];
            }
            w[k] = acc / ((k as f64) * u0);
        }
        Ok(Jet {
            center: self.center,
            coeffs: w,
        })
    }

    pub fn recip(&self) -> Result<Jet, DataError> {
        self.powf(-1.0)
    }
}

/// Jet with an explicit log-scale: the represented coefficients are
/// `mantissa[k] * exp(ln_scale)`. Recurrences renormalize the mantissas when
/// they grow, so pipelines whose true values fit in f64 never overflow
/// mid-computation.
#[derive(Debug, Clone)]
pub struct ScaledJet {
    pub ln_scale: f64,
    pub mantissa: Vec<Complex64>,
}

impl ScaledJet {
    pub fn zero(order: usize) -> Self {
        ScaledJet {
            ln_scale: 0.0,
            mantissa: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    fn renormalize(&mut self, upto: usize) {
        let max = self.mantissa[..=upto]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        if max > 1e200 {
            let ln = max.ln();
            let inv = (-ln).exp();
            for c in self.mantissa.iter_mut() {
                *c *= inv;
            }
            self.ln_scale += ln;
        }
    }

    /// Plain coefficients, with an extra per-order factor `exp(k * ln_ratio)`
    /// folded in at extraction time (all exponents combined in log space).
    pub fn extract(&self, ln_ratio: f64) -> Vec<Complex64> {
        self.mantissa
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let ln_mag = self.ln_scale + (k as f64) * ln_ratio;
                *c * ln_mag.exp()
            })
            .collect()
    }
}

/// `exp(v) * exp(ln_prefactor)` where `v` is a plain jet. The constant part
/// of `v` and the prefactor are moved into the scale, so only the shape of
/// the exponential is carried in the mantissas.
pub fn exp_scaled(v: &[Complex64], ln_prefactor: f64) -> ScaledJet {
    let n = v.len() - 1;
    let mut out = ScaledJet::zero(n);
    out.ln_scale = ln_prefactor + v[0].re;
    out.mantissa[0] = Complex64::new(0.0, v[0].im).exp();
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            acc += (j as f64) * v[j] * out.mantissa[k - j];
        }
        out.mantissa[k] = acc / (k as f64);
        out.renormalize(k);
    }
    out
}

/// Taylor coefficients (about `x0`, in the scaled variable `x = x0 + s*ξ`) of
/// the unnormalized Gevrey bump
/// `φ(x) = exp(-(1 - (x/delta)^2)^{-1/(rho-1)})` for `|x| < delta`, zero
/// outside. Robust at any order: works on an internal scale chosen so the
/// recurrences stay bounded, then re-expands in log space.
pub fn bump_jet_scaled(x0: f64, delta: f64, rho: f64, s: f64, order: usize) -> Vec<Complex64> {
    let a = 1.0 / (rho - 1.0);
    let u0 = 1.0 - (x0 / delta) * (x0 / delta);
    if u0 <= 0.0 || u0 < 1e-120 {
        // Outside the open support (or so deep in the flat tail that
        // exp(-u0^-a) underflows beyond any derivative-growth recovery).
        return vec![Complex64::new(0.0, 0.0); order + 1];
    }

    // Internal scale keeping |u1|, |u2| small against u0.
    let u1_raw = -2.0 * x0 / (delta * delta);
    let u2_raw = -1.0 / (delta * delta);
    let mut s_loc = s;
    if u1_raw != 0.0 {
        s_loc = s_loc.min(0.25 * u0 / u1_raw.abs());
    }
    s_loc = s_loc.min(0.5 * delta * u0.sqrt());
    if s_loc <= 0.0 {
        s_loc = s;
    }

    let n = order;
    let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
    u[0] = Complex64::new(u0, 0.0);
    if n >= 1 {
        u[1] = Complex64::new(u1_raw * s_loc, 0.0);
    }
    if n >= 2 {
        u[2] = Complex64::new(u2_raw * s_loc * s_loc, 0.0);
    }

    // v = -u^{-a}; u0 in (0, 1], coefficients stay near |v0| by the scale
    // choice above.
    let uj = Jet {
        center: 0.0,
        coeffs: u,
    };
    let v = match uj.powf(-a) {
        Ok(w) => w.scale(Complex64::new(-1.0, 0.0)),
        Err(_) => return vec![Complex64::new(0.0, 0.0); order + 1],
    };

    let sj = exp_scaled(&v.coeffs, 0.0);
    sj.extract((s / s_loc).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_of_x_with_itself() {
        let x = Jet::variable(0.0, 3);
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.coeffs, vec![c(0.0), c(0.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn exp_times_exp_neg_is_one() {
        let x = Jet::variable(0.0, 6);
        let e = x.exp();
        let en = x.scale(c(-1.0)).exp();
        let prod = e.mul(&en).unwrap();
        assert!((prod.coeffs[0] - c(1.0)).norm() < 1e-15);
        for k in 1..=6 {
            assert!(prod.coeffs[k].norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn zero_jet_absorbs_product() {
        let x = Jet::variable(1.0, 4);
        let z = Jet::constant(1.0, c(0.0), 4);
        assert!(x.mul(&z).unwrap().is_zero());
    }

    #[test]
    fn mismatched_jets_rejected() {
        let a = Jet::variable(0.0, 3);
        let b = Jet::variable(1.0, 3);
        assert!(matches!(a.mul(&b), Err(DataError::CenterMismatch { .. })));
        let d = Jet::variable(0.0, 4);
        assert!(matches!(a.mul(&d), Err(DataError::OrderMismatch { .. })));
    }

    #[test]
    fn powf_against_known_series() {
        // (1+x)^{1/2} = 1 + x/2 - x^2/8 + x^3/16 - ...
        let mut one_plus_x = Jet::variable(0.0, 3);
        one_plus_x.coeffs[0] = c(1.0);
        let r = one_plus_x.powf(0.5).unwrap();
        let expect = [1.0, 0.5, -0.125, 0.0625];
        for (k, e) in expect.iter().enumerate() {
            assert!((r.coeffs[k] - c(*e)).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn bump_jet_matches_plain_path_at_moderate_order() {
        // In the well-conditioned interior, the scaled path must agree with
        // the direct jet computation.
        let (x0, delta, rho) = (0.3, 1.0, 1.5);
        let order = 8;
        let scaled = bump_jet_scaled(x0, delta, rho, 1.0, order);

        let x = Jet::variable(x0, order);
        let u = {
            let xs = x.scale(c(1.0 / delta));
            let sq = xs.mul(&xs).unwrap();
            let mut one = Jet::constant(x0, c(1.0), order);
            one = one.add(&sq.scale(c(-1.0))).unwrap();
            one
        };
        let v = u.powf(-2.0).unwrap().scale(c(-1.0));
        let plain = v.exp();
        for k in 0..=order {
            let diff = (scaled[k] - plain.coeffs[k]).norm();
            assert!(
                diff <= 1e-10 * plain.coeffs[k].norm().max(1e-30),
                "k={k}: {} vs {}",
                scaled[k],
                plain.coeffs[k]
            );
        }
    }

    #[test]
    fn bump_jet_survives_high_order_near_edge() {
        // Orders far beyond what plain f64 jets can represent: must produce
        // finite values (and zeros outside the support).
        let coeffs = bump_jet_scaled(-0.95, 1.0, 1.5, 0.05, 300);
        assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        let outside = bump_jet_scaled(1.5, 1.0, 1.5, 0.05, 50);
        assert!(outside.iter().all(|c| c.norm() == 0.0));
    }
}
