//! Compactly supported Gevrey-class cutoff functions.
//!
//! The cutoff is the convolution of an indicator with a Gevrey bump: with
//! bump half-width `w = mollifier_width / 2` and the plateau `[A', B']`
//! widened by `w` on each side, `g = 1_{[A'-w, B'+w]} * φ_w` satisfies
//! `g = 1` exactly on `[A', B']` and `supp g = [A' - 2w, B' + 2w]`, i.e. the
//! plateau dilated by exactly `mollifier_width`. The bump
//! `φ_w(x) ∝ exp(-(1-(x/w)^2)^{-1/(ρ-1)})` lies in the Gevrey class of order
//! ρ, and convolution preserves the class, so `g` carries derivative bounds
//! `|g^{(α)}| ≤ C R^α α^{ρα}`.
//!
//! Values of `g` reduce to the bump's antiderivative (clamped to 0/1 outside
//! the ramps); derivatives of any order reduce to bump derivatives at the two
//! ramp offsets, computed with jet arithmetic rather than finite differences.

use super::jet::bump_jet_scaled;
use super::{CauchyData, DataError, DerivOracle, NumericData};
use crate::numeric::integrate_adaptive;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GevreyCutoff {
    /// Gevrey order as an exact rational > 1.
    pub rho: Rational64,
    /// Support interval `[A, B]` (the constructed support may be smaller).
    pub support: [f64; 2],
    /// Plateau `[A', B']` where `g = 1` exactly.
    pub plateau: [f64; 2],
    /// Full width of the mollifier bump; the realized support of `g` is the
    /// plateau dilated by this amount.
    pub mollifier_width: f64,
    /// Initial panel count for the normalization / antiderivative quadrature.
    pub quadrature_order: usize,
    #[serde(skip)]
    norm_const: f64,
    #[serde(skip)]
    norm_err: f64,
    /// Largest derivative order whose raw value is representable in f64.
    pub max_order: u32,
}

impl GevreyCutoff {
    fn rho_f64(&self) -> f64 {
        *self.rho.numer() as f64 / *self.rho.denom() as f64
    }

    fn half_width(&self) -> f64 {
        0.5 * self.mollifier_width
    }

    /// Widened indicator interval `[A'-w, B'+w]`.
    fn indicator(&self) -> [f64; 2] {
        [
            self.plateau[0] - self.half_width(),
            self.plateau[1] + self.half_width(),
        ]
    }

    /// Realized support `[A'-2w, B'+2w]`.
    pub fn realized_support(&self) -> [f64; 2] {
        [
            self.plateau[0] - self.mollifier_width,
            self.plateau[1] + self.mollifier_width,
        ]
    }

    /// Unnormalized bump value at offset `t` from a ramp center.
    fn bump_raw(&self, t: f64) -> f64 {
        let w = self.half_width();
        let u = 1.0 - (t / w) * (t / w);
        if u <= 0.0 {
            return 0.0;
        }
        let a = 1.0 / (self.rho_f64() - 1.0);
        (-u.powf(-a)).exp()
    }

    /// CDF of the normalized bump, clamped to exact 0/1 outside `(-w, w)`.
    fn bump_cdf(&self, t: f64) -> (f64, f64) {
        let w = self.half_width();
        if t <= -w {
            return (0.0, 0.0);
        }
        if t >= w {
            return (1.0, 0.0);
        }
        let r = integrate_adaptive(
            |x| Complex64::new(self.bump_raw(x), 0.0),
            -w,
            t,
            1e-16 * self.norm_const,
            1e-13,
            40_000,
            self.quadrature_order.max(4),
        );
        let v = r.value.re / self.norm_const;
        let err = (r.error + v.abs() * self.norm_err) / self.norm_const;
        (v.clamp(0.0, 1.0), err)
    }

    /// `g(x)`, exactly 0 outside the realized support and exactly 1 on the
    /// plateau.
    pub fn value(&self, x: f64) -> (f64, f64) {
        let [aw, bw] = self.indicator();
        let (f1, e1) = self.bump_cdf(x - aw);
        let (f2, e2) = self.bump_cdf(x - bw);
        ((f1 - f2).clamp(0.0, 1.0), e1 + e2)
    }

    /// `g^{(k)}(x)` for `k >= 1`, via bump jets at the two ramp offsets.
    pub fn derivative(&self, x: f64, k: u32) -> (Complex64, f64) {
        if k == 0 {
            let (v, e) = self.value(x);
            return (Complex64::new(v, 0.0), e);
        }
        let [aw, bw] = self.indicator();
        // φ^{(k-1)} at both offsets: Taylor coefficient (k-1) times (k-1)!.
        let order = (k - 1) as usize;
        let j1 = bump_jet_scaled(x - aw, self.half_width(), self.rho_f64(), 1.0, order);
        let j2 = bump_jet_scaled(x - bw, self.half_width(), self.rho_f64(), 1.0, order);
        let mut factorial = 1.0f64;
        for j in 2..=order {
            factorial *= j as f64;
        }
        let v = (j1[order] - j2[order]) * factorial / self.norm_const;
        let err = 1e-14 * v.norm() * (k as f64 + 1.0);
        (v, err)
    }

    /// Taylor coefficients of `g` at `x` in the scaled variable `x + s ξ`:
    /// entry `k` is `g^{(k)}(x) s^k / k!`. Safe at orders far beyond what raw
    /// derivative values could represent.
    pub fn jet_scaled(&self, x: f64, s: f64, order: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        out[0] = Complex64::new(self.value(x).0, 0.0);
        if order == 0 {
            return out;
        }
        let [aw, bw] = self.indicator();
        let j1 = bump_jet_scaled(x - aw, self.half_width(), self.rho_f64(), s, order - 1);
        let j2 = bump_jet_scaled(x - bw, self.half_width(), self.rho_f64(), s, order - 1);
        // g^{(k)} s^k / k! = (φ^{(k-1)} s^{k-1}/(k-1)!) * s / k.
        for k in 1..=order {
            out[k] = (j1[k - 1] - j2[k - 1]) * s / (k as f64) / self.norm_const;
        }
        out
    }
}

/// Build a Gevrey cutoff and its derivative-oracle datum (a function of the
/// first coordinate on the line).
pub fn make_gevrey_cutoff(
    rho: Rational64,
    support: [f64; 2],
    plateau: [f64; 2],
    mollifier_width: f64,
    quadrature_order: usize,
) -> Result<(GevreyCutoff, CauchyData), DataError> {
    let rho_f = *rho.numer() as f64 / *rho.denom() as f64;
    if rho_f <= 1.0 {
        return Err(DataError::InfeasibleGeometry(format!(
            "Gevrey order must exceed 1, got {rho}"
        )));
    }
    if !(support[0] < plateau[0] && plateau[0] < plateau[1] && plateau[1] < support[1]) {
        return Err(DataError::InfeasibleGeometry(
            "plateau must lie strictly inside the support".into(),
        ));
    }
    if mollifier_width <= 0.0 {
        return Err(DataError::InfeasibleGeometry(
            "mollifier width must be positive".into(),
        ));
    }
    let gap_left = plateau[0] - support[0];
    let gap_right = support[1] - plateau[1];
    if mollifier_width > gap_left || mollifier_width > gap_right {
        return Err(DataError::InfeasibleGeometry(format!(
            "plateau dilated by width {mollifier_width} exceeds the support \
             (gaps {gap_left} / {gap_right})"
        )));
    }

    let mut cutoff = GevreyCutoff {
        rho,
        support,
        plateau,
        mollifier_width,
        quadrature_order,
        norm_const: 1.0,
        norm_err: 0.0,
        max_order: 0,
    };
    let w = cutoff.half_width();
    let z = integrate_adaptive(
        |x| Complex64::new(cutoff.bump_raw(x), 0.0),
        -w,
        w,
        1e-300,
        1e-14,
        60_000,
        quadrature_order.max(8),
    );
    if !(z.value.re > 0.0) {
        return Err(DataError::InfeasibleGeometry(
            "bump normalization integral is not positive".into(),
        ));
    }
    cutoff.norm_const = z.value.re;
    cutoff.norm_err = z.error;

    // Raw g^{(k)} grows like (1/w)^k k^{ρk}; cap the oracle at the largest
    // order whose value stays within f64 range.
    let mut max_order = 1u32;
    for k in 1..=500u32 {
        let kf = k as f64;
        let ln_est = kf * ((1.0 / w).ln().max(0.0) + rho_f * kf.ln() + 1.0);
        if ln_est > 690.0 {
            break;
        }
        max_order = k;
    }
    cutoff.max_order = max_order;

    let oracle_cutoff = cutoff.clone();
    let oracle: DerivOracle = Arc::new(move |point: &[f64], alpha: &[u32]| {
        if alpha.iter().skip(1).any(|&a| a > 0) {
            // g depends on the first coordinate only.
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let k = alpha.first().copied().unwrap_or(0);
        oracle_cutoff.derivative(point[0], k)
    });
    let data = CauchyData::Numeric(NumericData::new(1, max_order, oracle));
    Ok((cutoff, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_example() -> (GevreyCutoff, CauchyData) {
        make_gevrey_cutoff(
            Rational64::new(3, 2),
            [-3.0, -0.5],
            [-2.5, -0.75],
            0.2,
            16,
        )
        .unwrap()
    }

    #[test]
    fn plateau_and_exterior_values() {
        let (g, data) = spec_example();
        assert_eq!(g.value(-2.0).0, 1.0);
        assert_eq!(g.value(0.0).0, 0.0);
        assert_eq!(g.value(-3.0).0, 0.0);
        let (v, _) = data.evaluate(&[-2.0]);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn normalized_bump_integrates_to_one() {
        let (g, _) = spec_example();
        // CDF at the right edge must be exactly 1 by construction.
        assert_eq!(g.bump_cdf(g.half_width()).0, 1.0);
        // And just inside, the quadrature value approaches 1.
        let (v, err) = g.bump_cdf(g.half_width() * 0.999999);
        assert!((v - 1.0).abs() < 1e-6 + err);
    }

    #[test]
    fn ramps_transition_monotonically() {
        let (g, _) = spec_example();
        let mut last = -1e-12;
        for i in 0..=40 {
            let x = -2.72 + 0.24 * (i as f64) / 40.0;
            let v = g.value(x).0;
            assert!(v >= last - 1e-9, "not monotone at {x}");
            last = v;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (g, _) = spec_example();
        // Mid-ramp point.
        let x = -2.55;
        let h = 1e-6;
        let fd = (g.value(x + h).0 - g.value(x - h).0) / (2.0 * h);
        let (d1, _) = g.derivative(x, 1);
        assert!(
            (d1.re - fd).abs() < 1e-5 * d1.re.abs().max(1.0),
            "{} vs {}",
            d1.re,
            fd
        );
    }

    #[test]
    fn infeasible_geometry_rejected() {
        let r = make_gevrey_cutoff(
            Rational64::new(3, 2),
            [-1.0, 1.0],
            [-0.9, 0.9],
            0.5,
            8,
        );
        assert!(matches!(r, Err(DataError::InfeasibleGeometry(_))));
        let r = make_gevrey_cutoff(Rational64::new(1, 1), [-1.0, 1.0], [-0.5, 0.5], 0.1, 8);
        assert!(matches!(r, Err(DataError::InfeasibleGeometry(_))));
    }

    #[test]
    fn oracle_ignores_other_variables() {
        let (_, data) = spec_example();
        // The datum is a function of x1 alone; cross-derivatives vanish.
        let d = data.differentiate(&[1]).unwrap();
        let (v, _) = d.evaluate(&[-2.0]);
        // Interior of plateau: derivative 0.
        assert!(v.norm() < 1e-12);
    }
}
