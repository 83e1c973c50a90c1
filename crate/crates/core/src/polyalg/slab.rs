//! Slab decomposition `P = Σ_k Q_k(x_1..x_{d-1}) x_d^k` and the structural
//! hypothesis checks: `e_1` characteristic, `e_d` non-characteristic,
//! `deg_{x1} Q_k < m - k`, the growth exponent `γ`, and verification that the
//! real zero set of the principal part is the single line `span{e_1}`.

use super::univariate::{self, RatPoly};
use super::{ComplexScalar, Mode, MultiPoly, PolyError};
use crate::numeric::{all_roots, polish_root, poly_eval};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Outcome of the single-characteristic-direction verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleDirection {
    /// Certified by exact real-root counting (d = 2, exact mode).
    ExactVerified,
    /// Numeric root check (d = 2, float mode) or sphere sampling (d >= 3)
    /// found zeros only along `span{e_1}`.
    SampledPlausible,
    /// A real characteristic direction other than `span{e_1}` was found, or
    /// `e_1` is not characteristic at all.
    Failed,
    /// The check was not decisive (e.g. dimension beyond the sampled range).
    Unknown,
}

/// Structural report for the hypotheses of the slab-solution construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub e1_characteristic: bool,
    pub ed_noncharacteristic: bool,
    /// `deg_{x1} Q_k < m - k` for every `k < m`.
    pub degx1_ok: bool,
    /// `max_{k<m, Q_k != 0} deg_{x1}(Q_k) / (m-k)`, present iff `degx1_ok`.
    #[serde(with = "ratio_string", default)]
    pub gamma: Option<Rational64>,
    pub single_direction: SingleDirection,
}

impl HypothesisReport {
    /// All structural hypotheses hold (single-direction not contradicted).
    pub fn structural_pass(&self) -> bool {
        self.e1_characteristic
            && self.ed_noncharacteristic
            && self.degx1_ok
            && self.single_direction != SingleDirection::Failed
    }

    pub fn gamma_f64(&self) -> Option<f64> {
        self.gamma
            .map(|g| *g.numer() as f64 / *g.denom() as f64)
    }
}

mod ratio_string {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|r| format!("{}/{}", r.numer(), r.denom()))
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Rational64>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        match s {
            None => Ok(None),
            Some(s) => {
                let (p, q) = s
                    .split_once('/')
                    .ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
                let p: i64 = p.parse().map_err(serde::de::Error::custom)?;
                let q: i64 = q.parse().map_err(serde::de::Error::custom)?;
                Ok(Some(Rational64::new(p, q)))
            }
        }
    }
}

/// `P` written as `Σ_k Q_k(x_1..x_{d-1}) x_d^k` with `Q_m` constant.
#[derive(Debug, Clone)]
pub struct SlabDecomposition {
    base: MultiPoly,
    m: u32,
    q_list: Vec<MultiPoly>,
    leading_coeff: ComplexScalar,
    normalized: bool,
}

impl SlabDecomposition {
    pub fn base(&self) -> &MultiPoly {
        &self.base
    }

    /// Total degree of `P` (= the `x_d`-degree, `e_d` being non-characteristic).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// `Q_0 .. Q_m`, polynomials in `d-1` variables.
    pub fn q_list(&self) -> &[MultiPoly] {
        &self.q_list
    }

    pub fn q(&self, k: usize) -> &MultiPoly {
        &self.q_list[k]
    }

    /// Original leading coefficient `Q_m` before any normalization.
    pub fn leading_coeff(&self) -> &ComplexScalar {
        &self.leading_coeff
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn mode(&self) -> Mode {
        self.base.mode()
    }

    /// `Σ_k Q_k x_d^k`; equals `base` (divided by `leading_coeff` when
    /// normalized).
    pub fn reassemble(&self) -> MultiPoly {
        let d = self.dim();
        let mode = self.mode();
        let xd = MultiPoly::variable(d, d - 1, mode);
        let mut acc = MultiPoly::zero(d, mode);
        let mut xd_pow = MultiPoly::one(d, mode);
        for q in &self.q_list {
            let lifted = q.lift_last();
            acc = acc.add(&lifted.mul(&xd_pow).expect("same dim")).expect("same dim");
            xd_pow = xd_pow.mul(&xd).expect("same dim");
        }
        acc
    }

    /// Convert all coefficient data to binary64.
    pub fn to_float(&self) -> SlabDecomposition {
        SlabDecomposition {
            base: self.base.to_float(),
            m: self.m,
            q_list: self.q_list.iter().map(|q| q.to_float()).collect(),
            leading_coeff: self.leading_coeff.to_float(),
            normalized: self.normalized,
        }
    }
}

/// Decompose `P` along the last variable. Fails when `e_d` is characteristic
/// (the leading coefficient `Q_m` would vanish).
pub fn slab_decompose(p: &MultiPoly, normalize: bool) -> Result<SlabDecomposition, PolyError> {
    let m = p.degree().ok_or(PolyError::ZeroPolynomial)?;
    let d = p.dim();
    if d < 2 {
        return Err(PolyError::DimMismatch(d, 2));
    }
    // P_m(e_d) is the coefficient of x_d^m.
    let mut ed_alpha = vec![0u32; d];
    ed_alpha[d - 1] = m;
    let lead = p.coeff(&ed_alpha);
    if lead.is_zero() {
        return Err(PolyError::CharacteristicEd {
            value: lead.to_string(),
        });
    }

    let mut q_list = p.collect_wrt_last();
    q_list.resize(m as usize + 1, MultiPoly::zero(d - 1, p.mode()));
    debug_assert!(q_list[m as usize].degree() == Some(0));

    if normalize {
        for q in q_list.iter_mut() {
            *q = q
                .scale(&ComplexScalar::one(p.mode()).div(&lead))
                .expect("same mode");
        }
    }

    for (k, q) in q_list.iter().enumerate() {
        debug_assert!(
            q.degree().map_or(true, |dq| dq <= m - k as u32),
            "deg Q_k <= m-k must hold"
        );
    }

    Ok(SlabDecomposition {
        base: p.clone(),
        m,
        q_list,
        leading_coeff: lead,
        normalized: normalize,
    })
}

/// Binary-form coefficients of the principal part in d = 2:
/// `P_m(x1, x2) = Σ_j c_j x1^{m-j} x2^j`, returned low -> high in `j`.
fn binary_form_coeffs(pm: &MultiPoly) -> Vec<ComplexScalar> {
    let m = pm.degree().unwrap_or(0);
    let mut out = vec![ComplexScalar::zero(pm.mode()); m as usize + 1];
    for (alpha, c) in pm.terms() {
        out[alpha[1] as usize] = c.clone();
    }
    out
}

fn exact_single_direction_2d(pm: &MultiPoly) -> SingleDirection {
    // p(t) = P_m(1, t); real characteristic directions (1, t) correspond to
    // common real roots of Re p and Im p, plus e_2 when P_m(0,1) = 0.
    let coeffs = binary_form_coeffs(pm);
    let m = coeffs.len() - 1;
    if !coeffs[m].mode().eq(&Mode::Exact) {
        return SingleDirection::Unknown;
    }
    if coeffs[m].is_zero() {
        // e_2 characteristic: the zero set is larger than span{e_1}.
        return SingleDirection::Failed;
    }
    let mut re: RatPoly = Vec::new();
    let mut im: RatPoly = Vec::new();
    for c in &coeffs {
        match c {
            ComplexScalar::Exact { re: r, im: i } => {
                re.push(r.clone());
                im.push(i.clone());
            }
            ComplexScalar::Float(_) => return SingleDirection::Unknown,
        }
    }
    let re = univariate::trim(re);
    let im = univariate::trim(im);
    let g = if im.is_empty() {
        re
    } else if re.is_empty() {
        im
    } else {
        univariate::gcd(&re, &im)
    };
    if univariate::degree(&g).map_or(true, |d| d == 0) {
        // No real root at all: e_1 is not characteristic.
        return SingleDirection::Failed;
    }
    let (k, cofactor) = univariate::split_power_of_t(&g);
    if k == 0 {
        // t = 0 (the direction e_1) is not a zero.
        return SingleDirection::Failed;
    }
    if univariate::count_real_roots(&cofactor) == 0 {
        SingleDirection::ExactVerified
    } else {
        SingleDirection::Failed
    }
}

fn float_single_direction_2d(pm: &MultiPoly) -> SingleDirection {
    let coeffs: Vec<Complex64> = binary_form_coeffs(pm).iter().map(|c| c.to_c64()).collect();
    let m = coeffs.len() - 1;
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return SingleDirection::Unknown;
    }
    if coeffs[m].norm() <= 1e-12 * scale {
        return SingleDirection::Failed;
    }
    match all_roots(&coeffs) {
        Ok(roots) => {
            let mut saw_zero = false;
            for r in roots {
                if r.im.abs() <= 1e-8 * (1.0 + r.re.abs()) {
                    if r.re.abs() <= 1e-8 {
                        saw_zero = true;
                    } else {
                        return SingleDirection::Failed;
                    }
                }
            }
            if saw_zero {
                SingleDirection::SampledPlausible
            } else {
                SingleDirection::Failed
            }
        }
        Err(_) => SingleDirection::Unknown,
    }
}

fn sampled_single_direction(pm: &MultiPoly, seed: u64) -> SingleDirection {
    let d = pm.dim();
    if d > 4 {
        return SingleDirection::Unknown;
    }
    let m = match pm.degree() {
        Some(m) => m,
        None => return SingleDirection::Unknown,
    };
    // e_1 must be characteristic.
    let mut e1 = vec![Complex64::new(0.0, 0.0); d];
    e1[0] = Complex64::new(1.0, 0.0);
    let scale: f64 = pm
        .terms()
        .map(|(_, c)| c.to_c64().norm())
        .fold(0.0, f64::max);
    if pm.eval_c64(&e1).norm() > 1e-10 * scale {
        return SingleDirection::Failed;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 20_000usize;
    let mut suspicious = false;
    for _ in 0..samples {
        // Gaussian direction sample.
        let mut v: Vec<f64> = (0..d)
            .map(|_| {
                let u1: f64 = rng.gen_range(1e-12..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        // Distance from span{e_1}: the norm of the tail components.
        let off_axis = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if off_axis < 0.05 {
            continue;
        }
        let point: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let val = pm.eval_c64(&point).norm();
        // Homogeneous of degree m and |v| = 1: compare against the
        // coefficient scale.
        if val < 1e-7 * scale * off_axis.powi(m as i32) {
            suspicious = true;
            break;
        }
    }
    if suspicious {
        SingleDirection::Failed
    } else {
        SingleDirection::SampledPlausible
    }
}

const DEFAULT_SAMPLE_SEED: u64 = 0x0c0ffee;

/// Evaluate the structural hypotheses on a slab decomposition.
pub fn check_hypotheses(dec: &SlabDecomposition) -> HypothesisReport {
    check_hypotheses_seeded(dec, DEFAULT_SAMPLE_SEED)
}

/// Hypothesis report straight from a symbol, tolerating operators for which
/// the slab decomposition itself fails (`e_d` characteristic): those report
/// `ed_noncharacteristic = false` with the degree fields unavailable.
pub fn analyze_symbol(p: &MultiPoly, seed: u64) -> Result<HypothesisReport, PolyError> {
    match slab_decompose(p, true) {
        Ok(dec) => Ok(check_hypotheses_seeded(&dec, seed)),
        Err(PolyError::CharacteristicEd { .. }) => {
            let d = p.dim();
            let m = p.degree().ok_or(PolyError::ZeroPolynomial)?;
            let pm = p.principal_part()?;
            let mut e1_alpha = vec![0u32; d];
            e1_alpha[0] = m;
            let single_direction = if d == 2 {
                match p.mode() {
                    Mode::Exact => exact_single_direction_2d(&pm),
                    Mode::Float => float_single_direction_2d(&pm),
                }
            } else {
                sampled_single_direction(&pm, seed)
            };
            Ok(HypothesisReport {
                e1_characteristic: pm.coeff(&e1_alpha).is_zero(),
                ed_noncharacteristic: false,
                degx1_ok: false,
                gamma: None,
                single_direction,
            })
        }
        Err(e) => Err(e),
    }
}

/// As [`check_hypotheses`] with an explicit seed for the sampled heuristic
/// used beyond d = 2.
pub fn check_hypotheses_seeded(dec: &SlabDecomposition, seed: u64) -> HypothesisReport {
    let p = dec.base();
    let d = p.dim();
    let m = dec.m();
    let pm = p.principal_part().expect("decomposition implies nonzero");

    // P_m(e_1) is the coefficient of x_1^m.
    let mut e1_alpha = vec![0u32; d];
    e1_alpha[0] = m;
    let e1_characteristic = pm.coeff(&e1_alpha).is_zero();

    let mut ed_alpha = vec![0u32; d];
    ed_alpha[d - 1] = m;
    let ed_noncharacteristic = !pm.coeff(&ed_alpha).is_zero();

    let mut degx1_ok = true;
    let mut gamma = Rational64::zero();
    for k in 0..m as usize {
        let q = dec.q(k);
        if q.is_zero() {
            continue;
        }
        let deg1 = q.degree_in(0).unwrap_or(0) as i64;
        let denom = (m as i64) - (k as i64);
        if deg1 >= denom {
            degx1_ok = false;
            break;
        }
        let ratio = Rational64::new(deg1, denom);
        if ratio > gamma {
            gamma = ratio;
        }
    }

    let single_direction = if d == 2 {
        match p.mode() {
            Mode::Exact => exact_single_direction_2d(&pm),
            Mode::Float => float_single_direction_2d(&pm),
        }
    } else {
        sampled_single_direction(&pm, seed)
    };

    HypothesisReport {
        e1_characteristic,
        ed_noncharacteristic,
        degx1_ok,
        gamma: degx1_ok.then_some(gamma),
        single_direction,
    }
}

/// All real projective characteristic directions of a nonzero `P` in d = 2,
/// each reported once, normalized so the first nonzero coordinate is
/// positive. Directions `(1, t)/|(1, t)|` come from real roots of
/// `t -> P_m(1, t)`; `e_2` is appended when `P_m(0, 1) = 0`.
pub fn characteristic_directions_2d(p: &MultiPoly) -> Result<Vec<[f64; 2]>, PolyError> {
    if p.dim() != 2 {
        return Err(PolyError::DimMismatch(p.dim(), 2));
    }
    let pm = p.principal_part()?;
    let coeffs = binary_form_coeffs(&pm);
    let m = coeffs.len() - 1;

    // Real roots of P_m(1, t): for exact input, roots of gcd(Re, Im); for
    // float input, near-real roots of the complex polynomial.
    let mut real_roots: Vec<f64> = Vec::new();
    match p.mode() {
        Mode::Exact => {
            let mut re: RatPoly = Vec::new();
            let mut im: RatPoly = Vec::new();
            for c in &coeffs {
                if let ComplexScalar::Exact { re: r, im: i } = c {
                    re.push(r.clone());
                    im.push(i.clone());
                }
            }
            let re = univariate::trim(re);
            let im = univariate::trim(im);
            let g = if im.is_empty() {
                re
            } else if re.is_empty() {
                im
            } else {
                univariate::gcd(&re, &im)
            };
            if univariate::degree(&g).is_some_and(|dg| dg >= 1) {
                let gf: Vec<Complex64> = g
                    .iter()
                    .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
                    .collect();
                let roots = all_roots(&gf)?;
                for r in roots {
                    if r.im.abs() <= 1e-8 * (1.0 + r.re.abs()) {
                        let mut t = polish_root(&gf, Complex64::new(r.re, 0.0), 30).re;
                        if t.abs() <= 1e-12 * (1.0 + t.abs()) {
                            t = 0.0;
                        }
                        let scale = gf.iter().map(|c| c.norm()).fold(0.0, f64::max)
                            * (1.0 + t.abs()).powi(gf.len() as i32 - 1);
                        let residual = poly_eval(&gf, Complex64::new(t, 0.0)).norm();
                        if residual > 1e-9 * scale {
                            return Err(PolyError::RootResidual {
                                residual,
                                tol: 1e-9 * scale,
                            });
                        }
                        real_roots.push(t);
                    }
                }
            }
        }
        Mode::Float => {
            let cf: Vec<Complex64> = coeffs.iter().map(|c| c.to_c64()).collect();
            let scale = cf.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale > 0.0 {
                let roots = all_roots(&cf)?;
                for r in roots {
                    if r.im.abs() <= 1e-8 * (1.0 + r.re.abs()) {
                        let mut t = r.re;
                        if t.abs() <= 1e-12 * (1.0 + t.abs()) {
                            t = 0.0;
                        }
                        let residual = poly_eval(&cf, Complex64::new(t, 0.0)).norm();
                        let tol = 1e-8 * scale * (1.0 + t.abs()).powi(m as i32);
                        if residual > tol {
                            return Err(PolyError::RootResidual { residual, tol });
                        }
                        real_roots.push(t);
                    }
                }
            }
        }
    }

    real_roots.sort_by(|a, b| a.total_cmp(b));
    real_roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * (1.0 + a.abs()));

    let mut dirs: Vec<[f64; 2]> = real_roots
        .iter()
        .map(|&t| {
            let norm = (1.0 + t * t).sqrt();
            [1.0 / norm, t / norm]
        })
        .collect();
    if coeffs[m].is_zero() || coeffs[m].to_c64().norm() == 0.0 {
        dirs.push([0.0, 1.0]);
    }
    Ok(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn heat_decomposition() {
        let p = parse_poly("i*x1 + x2^2", 2).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        assert_eq!(dec.m(), 2);
        assert_eq!(dec.q(0), &parse_poly("i*x1", 1).unwrap());
        assert!(dec.q(1).is_zero());
        assert!(dec.q(2).is_one_poly());
        assert_eq!(dec.reassemble(), p);
    }

    #[test]
    fn pure_power_decomposition() {
        let p = parse_poly("x3^4", 3).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        assert_eq!(dec.m(), 4);
        for k in 0..4 {
            assert!(dec.q(k).is_zero());
        }
        assert!(dec.q(4).is_one_poly());
    }

    #[test]
    fn schrodinger_decomposition() {
        let p = parse_poly("-x1 + x2^2", 2).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        assert_eq!(dec.q(0), &parse_poly("-x1", 1).unwrap());
        assert!(dec.q(1).is_zero());
        assert!(dec.q(2).is_one_poly());
    }

    #[test]
    fn characteristic_ed_rejected() {
        let p = parse_poly("x1*x2", 2).unwrap();
        assert!(matches!(
            slab_decompose(&p, true),
            Err(PolyError::CharacteristicEd { .. })
        ));
    }

    #[test]
    fn heat_hypotheses() {
        let p = parse_poly("i*x1 + x2^2", 2).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        let rep = check_hypotheses(&dec);
        assert!(rep.e1_characteristic);
        assert!(rep.ed_noncharacteristic);
        assert!(rep.degx1_ok);
        assert_eq!(rep.gamma, Some(Rational64::new(1, 2)));
        assert_eq!(rep.single_direction, SingleDirection::ExactVerified);
    }

    #[test]
    fn schrodinger_hypotheses() {
        let p = parse_poly("-x1 + x2^2", 2).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        let rep = check_hypotheses(&dec);
        assert!(rep.structural_pass());
        assert_eq!(rep.gamma, Some(Rational64::new(1, 2)));
    }

    #[test]
    fn directions_heat_elliptic_product() {
        let heat = parse_poly("i*x1 + x2^2", 2).unwrap();
        let dirs = characteristic_directions_2d(&heat).unwrap();
        assert_eq!(dirs.len(), 1);
        assert!((dirs[0][0] - 1.0).abs() < 1e-12 && dirs[0][1].abs() < 1e-12);

        let elliptic = parse_poly("x1^2 + x2^2", 2).unwrap();
        assert!(characteristic_directions_2d(&elliptic).unwrap().is_empty());

        let product = parse_poly("x1*x2 + 1", 2).unwrap();
        let dirs = characteristic_directions_2d(&product).unwrap();
        assert_eq!(dirs.len(), 2);
        assert!((dirs[0][0] - 1.0).abs() < 1e-12 && dirs[0][1].abs() < 1e-12);
        assert!(dirs[1][0].abs() < 1e-12 && (dirs[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_operator_fails_single_direction() {
        // x1^2 - x2^2 has two real characteristic directions.
        let p = parse_poly("x1^2 - x2^2 + x2^2 + i*x1 + x2^2", 2).unwrap();
        // = x1^2 + i*x1 + x2^2: P_m = x1^2 + x2^2, e1 NOT characteristic.
        let dec = slab_decompose(&p, true).unwrap();
        let rep = check_hypotheses(&dec);
        assert!(!rep.e1_characteristic);
        assert_eq!(rep.single_direction, SingleDirection::Failed);
    }

    #[test]
    fn sampled_heuristic_d3_heat() {
        let p = parse_poly("i*x1 + x2^2 + x3^2", 3).unwrap();
        let dec = slab_decompose(&p, true).unwrap();
        let rep = check_hypotheses(&dec);
        assert!(rep.e1_characteristic && rep.ed_noncharacteristic && rep.degx1_ok);
        assert_eq!(rep.single_direction, SingleDirection::SampledPlausible);
    }
}

impl MultiPoly {
    /// Constant polynomial equal to one?
    pub fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeff(&vec![0; self.dim()]).is_one()
    }
}
