//! Representations of Cauchy data closed under constant-coefficient
//! differential operators, plus jet arithmetic and Gevrey cutoffs.
//!
//! Three datum classes, all closed under differentiation:
//! polynomials, exponential-polynomials `Σ e^{i<λ,x>} p(x)`, and numeric data
//! backed by a derivative oracle with a hard order cap.

mod cutoff;
mod jet;

pub use cutoff::{make_gevrey_cutoff, GevreyCutoff};
pub use jet::{bump_jet_scaled, exp_scaled, Jet, ScaledJet};

use crate::polyalg::{ComplexScalar, Mode, MultiPoly, PolyError};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("derivative order {requested} exceeds numeric data cap {max}")]
    OrderExceeded { requested: u32, max: u32 },
    #[error("jet centers differ: {a} vs {b}")]
    CenterMismatch { a: f64, b: f64 },
    #[error("jet orders differ: {a} vs {b}")]
    OrderMismatch { a: usize, b: usize },
    #[error("jet operation requires a nonzero leading coefficient")]
    SingularJet,
    #[error("infeasible cutoff geometry: {0}")]
    InfeasibleGeometry(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Derivative oracle: `(point, multi-index) -> (value, absolute error)`.
pub type DerivOracle = Arc<dyn Fn(&[f64], &[u32]) -> (Complex64, f64) + Send + Sync>;

/// Numeric datum: a derivative oracle valid up to total order `max_order`.
#[derive(Clone)]
pub struct NumericData {
    dim: usize,
    max_order: u32,
    oracle: DerivOracle,
}

impl NumericData {
    pub fn new(dim: usize, max_order: u32, oracle: DerivOracle) -> Self {
        NumericData {
            dim,
            max_order,
            oracle,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn query(&self, point: &[f64], alpha: &[u32]) -> Result<(Complex64, f64), DataError> {
        let order: u32 = alpha.iter().sum();
        if order > self.max_order {
            return Err(DataError::OrderExceeded {
                requested: order,
                max: self.max_order,
            });
        }
        Ok((self.oracle)(point, alpha))
    }
}

impl fmt::Debug for NumericData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericData")
            .field("dim", &self.dim)
            .field("max_order", &self.max_order)
            .finish_non_exhaustive()
    }
}

/// A boundary datum on `ℝ^{d-1}`.
#[derive(Debug, Clone)]
pub enum CauchyData {
    Poly(MultiPoly),
    /// Finite sum `Σ e^{i<λ,x>} p(x)`; terms sorted by frequency and
    /// deduplicated, zero coefficient polynomials dropped.
    ExpPoly(ExpPolyData),
    Numeric(NumericData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolyData {
    dim: usize,
    mode: Mode,
    terms: Vec<(Vec<ComplexScalar>, MultiPoly)>,
}

fn scalar_sort_key(c: &ComplexScalar) -> (f64, f64) {
    let z = c.to_c64();
    (z.re, z.im)
}

fn freq_cmp(a: &[ComplexScalar], b: &[ComplexScalar]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let (xr, xi) = scalar_sort_key(x);
        let (yr, yi) = scalar_sort_key(y);
        let ord = xr.total_cmp(&yr).then(xi.total_cmp(&yi));
        if ord != std::cmp::Ordering::Equal {
            // Exact scalars with equal float image still compare via the
            // exact representation below.
            return ord;
        }
        if x != y {
            return format!("{x}").cmp(&format!("{y}"));
        }
    }
    std::cmp::Ordering::Equal
}

impl ExpPolyData {
    pub fn new(
        dim: usize,
        mode: Mode,
        terms: impl IntoIterator<Item = (Vec<ComplexScalar>, MultiPoly)>,
    ) -> Result<Self, DataError> {
        let mut collected: Vec<(Vec<ComplexScalar>, MultiPoly)> = Vec::new();
        for (freq, poly) in terms {
            if freq.len() != dim {
                return Err(DataError::DimMismatch(freq.len(), dim));
            }
            if poly.dim() != dim {
                return Err(DataError::DimMismatch(poly.dim(), dim));
            }
            if poly.mode() != mode || freq.iter().any(|c| c.mode() != mode) {
                return Err(DataError::Poly(PolyError::ModeMismatch));
            }
            collected.push((freq, poly));
        }
        collected.sort_by(|a, b| freq_cmp(&a.0, &b.0));
        // Merge equal frequencies.
        let mut merged: Vec<(Vec<ComplexScalar>, MultiPoly)> = Vec::new();
        for (freq, poly) in collected {
            match merged.last_mut() {
                Some((last_freq, last_poly)) if *last_freq == freq => {
                    *last_poly = last_poly.add(&poly)?;
                }
                _ => merged.push((freq, poly)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        Ok(ExpPolyData {
            dim,
            mode,
            terms: merged,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[(Vec<ComplexScalar>, MultiPoly)] {
        &self.terms
    }
}

impl CauchyData {
    pub fn zero(dim: usize, mode: Mode) -> Self {
        CauchyData::Poly(MultiPoly::zero(dim, mode))
    }

    /// Single plane wave `e^{i<λ,x>}`.
    pub fn plane_wave(freq: Vec<ComplexScalar>) -> Result<Self, DataError> {
        let dim = freq.len();
        let mode = freq
            .first()
            .map(|c| c.mode())
            .unwrap_or(Mode::Exact);
        Ok(CauchyData::ExpPoly(ExpPolyData::new(
            dim,
            mode,
            [(freq, MultiPoly::one(dim, mode))],
        )?))
    }

    pub fn dim(&self) -> usize {
        match self {
            CauchyData::Poly(p) => p.dim(),
            CauchyData::ExpPoly(e) => e.dim,
            CauchyData::Numeric(n) => n.dim,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            CauchyData::Poly(p) => p.mode(),
            CauchyData::ExpPoly(e) => e.mode,
            CauchyData::Numeric(_) => Mode::Float,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, CauchyData::Numeric(_))
    }

    /// Symbolically zero? (`false` for numeric data: not decidable.)
    pub fn is_zero(&self) -> bool {
        match self {
            CauchyData::Poly(p) => p.is_zero(),
            CauchyData::ExpPoly(e) => e.terms.is_empty(),
            CauchyData::Numeric(_) => false,
        }
    }

    /// Plain partial derivative `∂^alpha`; exact on symbolic variants.
    pub fn differentiate(&self, alpha: &[u32]) -> Result<CauchyData, DataError> {
        if alpha.len() != self.dim() {
            return Err(DataError::DimMismatch(alpha.len(), self.dim()));
        }
        match self {
            CauchyData::Poly(p) => {
                let mut out = p.clone();
                for (j, &e) in alpha.iter().enumerate() {
                    for _ in 0..e {
                        out = out.partial_derivative(j);
                    }
                }
                Ok(CauchyData::Poly(out))
            }
            CauchyData::ExpPoly(e) => {
                let mode = e.mode;
                let i = ComplexScalar::i(mode);
                let mut terms = Vec::with_capacity(e.terms.len());
                for (freq, poly) in &e.terms {
                    // ∂_j (e^{i<λ,x>} p) = e^{i<λ,x>} (i λ_j p + ∂_j p)
                    let mut p = poly.clone();
                    for (j, &order) in alpha.iter().enumerate() {
                        let ilj = i.mul(&freq[j]);
                        for _ in 0..order {
                            p = p.scale(&ilj)?.add(&p.partial_derivative(j))?;
                        }
                    }
                    terms.push((freq.clone(), p));
                }
                Ok(CauchyData::ExpPoly(ExpPolyData::new(e.dim, mode, terms)?))
            }
            CauchyData::Numeric(n) => {
                let total: u32 = alpha.iter().sum();
                if total > n.max_order {
                    return Err(DataError::OrderExceeded {
                        requested: total,
                        max: n.max_order,
                    });
                }
                let base = n.oracle.clone();
                let shift = alpha.to_vec();
                let oracle: DerivOracle = Arc::new(move |point, beta| {
                    let combined: Vec<u32> =
                        shift.iter().zip(beta.iter()).map(|(a, b)| a + b).collect();
                    base(point, &combined)
                });
                Ok(CauchyData::Numeric(NumericData {
                    dim: n.dim,
                    max_order: n.max_order - total,
                    oracle,
                }))
            }
        }
    }

    /// Value with an absolute error estimate (zero for symbolic variants).
    pub fn evaluate(&self, point: &[f64]) -> (Complex64, f64) {
        match self {
            CauchyData::Poly(p) => {
                let z: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                (p.eval_c64(&z), 0.0)
            }
            CauchyData::ExpPoly(e) => {
                let z: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for (freq, poly) in &e.terms {
                    let mut phase = Complex64::new(0.0, 0.0);
                    for (l, x) in freq.iter().zip(point.iter()) {
                        phase += Complex64::new(0.0, 1.0) * l.to_c64() * *x;
                    }
                    acc += phase.exp() * poly.eval_c64(&z);
                }
                (acc, 0.0)
            }
            CauchyData::Numeric(n) => {
                let alpha = vec![0u32; n.dim];
                (n.oracle)(point, &alpha)
            }
        }
    }

    pub fn neg(&self) -> CauchyData {
        self.scale_c64_or_exact(&ComplexScalar::from_int(-1, self.mode()))
            .expect("negation never mixes modes")
    }

    /// Scale by a scalar of matching mode (numeric data accepts both modes).
    pub fn scale(&self, c: &ComplexScalar) -> Result<CauchyData, DataError> {
        self.scale_c64_or_exact(c)
    }

    fn scale_c64_or_exact(&self, c: &ComplexScalar) -> Result<CauchyData, DataError> {
        match self {
            CauchyData::Poly(p) => Ok(CauchyData::Poly(p.scale(c)?)),
            CauchyData::ExpPoly(e) => {
                let mut terms = Vec::with_capacity(e.terms.len());
                for (freq, poly) in &e.terms {
                    terms.push((freq.clone(), poly.scale(c)?));
                }
                Ok(CauchyData::ExpPoly(ExpPolyData::new(e.dim, e.mode, terms)?))
            }
            CauchyData::Numeric(n) => {
                let z = c.to_c64();
                let base = n.oracle.clone();
                let oracle: DerivOracle = Arc::new(move |point, alpha| {
                    let (v, err) = base(point, alpha);
                    (v * z, err * z.norm())
                });
                Ok(CauchyData::Numeric(NumericData {
                    dim: n.dim,
                    max_order: n.max_order,
                    oracle,
                }))
            }
        }
    }

    /// Sum; symbolic variants stay symbolic (a polynomial mixing with an
    /// exponential-polynomial is promoted via the zero frequency), numeric
    /// data absorbs everything into a combined oracle.
    pub fn add(&self, other: &CauchyData) -> Result<CauchyData, DataError> {
        if self.dim() != other.dim() {
            return Err(DataError::DimMismatch(self.dim(), other.dim()));
        }
        match (self, other) {
            (CauchyData::Poly(a), CauchyData::Poly(b)) => Ok(CauchyData::Poly(a.add(b)?)),
            (CauchyData::ExpPoly(a), CauchyData::ExpPoly(b)) => {
                if a.mode != b.mode {
                    return Err(DataError::Poly(PolyError::ModeMismatch));
                }
                Ok(CauchyData::ExpPoly(ExpPolyData::new(
                    a.dim,
                    a.mode,
                    a.terms.iter().chain(b.terms.iter()).cloned(),
                )?))
            }
            (CauchyData::Poly(p), CauchyData::ExpPoly(_)) => {
                self.promote_to_exp(p)?.add(other)
            }
            (CauchyData::ExpPoly(_), CauchyData::Poly(p)) => {
                self.add(&other.promote_to_exp(p)?)
            }
            (CauchyData::Numeric(n), other_data) | (other_data, CauchyData::Numeric(n)) => {
                let base = n.oracle.clone();
                let rhs = other_data.clone();
                let max_order = match other_data {
                    CauchyData::Numeric(m) => n.max_order.min(m.max_order),
                    _ => n.max_order,
                };
                let oracle: DerivOracle = Arc::new(move |point, alpha| {
                    let (v1, e1) = base(point, alpha);
                    let (v2, e2) = match &rhs {
                        CauchyData::Numeric(m) => (m.oracle)(point, alpha),
                        symbolic => {
                            let d = symbolic
                                .differentiate(alpha)
                                .expect("symbolic differentiation is total");
                            d.evaluate(point)
                        }
                    };
                    (v1 + v2, e1 + e2)
                });
                Ok(CauchyData::Numeric(NumericData {
                    dim: n.dim,
                    max_order,
                    oracle,
                }))
            }
        }
    }

    fn promote_to_exp(&self, p: &MultiPoly) -> Result<CauchyData, DataError> {
        let dim = p.dim();
        let mode = p.mode();
        let zero_freq = vec![ComplexScalar::zero(mode); dim];
        Ok(CauchyData::ExpPoly(ExpPolyData::new(
            dim,
            mode,
            [(zero_freq, p.clone())],
        )?))
    }

    /// Structural equality after normal-form promotion; `None` when either
    /// side is numeric (not decidable).
    pub fn symbolic_eq(&self, other: &CauchyData) -> Option<bool> {
        match (self, other) {
            (CauchyData::Numeric(_), _) | (_, CauchyData::Numeric(_)) => None,
            (CauchyData::Poly(a), CauchyData::Poly(b)) => Some(a == b),
            _ => {
                let a = match self {
                    CauchyData::Poly(p) => self.promote_to_exp(p).ok()?,
                    other => other.clone(),
                };
                let b = match other {
                    CauchyData::Poly(p) => other.promote_to_exp(p).ok()?,
                    other => other.clone(),
                };
                match (a, b) {
                    (CauchyData::ExpPoly(x), CauchyData::ExpPoly(y)) => Some(x == y),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Cauchy-product truncation of two jets (same center and order).
pub fn jet_of_product(a: &Jet, b: &Jet) -> Result<Jet, DataError> {
    a.mul(b)
}

// JSON for the symbolic variants:
// {"variant":"poly","poly":{..}} |
// {"variant":"exp_poly","terms":[{"freq_re":[..],"freq_im":[..],"coeff":{..}}]}
// Frequencies use the same rational-string / number convention as MultiPoly.

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
enum CauchyDataRepr {
    Poly {
        poly: MultiPoly,
    },
    ExpPoly {
        dim: usize,
        mode: Mode,
        terms: Vec<ExpTermRepr>,
    },
}

#[derive(Serialize, Deserialize)]
struct ExpTermRepr {
    freq_re: Vec<String>,
    freq_im: Vec<String>,
    coeff: MultiPoly,
}

fn scalar_to_strings(c: &ComplexScalar) -> (String, String) {
    match c {
        ComplexScalar::Exact { .. } => {
            let z = c.clone();
            match z {
                ComplexScalar::Exact { re, im } => (re.to_string(), im.to_string()),
                _ => unreachable!(),
            }
        }
        ComplexScalar::Float(z) => (format!("{:e}", z.re), format!("{:e}", z.im)),
    }
}

fn scalar_from_string(s: &str, mode: Mode) -> Option<ComplexScalar> {
    match mode {
        Mode::Exact => {
            let r = if s.contains('/') {
                let (p, q) = s.split_once('/')?;
                num_rational::BigRational::new(p.trim().parse().ok()?, q.trim().parse().ok()?)
            } else {
                num_rational::BigRational::from_integer(s.trim().parse().ok()?)
            };
            Some(ComplexScalar::from_rationals(
                r,
                num_rational::BigRational::new(0.into(), 1.into()),
            ))
        }
        Mode::Float => {
            let v: f64 = s.trim().parse().ok()?;
            Some(ComplexScalar::from_c64(Complex64::new(v, 0.0)))
        }
    }
}

fn combine_re_im(re: ComplexScalar, im: ComplexScalar) -> ComplexScalar {
    match (re, im) {
        (
            ComplexScalar::Exact { re: a, .. },
            ComplexScalar::Exact { re: b, .. },
        ) => ComplexScalar::Exact { re: a, im: b },
        (ComplexScalar::Float(a), ComplexScalar::Float(b)) => {
            ComplexScalar::Float(Complex64::new(a.re, b.re))
        }
        _ => unreachable!(),
    }
}

impl Serialize for CauchyData {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CauchyData::Poly(p) => CauchyDataRepr::Poly { poly: p.clone() }.serialize(serializer),
            CauchyData::ExpPoly(e) => {
                let terms = e
                    .terms
                    .iter()
                    .map(|(freq, poly)| {
                        let (re, im): (Vec<_>, Vec<_>) =
                            freq.iter().map(scalar_to_strings).unzip();
                        ExpTermRepr {
                            freq_re: re,
                            freq_im: im,
                            coeff: poly.clone(),
                        }
                    })
                    .collect();
                CauchyDataRepr::ExpPoly {
                    dim: e.dim,
                    mode: e.mode,
                    terms,
                }
                .serialize(serializer)
            }
            CauchyData::Numeric(_) => Err(serde::ser::Error::custom(
                "numeric Cauchy data is oracle-backed and has no JSON form",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for CauchyData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CauchyDataRepr::deserialize(deserializer)?;
        match repr {
            CauchyDataRepr::Poly { poly } => Ok(CauchyData::Poly(poly)),
            CauchyDataRepr::ExpPoly { dim, mode, terms } => {
                let mut out = Vec::with_capacity(terms.len());
                for t in terms {
                    let mut freq = Vec::with_capacity(t.freq_re.len());
                    for (re, im) in t.freq_re.iter().zip(t.freq_im.iter()) {
                        let re = scalar_from_string(re, mode)
                            .ok_or_else(|| D::Error::custom("bad frequency"))?;
                        let im = scalar_from_string(im, mode)
                            .ok_or_else(|| D::Error::custom("bad frequency"))?;
                        freq.push(combine_re_im(re, im));
                    }
                    out.push((freq, t.coeff));
                }
                Ok(CauchyData::ExpPoly(
                    ExpPolyData::new(dim, mode, out).map_err(D::Error::custom)?,
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    fn poly_data(text: &str, dim: usize) -> CauchyData {
        CauchyData::Poly(parse_poly(text, dim).unwrap())
    }

    #[test]
    fn poly_power_rule() {
        let f = poly_data("x1^3", 1);
        let d2 = f.differentiate(&[2]).unwrap();
        assert_eq!(
            d2.symbolic_eq(&poly_data("6*x1", 1)),
            Some(true)
        );
    }

    #[test]
    fn exp_rule() {
        // f = e^{i λ x1} with λ = 2: ∂ f = 2i f.
        let lam = ComplexScalar::from_int(2, Mode::Exact);
        let f = CauchyData::plane_wave(vec![lam.clone()]).unwrap();
        let df = f.differentiate(&[1]).unwrap();
        let expect = f
            .scale(&ComplexScalar::i(Mode::Exact).mul(&lam))
            .unwrap();
        assert_eq!(df.symbolic_eq(&expect), Some(true));
    }

    #[test]
    fn numeric_order_cap() {
        let oracle: DerivOracle = Arc::new(|_, _| (Complex64::new(1.0, 0.0), 0.0));
        let f = CauchyData::Numeric(NumericData::new(1, 10, oracle));
        assert!(f.differentiate(&[10]).is_ok());
        assert!(matches!(
            f.differentiate(&[11]),
            Err(DataError::OrderExceeded {
                requested: 11,
                max: 10
            })
        ));
    }

    #[test]
    fn evaluation() {
        let f = poly_data("x1^2", 1);
        assert_eq!(f.evaluate(&[3.0]).0, Complex64::new(9.0, 0.0));

        // e^{i π x1} at 1 -> -1.
        let pi_ish = ComplexScalar::from_c64(Complex64::new(std::f64::consts::PI, 0.0));
        let g = CauchyData::plane_wave(vec![pi_ish]).unwrap();
        let (v, _) = g.evaluate(&[1.0]);
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-14);

        let z = CauchyData::zero(2, Mode::Exact);
        assert_eq!(z.evaluate(&[0.3, -0.7]).0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_commutativity_exp_poly() {
        let lam = ComplexScalar::from_ratio(3, 2);
        let p = parse_poly("x1^2 + x2", 2).unwrap();
        let f = CauchyData::ExpPoly(
            ExpPolyData::new(
                2,
                Mode::Exact,
                [(vec![lam.clone(), ComplexScalar::from_int(1, Mode::Exact)], p)],
            )
            .unwrap(),
        );
        let a = f.differentiate(&[1, 0]).unwrap().differentiate(&[0, 2]).unwrap();
        let b = f.differentiate(&[1, 2]).unwrap();
        assert_eq!(a.symbolic_eq(&b), Some(true));
    }

    #[test]
    fn frequencies_dedupe() {
        let lam = vec![ComplexScalar::from_int(1, Mode::Exact)];
        let one = MultiPoly::one(1, Mode::Exact);
        let e = ExpPolyData::new(
            1,
            Mode::Exact,
            [(lam.clone(), one.clone()), (lam.clone(), one.clone())],
        )
        .unwrap();
        assert_eq!(e.terms().len(), 1);
        assert_eq!(
            e.terms()[0].1.coeff(&[0]),
            ComplexScalar::from_int(2, Mode::Exact)
        );
    }

    #[test]
    fn json_round_trip_symbolic() {
        let f = poly_data("x1^2 - i*x1", 1);
        let s = serde_json::to_string(&f).unwrap();
        let g: CauchyData = serde_json::from_str(&s).unwrap();
        assert_eq!(f.symbolic_eq(&g), Some(true));
    }
}
