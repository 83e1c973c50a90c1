//! Sparse multivariate polynomial arithmetic in exact-rational or binary64
//! coefficients, the operator convention `D_j = -i ∂_j`, slab decomposition
//! along the last variable, and structural hypothesis checks.
//!
//! The sign convention is fixed here once and imported everywhere else:
//! for `P(x) = Σ a_α x^α` the operator is `P(D) u = Σ a_α (-i)^{|α|} ∂^α u`.

mod operator;
mod parse;
mod slab;
pub(crate) mod univariate;

pub use operator::apply_operator;
pub use parse::parse_poly;
pub use slab::{
    analyze_symbol, characteristic_directions_2d, check_hypotheses, check_hypotheses_seeded,
    slab_decompose, HypothesisReport, SingleDirection, SlabDecomposition,
};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Comparison tolerance used for float-mode equality checks throughout the
/// crate (absolute, on each of re/im).
pub const FLOAT_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for dimension {dim}")]
    VarOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("mixed exact/float coefficient modes are rejected")]
    ModeMismatch,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("e_d is characteristic for P: P_m(e_d) = {value}")]
    CharacteristicEd { value: String },
    #[error("decomposition must be normalized (Q_m = 1)")]
    NotNormalized,
    #[error("root finding failed: {0}")]
    Roots(#[from] crate::numeric::RootError),
    #[error("root residual {residual:e} exceeds tolerance {tol:e}")]
    RootResidual { residual: f64, tol: f64 },
}

/// Coefficient arithmetic mode. Exact mode uses arbitrary-precision Gaussian
/// rationals; float mode is binary64. Mixing modes is an error, never a
/// silent coercion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

/// A complex scalar in one of the two coefficient modes.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexScalar {
    Exact { re: BigRational, im: BigRational },
    Float(Complex64),
}

impl ComplexScalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => ComplexScalar::Exact {
                re: BigRational::zero(),
                im: BigRational::zero(),
            },
            Mode::Float => ComplexScalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        ComplexScalar::from_int(1, mode)
    }

    /// The imaginary unit.
    pub fn i(mode: Mode) -> Self {
        match mode {
            Mode::Exact => ComplexScalar::Exact {
                re: BigRational::zero(),
                im: BigRational::one(),
            },
            Mode::Float => ComplexScalar::Float(Complex64::new(0.0, 1.0)),
        }
    }

    pub fn from_int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => ComplexScalar::Exact {
                re: BigRational::from_integer(BigInt::from(n)),
                im: BigRational::zero(),
            },
            Mode::Float => ComplexScalar::Float(Complex64::new(n as f64, 0.0)),
        }
    }

    /// Exact rational `p/q`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        ComplexScalar::Exact {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rationals(re: BigRational, im: BigRational) -> Self {
        ComplexScalar::Exact { re, im }
    }

    pub fn from_c64(z: Complex64) -> Self {
        ComplexScalar::Float(z)
    }

    pub fn mode(&self) -> Mode {
        match self {
            ComplexScalar::Exact { .. } => Mode::Exact,
            ComplexScalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ComplexScalar::Exact { re, im } => re.is_zero() && im.is_zero(),
            ComplexScalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ComplexScalar::Exact { re, im } => re.is_one() && im.is_zero(),
            ComplexScalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            ComplexScalar::Exact { re, im } => Complex64::new(
                re.to_f64().unwrap_or(f64::NAN),
                im.to_f64().unwrap_or(f64::NAN),
            ),
            ComplexScalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Self {
        ComplexScalar::Float(self.to_c64())
    }

    /// Absolute-tolerance comparison; exact scalars compare exactly.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (ComplexScalar::Exact { .. }, ComplexScalar::Exact { .. }) => self == other,
            _ => {
                let a = self.to_c64();
                let b = other.to_c64();
                (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol
            }
        }
    }

    fn expect_same_mode(&self, other: &Self) {
        assert!(
            self.mode() == other.mode(),
            "mixed exact/float scalar arithmetic (checked at API boundaries)"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.expect_same_mode(other);
        match (self, other) {
            (ComplexScalar::Exact { re: a, im: b }, ComplexScalar::Exact { re: c, im: d }) => {
                ComplexScalar::Exact {
                    re: a + c,
                    im: b + d,
                }
            }
            (ComplexScalar::Float(a), ComplexScalar::Float(b)) => ComplexScalar::Float(a + b),
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            ComplexScalar::Exact { re, im } => ComplexScalar::Exact {
                re: -re.clone(),
                im: -im.clone(),
            },
            ComplexScalar::Float(z) => ComplexScalar::Float(-z),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.expect_same_mode(other);
        match (self, other) {
            (ComplexScalar::Exact { re: a, im: b }, ComplexScalar::Exact { re: c, im: d }) => {
                ComplexScalar::Exact {
                    re: a * c - b * d,
                    im: a * d + b * c,
                }
            }
            (ComplexScalar::Float(a), ComplexScalar::Float(b)) => ComplexScalar::Float(a * b),
            _ => unreachable!(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.expect_same_mode(other);
        match (self, other) {
            (ComplexScalar::Exact { re: a, im: b }, ComplexScalar::Exact { re: c, im: d }) => {
                let denom = c * c + d * d;
                assert!(!denom.is_zero(), "exact division by zero");
                ComplexScalar::Exact {
                    re: (a * c + b * d) / denom.clone(),
                    im: (b * c - a * d) / denom,
                }
            }
            (ComplexScalar::Float(a), ComplexScalar::Float(b)) => ComplexScalar::Float(a / b),
            _ => unreachable!(),
        }
    }

    /// `(-i)^k` in this scalar's mode.
    pub fn minus_i_pow(k: u32, mode: Mode) -> Self {
        let i = ComplexScalar::i(mode);
        match k % 4 {
            0 => ComplexScalar::one(mode),
            1 => i.neg(),
            2 => ComplexScalar::from_int(-1, mode),
            3 => i,
            _ => unreachable!(),
        }
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexScalar::Exact { re, im } => {
                if im.is_zero() {
                    write!(f, "{}", format_rational(re))
                } else if re.is_zero() {
                    if im.is_one() {
                        write!(f, "i")
                    } else if (-im).is_one() {
                        write!(f, "-i")
                    } else {
                        write!(f, "{}*i", format_rational(im))
                    }
                } else {
                    let sign = if im.is_negative() { "-" } else { "+" };
                    let abs_im = im.abs();
                    if abs_im.is_one() {
                        write!(f, "({}{}i)", format_rational(re), sign)
                    } else {
                        write!(f, "({}{}{}*i)", format_rational(re), sign, format_rational(&abs_im))
                    }
                }
            }
            ComplexScalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{:e}", z.re)
                } else if z.re == 0.0 {
                    write!(f, "{:e}*i", z.im)
                } else if z.im < 0.0 {
                    write!(f, "({:e}-{:e}*i)", z.re, -z.im)
                } else {
                    write!(f, "({:e}+{:e}*i)", z.re, z.im)
                }
            }
        }
    }
}

/// Sparse multivariate polynomial: map from exponent multi-indices in
/// `ℕ₀^dim` to nonzero coefficients, all in one arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    mode: Mode,
    terms: BTreeMap<Vec<u32>, ComplexScalar>,
}

impl MultiPoly {
    pub fn zero(dim: usize, mode: Mode) -> Self {
        MultiPoly {
            dim,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: ComplexScalar) -> Self {
        let mode = c.mode();
        let mut p = MultiPoly::zero(dim, mode);
        if !c.is_zero() {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    pub fn one(dim: usize, mode: Mode) -> Self {
        MultiPoly::constant(dim, ComplexScalar::one(mode))
    }

    /// The variable `x_{index+1}` (0-based index).
    pub fn variable(dim: usize, index: usize, mode: Mode) -> Self {
        assert!(index < dim, "variable index out of range");
        let mut alpha = vec![0u32; dim];
        alpha[index] = 1;
        let mut p = MultiPoly::zero(dim, mode);
        p.terms.insert(alpha, ComplexScalar::one(mode));
        p
    }

    pub fn from_terms(
        dim: usize,
        mode: Mode,
        terms: impl IntoIterator<Item = (Vec<u32>, ComplexScalar)>,
    ) -> Result<Self, PolyError> {
        let mut p = MultiPoly::zero(dim, mode);
        for (alpha, c) in terms {
            if alpha.len() != dim {
                return Err(PolyError::DimMismatch(alpha.len(), dim));
            }
            if c.mode() != mode {
                return Err(PolyError::ModeMismatch);
            }
            p.add_term(&alpha, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ComplexScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &[u32]) -> ComplexScalar {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| ComplexScalar::zero(self.mode))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|a| a[var]).max()
    }

    pub(crate) fn add_term(&mut self, alpha: &[u32], c: ComplexScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(alpha) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(alpha);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(alpha.to_vec(), c);
            }
        }
    }

    fn check_compat(&self, other: &Self) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimMismatch(self.dim, other.dim));
        }
        if self.mode != other.mode {
            return Err(PolyError::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &ComplexScalar) -> Result<Self, PolyError> {
        if c.mode() != self.mode {
            return Err(PolyError::ModeMismatch);
        }
        if c.is_zero() {
            return Ok(MultiPoly::zero(self.dim, self.mode));
        }
        let mut out = MultiPoly::zero(self.dim, self.mode);
        for (alpha, a) in &self.terms {
            out.add_term(alpha, a.mul(c));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = MultiPoly::zero(self.dim, self.mode);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha: Vec<u32> = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                out.add_term(&alpha, ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut out = MultiPoly::one(self.dim, self.mode);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Exact partial derivative `∂/∂x_{var+1}`.
    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = MultiPoly::zero(self.dim, self.mode);
        for (alpha, c) in &self.terms {
            let e = alpha[var];
            if e == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[var] = e - 1;
            let factor = ComplexScalar::from_int(e as i64, self.mode);
            out.add_term(&beta, c.mul(&factor));
        }
        out
    }

    /// Evaluate at a complex point (float arithmetic regardless of mode).
    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut term = c.to_c64();
            for (j, &e) in alpha.iter().enumerate() {
                term *= point[j].powu(e);
            }
            acc += term;
        }
        acc
    }

    /// Evaluate exactly at a Gaussian-rational point (exact mode only).
    pub fn eval_exact(&self, point: &[ComplexScalar]) -> Result<ComplexScalar, PolyError> {
        assert_eq!(point.len(), self.dim);
        let mut acc = ComplexScalar::zero(self.mode);
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (j, &e) in alpha.iter().enumerate() {
                if point[j].mode() != self.mode {
                    return Err(PolyError::ModeMismatch);
                }
                for _ in 0..e {
                    term = term.mul(&point[j]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// The top-degree homogeneous part `P_m`. Rejects the zero polynomial.
    pub fn principal_part(&self) -> Result<Self, PolyError> {
        let m = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let mut out = MultiPoly::zero(self.dim, self.mode);
        for (alpha, c) in &self.terms {
            if alpha.iter().sum::<u32>() == m {
                out.terms.insert(alpha.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|a| a.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d0) => degrees.all(|d| d == d0),
        }
    }

    /// Convert exact coefficients to binary64.
    pub fn to_float(&self) -> Self {
        let mut out = MultiPoly::zero(self.dim, Mode::Float);
        for (alpha, c) in &self.terms {
            out.add_term(alpha, c.to_float());
        }
        out
    }

    /// Append a new trailing variable with exponent zero (dim + 1).
    pub fn lift_last(&self) -> Self {
        let mut out = MultiPoly::zero(self.dim + 1, self.mode);
        for (alpha, c) in &self.terms {
            let mut beta = alpha.clone();
            beta.push(0);
            out.terms.insert(beta, c.clone());
        }
        out
    }

    /// Coefficient-polynomials with respect to the last variable:
    /// `P = Σ_k Q_k(x_1..x_{d-1}) x_d^k`, returned as `Q_0..Q_deg`.
    pub fn collect_wrt_last(&self) -> Vec<MultiPoly> {
        assert!(self.dim >= 1);
        let max_k = self.degree_in(self.dim - 1).unwrap_or(0) as usize;
        let mut qs = vec![MultiPoly::zero(self.dim - 1, self.mode); max_k + 1];
        for (alpha, c) in &self.terms {
            let k = alpha[self.dim - 1] as usize;
            let head = alpha[..self.dim - 1].to_vec();
            qs[k].add_term(&head, c.clone());
        }
        qs
    }

    /// Graded-lexicographic key order, highest first (canonical print order).
    fn print_order(&self) -> Vec<&Vec<u32>> {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        keys
    }

    pub fn to_canonical_string(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        for alpha in self.print_order() {
            let c = &self.terms[alpha];
            let mono: Vec<String> = alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    if e == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, e)
                    }
                })
                .collect();
            let mono = mono.join("*");
            let part = if mono.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                mono
            } else if c.neg().is_one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            parts.push(part);
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

// JSON form: {"dim": d, "terms": [{"alpha": [..], "re": "p/q", "im": "p/q"}]}
// with rational strings in exact mode and plain numbers in float mode.

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<u32>,
    re: CoeffRepr,
    im: CoeffRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Rational(String),
    Number(f64),
}

fn parse_big_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(p))
        }
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            dim: usize,
            terms: Vec<TermRepr>,
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for alpha in self.print_order() {
            let c = &self.terms[alpha];
            let (re, im) = match c {
                ComplexScalar::Exact { re, im } => (
                    CoeffRepr::Rational(format_rational(re)),
                    CoeffRepr::Rational(format_rational(im)),
                ),
                ComplexScalar::Float(z) => (CoeffRepr::Number(z.re), CoeffRepr::Number(z.im)),
            };
            terms.push(TermRepr {
                alpha: alpha.clone(),
                re,
                im,
            });
        }
        Repr {
            dim: self.dim,
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            terms: Vec<TermRepr>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut mode: Option<Mode> = None;
        let mut terms: Vec<(Vec<u32>, ComplexScalar)> = Vec::new();
        for t in repr.terms {
            let c = match (t.re, t.im) {
                (CoeffRepr::Rational(re), CoeffRepr::Rational(im)) => {
                    let re = parse_big_rational(&re)
                        .ok_or_else(|| D::Error::custom("bad rational coefficient"))?;
                    let im = parse_big_rational(&im)
                        .ok_or_else(|| D::Error::custom("bad rational coefficient"))?;
                    ComplexScalar::Exact { re, im }
                }
                (CoeffRepr::Number(re), CoeffRepr::Number(im)) => {
                    ComplexScalar::Float(Complex64::new(re, im))
                }
                _ => return Err(D::Error::custom("mixed rational/number coefficient")),
            };
            match mode {
                None => mode = Some(c.mode()),
                Some(m) if m != c.mode() => {
                    return Err(D::Error::custom("mixed exact/float terms"))
                }
                _ => {}
            }
            terms.push((t.alpha, c));
        }
        MultiPoly::from_terms(repr.dim, mode.unwrap_or(Mode::Exact), terms)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, j: usize) -> MultiPoly {
        MultiPoly::variable(dim, j, Mode::Exact)
    }

    #[test]
    fn arithmetic_and_degree() {
        // (x1 + x2)^2 = x1^2 + 2 x1 x2 + x2^2
        let s = x(2, 0).add(&x(2, 1)).unwrap();
        let sq = s.pow(2).unwrap();
        assert_eq!(sq.degree(), Some(2));
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(
            sq.coeff(&[1, 1]),
            ComplexScalar::from_int(2, Mode::Exact)
        );
    }

    #[test]
    fn zero_cancellation_keeps_map_clean() {
        let p = x(2, 0).sub(&x(2, 0)).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn principal_part_selects_top_degree() {
        // x1^3 + x1 x2^2 + x2 -> x1^3 + x1 x2^2
        let p = x(2, 0)
            .pow(3)
            .unwrap()
            .add(&x(2, 0).mul(&x(2, 1).pow(2).unwrap()).unwrap())
            .unwrap()
            .add(&x(2, 1))
            .unwrap();
        let pm = p.principal_part().unwrap();
        assert!(pm.is_homogeneous());
        assert_eq!(pm.num_terms(), 2);
        assert!(pm.coeff(&[0, 1]).is_zero());
        // Idempotent.
        assert_eq!(pm.principal_part().unwrap(), pm);
    }

    #[test]
    fn mode_mixing_rejected() {
        let p = x(2, 0);
        let q = MultiPoly::variable(2, 0, Mode::Float);
        assert!(matches!(p.add(&q), Err(PolyError::ModeMismatch)));
    }

    #[test]
    fn display_round_trip_simple() {
        let i = MultiPoly::constant(2, ComplexScalar::i(Mode::Exact));
        let p = i.mul(&x(2, 0)).unwrap().add(&x(2, 1).pow(2).unwrap()).unwrap();
        assert_eq!(p.to_canonical_string(), "x2^2 + i*x1");
    }

    #[test]
    fn json_round_trip_exact() {
        let p = x(3, 0)
            .pow(2)
            .unwrap()
            .scale(&ComplexScalar::from_ratio(3, 4))
            .unwrap()
            .add(&x(3, 2))
            .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
