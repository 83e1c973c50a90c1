//! Power-series solution of the non-characteristic Cauchy problem.
//!
//! For a normalized slab decomposition `P = Σ_{k=0}^m Q_k(x') x_d^k`
//! (`Q_m = 1`) the coefficient operators are defined recursively by
//!
//! ```text
//! C_l(f) = 0                                    l <= m-2
//! C_{m-1}(f) = f
//! C_l(f) = -Σ_{k=0}^{m-1} Q_k(D) C_{k+l-m}(f)   l >= m
//! ```
//!
//! so that `C_{m+l}(f) + Σ_{k<m} Q_k(D) C_{k+l}(f) = 0` for all `l`. The
//! truncated series `L_n(h)(x', x_d) = Σ_{l<=n} C_l(h)(x') (i x_d)^l / l!`
//! solves the equation order by order, and
//! `u = Σ_{j<m} Σ_{k<=m-1-j} Q_{j+k+1}(D) D_d^k L(h_j)` attains the boundary
//! traces `D_d^s u(·,0) = h_s`.
//!
//! The same operators admit a closed form as a sum over weighted integer
//! compositions,
//! `C_{m-1+l}(f) = Σ_{σ(s)=l} (-1)^{|s|} multinomial(|s|; s) Π_k Q_{m-k}^{s_k}(D) f`
//! with `σ(s) = Σ_j j s_j`; both routes are implemented independently and
//! checked against each other.

use crate::funcdata::{CauchyData, DataError};
use crate::polyalg::{apply_operator, ComplexScalar, Mode, MultiPoly, PolyError, SlabDecomposition};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CauchyError {
    #[error("slab decomposition must be normalized (Q_m = 1) for series solves")]
    NotNormalized,
    #[error("truncation order {n} below m-1 = {min}")]
    TruncationTooSmall { n: u32, min: u32 },
    #[error("index {l} below m-1 = {min}: explicit formula undefined")]
    IndexBelowRange { l: u32, min: u32 },
    #[error("multinomial parts sum {sum} differs from total {total}")]
    BadCompositionSum { total: u64, sum: u64 },
    #[error("expected {expected} boundary data, got {got}")]
    WrongDataCount { expected: usize, got: usize },
    #[error("tail bound diverges: rho*gamma = {rho_gamma} >= 1")]
    DivergentBound { rho_gamma: f64 },
    #[error("gamma unavailable: deg_x1 hypothesis fails")]
    MissingGamma,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Composition index `s ∈ ℕ₀^m` with weight `σ(s) = Σ_{j=1}^m j s_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionIndex {
    pub s: Vec<u32>,
}

impl CompositionIndex {
    /// `σ(s) = Σ_j j s_j` (j running 1..m).
    pub fn weight(&self) -> u64 {
        self.s
            .iter()
            .enumerate()
            .map(|(i, &sj)| (i as u64 + 1) * sj as u64)
            .sum()
    }

    /// `|s| = Σ_j s_j`.
    pub fn size(&self) -> u64 {
        self.s.iter().map(|&x| x as u64).sum()
    }
}

/// All `s ∈ ℕ₀^m` with `σ(s) = l`, in lexicographically decreasing order.
pub fn compositions(l: u32, m: u32) -> Vec<CompositionIndex> {
    fn rec(pos: u32, m: u32, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<CompositionIndex>) {
        if pos == m {
            if remaining == 0 {
                out.push(CompositionIndex { s: prefix.clone() });
            }
            return;
        }
        if pos == m - 1 {
            // Last slot: weight m per unit.
            if remaining % m == 0 {
                prefix.push(remaining / m);
                out.push(CompositionIndex { s: prefix.clone() });
                prefix.pop();
            }
            return;
        }
        let w = pos + 1;
        let max = remaining / w;
        for sj in (0..=max).rev() {
            prefix.push(sj);
            rec(pos + 1, m, remaining - sj * w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(0, m, l, &mut prefix, &mut out);
    out
}

/// Exact multinomial coefficient `total! / (parts_1! ... parts_k!)`.
pub fn multinomial(total: u64, parts: &[u64]) -> Result<BigUint, CauchyError> {
    let sum: u64 = parts.iter().sum();
    if sum != total {
        return Err(CauchyError::BadCompositionSum { total, sum });
    }
    let mut result = BigUint::one();
    let mut cumulative: u64 = 0;
    for &p in parts {
        cumulative += p;
        // result *= C(cumulative, p), computed exactly step by step.
        for i in 1..=p {
            result = result * BigUint::from(cumulative - p + i) / BigUint::from(i);
        }
    }
    Ok(result)
}

fn require_normalized(dec: &SlabDecomposition) -> Result<(), CauchyError> {
    if !dec.normalized() {
        return Err(CauchyError::NotNormalized);
    }
    Ok(())
}

fn big_to_scalar(b: &BigUint, mode: Mode) -> ComplexScalar {
    match mode {
        Mode::Exact => {
            let n: num_bigint::BigInt = b.clone().into();
            ComplexScalar::from_rationals(
                num_rational::BigRational::from_integer(n),
                num_rational::BigRational::zero(),
            )
        }
        Mode::Float => ComplexScalar::from_c64(Complex64::new(
            b.to_f64().unwrap_or(f64::INFINITY),
            0.0,
        )),
    }
}

/// Memoized evaluation of the coefficient operators `C_l` for a fixed
/// decomposition and datum. Symbolic data use the data-level recursion;
/// numeric data route through the operator-symbol recursion (one expanded
/// polynomial applied per coefficient) so oracle call trees stay flat.
pub struct CoeffSession<'a> {
    dec: &'a SlabDecomposition,
    datum: CauchyData,
    memo: Vec<Option<CauchyData>>,
    symbols: Option<SymbolTable<'a>>,
}

impl<'a> CoeffSession<'a> {
    pub fn new(dec: &'a SlabDecomposition, datum: CauchyData) -> Result<Self, CauchyError> {
        require_normalized(dec)?;
        if datum.dim() != dec.dim() - 1 {
            return Err(CauchyError::Data(DataError::DimMismatch(
                datum.dim(),
                dec.dim() - 1,
            )));
        }
        let symbols = if datum.is_symbolic() {
            None
        } else {
            Some(SymbolTable::new(dec)?)
        };
        Ok(CoeffSession {
            dec,
            datum,
            memo: Vec::new(),
            symbols,
        })
    }

    pub fn datum(&self) -> &CauchyData {
        &self.datum
    }

    /// `C_l` applied to the session datum.
    pub fn coeff(&mut self, l: u32) -> Result<CauchyData, CauchyError> {
        let m = self.dec.m();
        let l = l as usize;
        if let Some(Some(c)) = self.memo.get(l) {
            return Ok(c.clone());
        }
        if self.memo.len() <= l {
            self.memo.resize(l + 1, None);
        }
        // Fill bottom-up; every C_l with l >= m depends on C_{l-m}..C_{l-1}.
        for idx in 0..=l {
            if self.memo[idx].is_some() {
                continue;
            }
            let value = if (idx as u32) < m - 1 {
                CauchyData::zero(self.datum.dim(), self.datum.mode())
            } else if idx as u32 == m - 1 {
                self.datum.clone()
            } else if let Some(symbols) = self.symbols.as_mut() {
                let t = symbols.symbol(idx as u32)?.clone();
                apply_operator(&t, &self.datum)?
            } else {
                let mut acc = CauchyData::zero(self.datum.dim(), self.datum.mode());
                for k in 0..m as usize {
                    let prev = self.memo[k + idx - m as usize]
                        .as_ref()
                        .expect("filled bottom-up")
                        .clone();
                    if prev.is_zero() {
                        continue;
                    }
                    let q = self.dec.q(k);
                    if q.is_zero() {
                        continue;
                    }
                    acc = acc.add(&apply_operator(q, &prev)?)?;
                }
                acc.neg()
            };
            self.memo[idx] = Some(value);
        }
        Ok(self.memo[l].clone().expect("just filled"))
    }
}

/// The operator symbols `T_l` with `C_l(f) = T_l(D) f`, computed by the same
/// recursion carried out in the polynomial algebra
/// (`T_l = -Σ_k Q_k T_{k+l-m}`, `T_{m-1} = 1`).
pub struct SymbolTable<'a> {
    dec: &'a SlabDecomposition,
    polys: Vec<MultiPoly>,
}

impl<'a> SymbolTable<'a> {
    pub fn new(dec: &'a SlabDecomposition) -> Result<Self, CauchyError> {
        require_normalized(dec)?;
        Ok(SymbolTable {
            dec,
            polys: Vec::new(),
        })
    }

    pub fn symbol(&mut self, l: u32) -> Result<&MultiPoly, CauchyError> {
        let m = self.dec.m();
        let dim = self.dec.dim() - 1;
        let mode = self.dec.mode();
        let l = l as usize;
        while self.polys.len() <= l {
            let idx = self.polys.len();
            let next = if (idx as u32) < m - 1 {
                MultiPoly::zero(dim, mode)
            } else if idx as u32 == m - 1 {
                MultiPoly::one(dim, mode)
            } else {
                let mut acc = MultiPoly::zero(dim, mode);
                for k in 0..m as usize {
                    let prev = &self.polys[k + idx - m as usize];
                    if prev.is_zero() || self.dec.q(k).is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.dec.q(k).mul(prev)?)?;
                }
                acc.neg()
            };
            self.polys.push(next);
        }
        Ok(&self.polys[l])
    }
}

/// `C_l(f)` by the defining recursion.
pub fn c_op_recursive(
    dec: &SlabDecomposition,
    l: u32,
    f: &CauchyData,
) -> Result<CauchyData, CauchyError> {
    CoeffSession::new(dec, f.clone())?.coeff(l)
}

/// `C_l(f)` by the explicit composition formula (`l >= m-1`): each term is a
/// single expanded operator polynomial applied once to `f`.
pub fn c_op_explicit(
    dec: &SlabDecomposition,
    l: u32,
    f: &CauchyData,
) -> Result<CauchyData, CauchyError> {
    require_normalized(dec)?;
    let m = dec.m();
    if l < m - 1 {
        return Err(CauchyError::IndexBelowRange { l, min: m - 1 });
    }
    let mode = f.mode();
    let mut acc = CauchyData::zero(f.dim(), mode);
    for comp in compositions(l - (m - 1), m) {
        // Π_{k=1}^m Q_{m-k}^{s_k}, expanded to one polynomial before a single
        // application.
        let mut op = MultiPoly::one(dec.dim() - 1, dec.mode());
        let mut vanished = false;
        for (k1, &sk) in comp.s.iter().enumerate() {
            if sk == 0 {
                continue;
            }
            let q = dec.q(m as usize - (k1 + 1));
            if q.is_zero() {
                vanished = true;
                break;
            }
            op = op.mul(&q.pow(sk)?)?;
        }
        if vanished {
            continue;
        }
        let parts: Vec<u64> = comp.s.iter().map(|&x| x as u64).collect();
        let coeff = multinomial(comp.size(), &parts)?;
        let mut scalar = big_to_scalar(&coeff, if f.is_symbolic() { dec.mode() } else { Mode::Float });
        if comp.size() % 2 == 1 {
            scalar = scalar.neg();
        }
        let op = if f.is_symbolic() && dec.mode() != mode {
            return Err(CauchyError::Poly(PolyError::ModeMismatch));
        } else if !f.is_symbolic() {
            op.to_float()
        } else {
            op
        };
        let term = apply_operator(&op, f)?;
        acc = acc.add(&term.scale(&scalar)?)?;
    }
    Ok(acc)
}

/// Truncated series `L_n(h)`: coefficient `l` multiplies `(i x_d)^l / l!`.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    coeffs: Vec<CauchyData>,
    truncation: u32,
}

impl SeriesSolution {
    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coeff(&self, l: usize) -> &CauchyData {
        &self.coeffs[l]
    }

    pub fn coeffs(&self) -> &[CauchyData] {
        &self.coeffs
    }

    /// Evaluate at `(x', x_d)`.
    pub fn eval(&self, x_prime: &[f64], xd: f64) -> (Complex64, f64) {
        let ixd = Complex64::new(0.0, xd);
        let mut power = Complex64::new(1.0, 0.0);
        let mut factorial = 1.0f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        for (l, c) in self.coeffs.iter().enumerate() {
            if l > 0 {
                power *= ixd;
                factorial *= l as f64;
            }
            let (v, e) = c.evaluate(x_prime);
            let w = power / factorial;
            acc += v * w;
            err += e * w.norm();
        }
        (acc, err)
    }

    /// `D_d^k` of the series: term-by-term index shift.
    pub fn d_last(&self, k: u32) -> SeriesSolution {
        let k = k as usize;
        let coeffs = if k >= self.coeffs.len() {
            Vec::new()
        } else {
            self.coeffs[k..].to_vec()
        };
        SeriesSolution {
            coeffs,
            truncation: self.truncation.saturating_sub(k as u32),
        }
    }

    /// Apply `Q(D)` to every coefficient.
    pub fn apply_q(&self, q: &MultiPoly) -> Result<SeriesSolution, CauchyError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| apply_operator(q, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesSolution {
            coeffs,
            truncation: self.truncation,
        })
    }

    pub fn add(&self, other: &SeriesSolution) -> Result<SeriesSolution, CauchyError> {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for l in 0..n {
            coeffs.push(self.coeffs[l].add(&other.coeffs[l])?);
        }
        Ok(SeriesSolution {
            coeffs,
            truncation: self.truncation.min(other.truncation),
        })
    }
}

/// `L_n(h)`: coefficients `C_0..C_n` of the power series in `x_d`.
pub fn l_series(
    dec: &SlabDecomposition,
    h: &CauchyData,
    n: u32,
) -> Result<SeriesSolution, CauchyError> {
    let m = dec.m();
    if n < m - 1 {
        return Err(CauchyError::TruncationTooSmall { n, min: m - 1 });
    }
    let mut session = CoeffSession::new(dec, h.clone())?;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for l in 0..=n {
        coeffs.push(session.coeff(l)?);
    }
    Ok(SeriesSolution {
        coeffs,
        truncation: n,
    })
}

/// Assembled solution of the Cauchy problem `P(D)u = 0`,
/// `D_d^s u(·,0) = h_s`.
#[derive(Debug, Clone)]
pub struct CauchySolution {
    dec: SlabDecomposition,
    data: Vec<CauchyData>,
    series_parts: Vec<SeriesSolution>,
    u_series: SeriesSolution,
    truncation: u32,
    /// All coefficient functions beyond some index vanished identically (the
    /// series terminates and `u` is an exact polynomial-in-`x_d` solution).
    terminated: bool,
}

impl CauchySolution {
    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn data(&self) -> &[CauchyData] {
        &self.data
    }

    pub fn series_parts(&self) -> &[SeriesSolution] {
        &self.series_parts
    }

    /// Coefficients `U_l` of the assembled `u = Σ U_l (i x_d)^l / l!`.
    pub fn u_series(&self) -> &SeriesSolution {
        &self.u_series
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn eval(&self, x_prime: &[f64], xd: f64) -> (Complex64, f64) {
        self.u_series.eval(x_prime, xd)
    }

    /// Boundary trace `D_d^s u(·,0) = U_s`.
    pub fn trace(&self, s: u32) -> &CauchyData {
        self.u_series.coeff(s as usize)
    }

    /// Coefficient functions of `P(D)u`: entry `l` is
    /// `Σ_{k=0}^m Q_k(D) U_{l+k}`. On a terminated series these must all be
    /// symbolically zero.
    pub fn pde_residual_coeffs(&self) -> Result<Vec<CauchyData>, CauchyError> {
        let m = self.dec.m() as usize;
        let n = self.u_series.coeffs.len();
        let dim = self.dec.dim() - 1;
        let mode = self.u_series.coeffs[0].mode();
        let mut out = Vec::new();
        for l in 0..n.saturating_sub(m) {
            let mut acc = CauchyData::zero(dim, mode);
            for k in 0..=m {
                let coeff = &self.u_series.coeffs[l + k];
                if coeff.is_zero() || self.dec.q(k).is_zero() {
                    continue;
                }
                acc = acc.add(&apply_operator(self.dec.q(k), coeff)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Solve the Cauchy problem with data `h_0..h_{m-1}` at truncation `n`.
pub fn cauchy_solve(
    dec: &SlabDecomposition,
    data: &[CauchyData],
    n: u32,
) -> Result<CauchySolution, CauchyError> {
    require_normalized(dec)?;
    let m = dec.m();
    if data.len() != m as usize {
        return Err(CauchyError::WrongDataCount {
            expected: m as usize,
            got: data.len(),
        });
    }
    if n < m - 1 {
        return Err(CauchyError::TruncationTooSmall { n, min: m - 1 });
    }

    // Series coefficients are needed up to n + (m-1) so every D_d^k shift
    // still reaches index n.
    let deep = n + m - 1;
    let mut sessions = data
        .iter()
        .map(|h| CoeffSession::new(dec, h.clone()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut series_parts = Vec::with_capacity(m as usize);
    for session in sessions.iter_mut() {
        let mut coeffs = Vec::with_capacity(deep as usize + 1);
        for l in 0..=deep {
            coeffs.push(session.coeff(l)?);
        }
        series_parts.push(SeriesSolution {
            coeffs,
            truncation: deep,
        });
    }

    // u = Σ_j Σ_{k=0}^{m-1-j} Q_{j+k+1}(D) D_d^k L(h_j)
    let dim = dec.dim() - 1;
    let mode = data[0].mode();
    let mut u_coeffs: Vec<CauchyData> =
        vec![CauchyData::zero(dim, mode); n as usize + 1];
    for (j, part) in series_parts.iter().enumerate() {
        for k in 0..=(m as usize - 1 - j) {
            let q = dec.q(j + k + 1);
            if q.is_zero() {
                continue;
            }
            for (l, u_l) in u_coeffs.iter_mut().enumerate() {
                let c = &part.coeffs[l + k];
                if c.is_zero() {
                    continue;
                }
                *u_l = u_l.add(&apply_operator(q, c)?)?;
            }
        }
    }

    // Termination: m consecutive identically-zero coefficients force all
    // later ones to vanish (the recursion window is m wide).
    let symbolic = data.iter().all(|h| h.is_symbolic());
    let mut terminated = false;
    if symbolic {
        for part in &series_parts {
            let mut run = 0;
            let mut this_terminates = false;
            for c in &part.coeffs {
                if c.is_zero() {
                    run += 1;
                    if run >= m {
                        this_terminates = true;
                        break;
                    }
                } else {
                    run = 0;
                }
            }
            terminated = this_terminates;
            if !this_terminates {
                terminated = false;
                break;
            }
        }
    }

    Ok(CauchySolution {
        dec: dec.clone(),
        data: data.to_vec(),
        series_parts,
        u_series: SeriesSolution {
            coeffs: u_coeffs,
            truncation: n,
        },
        truncation: n,
        terminated,
    })
}

/// Residual of the boundary-preparation identity at order `s`:
/// `Σ_{j<=s} Σ_{k=m-1-s}^{m-1-j} Q_{j+k+1}(D) C_{k+s}(h_j) - h_s`.
pub fn verify_prep_identity(
    dec: &SlabDecomposition,
    data: &[CauchyData],
    s: u32,
) -> Result<CauchyData, CauchyError> {
    require_normalized(dec)?;
    let m = dec.m();
    if data.len() != m as usize {
        return Err(CauchyError::WrongDataCount {
            expected: m as usize,
            got: data.len(),
        });
    }
    assert!(s <= m - 1, "trace order s must satisfy 0 <= s <= m-1");
    let dim = dec.dim() - 1;
    let mode = data[0].mode();
    let mut acc = CauchyData::zero(dim, mode);
    for j in 0..=s {
        let mut session = CoeffSession::new(dec, data[j as usize].clone())?;
        for k in (m - 1 - s)..=(m - 1 - j) {
            let q = dec.q((j + k + 1) as usize);
            if q.is_zero() {
                continue;
            }
            let c = session.coeff(k + s)?;
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&apply_operator(q, &c)?)?;
        }
    }
    acc.add(&data[s as usize].neg()).map_err(Into::into)
}

/// Evaluate the assembled solution at one point using the explicit
/// composition formula for every coefficient (no recursion, no memoization).
pub fn remark_formula_eval(
    dec: &SlabDecomposition,
    data: &[CauchyData],
    n: u32,
    x_prime: &[f64],
    xd: f64,
) -> Result<Complex64, CauchyError> {
    require_normalized(dec)?;
    let m = dec.m();
    if data.len() != m as usize {
        return Err(CauchyError::WrongDataCount {
            expected: m as usize,
            got: data.len(),
        });
    }
    let ixd = Complex64::new(0.0, xd);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, h) in data.iter().enumerate() {
        for k in 0..=(m as usize - 1 - j) {
            let q = dec.q(j + k + 1);
            if q.is_zero() {
                continue;
            }
            // Coefficient l of D_d^k L(h_j) is C_{l+k}(h_j); only indices
            // with l + k >= m-1 contribute.
            for l in 0..=n {
                let idx = l + k as u32;
                if idx < m - 1 {
                    continue;
                }
                let c = c_op_explicit(dec, idx, h)?;
                if c.is_zero() {
                    continue;
                }
                let (v, _) = apply_operator(q, &c)?.evaluate(x_prime);
                let mut weight = Complex64::new(1.0, 0.0);
                for i in 1..=l {
                    weight *= ixd / (i as f64);
                }
                acc += v * weight;
            }
        }
    }
    Ok(acc)
}

/// Largest `Σ_{α'} |q_{k,α'}|` over `k`: the constant `q` of the tail bound.
pub fn operator_q_norm(dec: &SlabDecomposition) -> f64 {
    dec.q_list()
        .iter()
        .map(|q| q.terms().map(|(_, c)| c.to_c64().norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Rigorous upper bound for the uniform series tail beyond truncation `n` on
/// the slab `|x_d| <= B`, for Gevrey data `|D^α h| <= C R^{α_1} α_1^{ρ α_1}`:
/// `C * Σ_{l>n} (m q R B / l^{1-ργ})^l`, summed until terms underflow.
/// Fails with a divergence flag when `ργ >= 1`.
pub fn convergence_tail_bound(
    dec: &SlabDecomposition,
    c_const: f64,
    r_const: f64,
    q: f64,
    b: f64,
    rho: f64,
    n: u32,
) -> Result<f64, CauchyError> {
    let report = crate::polyalg::check_hypotheses(dec);
    let gamma = report.gamma_f64().ok_or(CauchyError::MissingGamma)?;
    let rho_gamma = rho * gamma;
    if rho_gamma >= 1.0 {
        return Err(CauchyError::DivergentBound { rho_gamma });
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let m = dec.m() as f64;
    let base = m * q * r_const.max(1.0) * b;
    let decay = 1.0 - rho_gamma;

    // Terms (base / l^decay)^l peak near l* = exp(ln(base)/decay - 1).
    let ln_base = base.ln();
    let l_peak = (ln_base / decay - 1.0).exp();
    if !l_peak.is_finite() || l_peak > 1e7 {
        return Ok(f64::INFINITY);
    }
    let mut sum = 0.0f64;
    let mut l = n as f64 + 1.0;
    loop {
        let ln_term = l * (ln_base - decay * l.ln());
        let term = ln_term.exp();
        sum += term;
        if !sum.is_finite() {
            return Ok(f64::INFINITY);
        }
        if term < 1e-320 && l > l_peak {
            break;
        }
        l += 1.0;
        if l > l_peak.max(n as f64) + 1e7 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(c_const * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_poly, slab_decompose};

    fn heat() -> SlabDecomposition {
        slab_decompose(&parse_poly("i*x1 + x2^2", 2).unwrap(), true).unwrap()
    }

    fn pd(text: &str, dim: usize) -> CauchyData {
        CauchyData::Poly(parse_poly(text, dim).unwrap())
    }

    #[test]
    fn base_cases() {
        let dec = heat();
        let f = pd("x1^2", 1);
        // l = m-1 = 1 -> f itself.
        assert_eq!(
            c_op_recursive(&dec, 1, &f).unwrap().symbolic_eq(&f),
            Some(true)
        );
        // l = 0 -> 0.
        assert!(c_op_recursive(&dec, 0, &f).unwrap().is_zero());
    }

    #[test]
    fn heat_c3_is_minus_first_derivative() {
        // C_3 = -Q_0(D) C_1 = -∂_1; on x1^2 this gives -2 x1.
        let dec = heat();
        let f = pd("x1^2", 1);
        let c3 = c_op_recursive(&dec, 3, &f).unwrap();
        assert_eq!(c3.symbolic_eq(&pd("-2*x1", 1)), Some(true));
        let c3e = c_op_explicit(&dec, 3, &f).unwrap();
        assert_eq!(c3e.symbolic_eq(&c3), Some(true));
        // Even index: parity kills the term.
        assert!(c_op_explicit(&dec, 2, &f).unwrap().is_zero());
    }

    #[test]
    fn composition_enumeration() {
        let cs = compositions(2, 2);
        let got: Vec<Vec<u32>> = cs.iter().map(|c| c.s.clone()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![0, 1]]);

        assert_eq!(compositions(0, 3).len(), 1);
        assert_eq!(compositions(0, 3)[0].s, vec![0, 0, 0]);

        assert_eq!(compositions(6, 3).len(), 7);

        for c in compositions(6, 3) {
            assert_eq!(c.weight(), 6);
        }
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), BigUint::from(6u32));
        assert_eq!(multinomial(5, &[5, 0]).unwrap(), BigUint::from(1u32));
        // Pascal-style recurrence spot check: M(4;2,2) = M(3;1,2) + M(3;2,1).
        let lhs = multinomial(4, &[2, 2]).unwrap();
        let rhs = multinomial(3, &[1, 2]).unwrap() + multinomial(3, &[2, 1]).unwrap();
        assert_eq!(lhs, rhs);
        assert!(multinomial(4, &[1, 1]).is_err());
    }

    #[test]
    fn l_series_heat_linear_datum() {
        // L_3(x1) = x1 (i x2) + (i x2)^3/6 * (-1)*(-1) ... = i x1 x2 + i x2^3/6.
        let dec = heat();
        let series = l_series(&dec, &pd("x1", 1), 3).unwrap();
        let (v, _) = series.eval(&[1.0], 1.0);
        let expect = Complex64::new(0.0, 1.0 + 1.0 / 6.0);
        assert!((v - expect).norm() < 1e-15);
        // x_d = 0 gives 0 for m >= 2.
        let (v0, _) = series.eval(&[0.7], 0.0);
        assert_eq!(v0, Complex64::new(0.0, 0.0));
        // Zero datum -> zero series.
        let z = l_series(&dec, &CauchyData::zero(1, Mode::Exact), 5).unwrap();
        assert!(z.coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn cauchy_solve_heat_exact_null() {
        let dec = heat();
        let sol = cauchy_solve(&dec, &[pd("0", 1), pd("x1", 1)], 5).unwrap();
        assert!(sol.terminated());
        // u = i x1 x2 + i x2^3/6 at (1, 1).
        let (v, _) = sol.eval(&[1.0], 1.0);
        assert!((v - Complex64::new(0.0, 7.0 / 6.0)).norm() < 1e-15);
        // Exact PDE null check.
        for r in sol.pde_residual_coeffs().unwrap() {
            assert!(r.is_zero());
        }
        // Boundary traces.
        assert!(sol.trace(0).is_zero());
        assert_eq!(sol.trace(1).symbolic_eq(&pd("x1", 1)), Some(true));
    }

    #[test]
    fn all_zero_data_gives_zero() {
        let dec = heat();
        let z = CauchyData::zero(1, Mode::Exact);
        let sol = cauchy_solve(&dec, &[z.clone(), z], 4).unwrap();
        assert!(sol.u_series().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn prep_identity_examples() {
        let dec = heat();
        // s = 0, h_0 = x1^3: identity reduces to C_1(h_0) = h_0.
        let r = verify_prep_identity(&dec, &[pd("x1^3", 1), pd("0", 1)], 0).unwrap();
        assert!(r.is_zero(), "residual {r:?}");
        let r = verify_prep_identity(&dec, &[pd("0", 1), pd("0", 1)], 1).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn remark_formula_matches_solver() {
        let dec = heat();
        let data = [pd("0", 1), pd("x1", 1)];
        let v = remark_formula_eval(&dec, &data, 6, &[1.0], 1.0).unwrap();
        let expect = Complex64::new(0.0, 1.0 + 1.0 / 6.0);
        assert!((v - expect).norm() < 1e-14);

        // Boundary trace property at x_d = 0: value h_0(x').
        let data = [pd("x1^2", 1), pd("0", 1)];
        let v = remark_formula_eval(&dec, &data, 6, &[2.0], 0.0).unwrap();
        assert!((v - Complex64::new(4.0, 0.0)).norm() < 1e-14);

        let zero = [pd("0", 1), pd("0", 1)];
        let v = remark_formula_eval(&dec, &zero, 6, &[0.3], 0.5).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tail_bound_behaviour() {
        let dec = heat();
        // Geometric domination: choose n with m q R B / (n+1)^{1/4} <= 1/2.
        let (c, r, q, b, rho) = (1.0, 1.0, 1.0, 1.0, 1.5);
        // m q R B = 2; need (n+1)^{1/4} >= 4 -> n+1 >= 256.
        let n = 255;
        let bound = convergence_tail_bound(&dec, c, r, q, b, rho, n).unwrap();
        assert!(bound <= 2.0 * 0.5f64.powi(n as i32 + 1));
        // B = 0 -> empty slab.
        assert_eq!(
            convergence_tail_bound(&dec, c, r, q, 0.0, rho, 10).unwrap(),
            0.0
        );
        // ργ >= 1 -> divergence flag.
        assert!(matches!(
            convergence_tail_bound(&dec, c, r, q, b, 2.0, 10),
            Err(CauchyError::DivergentBound { .. })
        ));
    }

    #[test]
    fn defining_relation_heat() {
        // C_{m+l}(f) + Σ_k Q_k(D) C_{k+l}(f) = 0.
        let dec = heat();
        let f = pd("x1^4 - 2*x1", 1);
        let mut session = CoeffSession::new(&dec, f).unwrap();
        for l in 0..8u32 {
            let mut acc = session.coeff(dec.m() + l).unwrap();
            for k in 0..dec.m() {
                let q = dec.q(k as usize);
                if q.is_zero() {
                    continue;
                }
                let c = session.coeff(k + l).unwrap();
                acc = acc.add(&apply_operator(q, &c).unwrap()).unwrap();
            }
            assert!(acc.is_zero(), "relation fails at l={l}");
        }
    }
}
