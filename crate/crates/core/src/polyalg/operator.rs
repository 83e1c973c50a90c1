//! Application of constant-coefficient operators `Q(D)`, `D_j = -i ∂_j`, to
//! Cauchy data. Exact on the symbolic datum classes; numeric data get a
//! derived oracle (one linear combination of base-oracle calls per query).

use super::{ComplexScalar, MultiPoly, PolyError};
use crate::funcdata::{CauchyData, DataError, DerivOracle, ExpPolyData, NumericData};
use std::sync::Arc;

/// `Q(D) f` in the same representation class as `f`.
pub fn apply_operator(q: &MultiPoly, f: &CauchyData) -> Result<CauchyData, DataError> {
    if q.dim() != f.dim() {
        return Err(DataError::DimMismatch(q.dim(), f.dim()));
    }
    match f {
        CauchyData::Poly(p) => {
            if q.mode() != p.mode() {
                return Err(DataError::Poly(PolyError::ModeMismatch));
            }
            let mut acc = MultiPoly::zero(p.dim(), p.mode());
            for (alpha, a) in q.terms() {
                let total: u32 = alpha.iter().sum();
                let mut term = p.clone();
                for (j, &e) in alpha.iter().enumerate() {
                    for _ in 0..e {
                        term = term.partial_derivative(j);
                    }
                }
                let factor = a.mul(&ComplexScalar::minus_i_pow(total, p.mode()));
                acc = acc.add(&term.scale(&factor)?)?;
            }
            Ok(CauchyData::Poly(acc))
        }
        CauchyData::ExpPoly(e) => {
            if q.mode() != e.mode() {
                return Err(DataError::Poly(PolyError::ModeMismatch));
            }
            let mode = e.mode();
            let mut out_terms: Vec<(Vec<ComplexScalar>, MultiPoly)> = Vec::new();
            for (freq, poly) in e.terms() {
                // On e^{i<λ,x>} p the operator D_j acts on the coefficient
                // polynomial as p -> λ_j p + D_j p.
                let mut acc = MultiPoly::zero(poly.dim(), mode);
                for (alpha, a) in q.terms() {
                    let mut term = poly.clone();
                    for (j, &order) in alpha.iter().enumerate() {
                        for _ in 0..order {
                            let dj = term
                                .partial_derivative(j)
                                .scale(&ComplexScalar::i(mode).neg())?;
                            term = term.scale(&freq[j])?.add(&dj)?;
                        }
                    }
                    acc = acc.add(&term.scale(a)?)?;
                }
                out_terms.push((freq.clone(), acc));
            }
            Ok(CauchyData::ExpPoly(ExpPolyData::new(
                e.dim(),
                mode,
                out_terms,
            )?))
        }
        CauchyData::Numeric(n) => {
            let q_deg = q.degree().unwrap_or(0);
            if q_deg > n.max_order() {
                return Err(DataError::OrderExceeded {
                    requested: q_deg,
                    max: n.max_order(),
                });
            }
            let terms: Vec<(Vec<u32>, num_complex::Complex64)> = q
                .terms()
                .map(|(alpha, a)| {
                    let total: u32 = alpha.iter().sum();
                    let factor = a
                        .to_c64()
                        * ComplexScalar::minus_i_pow(total, super::Mode::Float).to_c64();
                    (alpha.clone(), factor)
                })
                .collect();
            let base = n.clone();
            let oracle: DerivOracle = Arc::new(move |point, beta| {
                let mut value = num_complex::Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for (alpha, factor) in &terms {
                    let combined: Vec<u32> =
                        alpha.iter().zip(beta.iter()).map(|(a, b)| a + b).collect();
                    let (v, e) = base
                        .query(point, &combined)
                        .expect("order bounded at construction");
                    value += factor * v;
                    err += factor.norm() * e;
                }
                (value, err)
            });
            Ok(CauchyData::Numeric(NumericData::new(
                n.dim(),
                n.max_order() - q_deg,
                oracle,
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_poly, Mode};

    #[test]
    fn single_differentiation_convention() {
        // Q = x1 means D_1 = -i ∂_1; on x1^2 this gives -2i x1.
        let q = parse_poly("x1", 1).unwrap();
        let f = CauchyData::Poly(parse_poly("x1^2", 1).unwrap());
        let out = apply_operator(&q, &f).unwrap();
        let expect = CauchyData::Poly(
            parse_poly("x1", 1)
                .unwrap()
                .scale(&ComplexScalar::from_int(-2, Mode::Exact).mul(&ComplexScalar::i(
                    Mode::Exact,
                )))
                .unwrap(),
        );
        assert_eq!(out.symbolic_eq(&expect), Some(true));
    }

    #[test]
    fn identity_operator() {
        let q = parse_poly("1", 1).unwrap();
        let f = CauchyData::Poly(parse_poly("x1^3 - i*x1", 1).unwrap());
        let out = apply_operator(&q, &f).unwrap();
        assert_eq!(out.symbolic_eq(&f), Some(true));
    }

    #[test]
    fn plane_wave_eigenvalue() {
        // D_1 e^{iλ x1} = λ e^{iλ x1}.
        let q = parse_poly("x1", 1).unwrap();
        let lam = ComplexScalar::from_int(3, Mode::Exact);
        let f = CauchyData::plane_wave(vec![lam.clone()]).unwrap();
        let out = apply_operator(&q, &f).unwrap();
        let expect = f.scale(&lam).unwrap();
        assert_eq!(out.symbolic_eq(&expect), Some(true));
    }

    #[test]
    fn operator_homomorphism_on_polynomials() {
        let q1 = parse_poly("x1^2 + i*x2", 2).unwrap();
        let q2 = parse_poly("x1 - x2^2", 2).unwrap();
        let f = CauchyData::Poly(parse_poly("x1^3*x2 + x2^4 - 2*x1", 2).unwrap());
        let combined = apply_operator(&q1.mul(&q2).unwrap(), &f).unwrap();
        let nested = apply_operator(&q1, &apply_operator(&q2, &f).unwrap()).unwrap();
        assert_eq!(combined.symbolic_eq(&nested), Some(true));
    }
}
