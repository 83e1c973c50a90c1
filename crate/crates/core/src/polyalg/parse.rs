//! Polynomial text grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | primary ('^' uint)?
//! primary := '(' expr ')' | number | 'i' | variable
//! variable:= 'x' uint                     (1-based, <= dim)
//! number  := digits ('/' digits | '.' digits)? ([eE] [+-]? digits)?
//! ```
//!
//! Numbers are read as exact rationals (decimals and exponents included), so
//! parsing always produces an exact-mode polynomial; convert with
//! [`MultiPoly::to_float`] for binary64 workflows. The canonical printer
//! emits text in this grammar, so printing and reparsing is the identity.

use super::{ComplexScalar, Mode, MultiPoly, PolyError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    dim: usize,
}

/// Parse `text` into a polynomial in variables `x1..x{dim}`.
pub fn parse_poly(text: &str, dim: usize) -> Result<MultiPoly, PolyError> {
    let mut p = Parser {
        input: text.as_bytes(),
        pos: 0,
        dim,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.bump();
                self.term()?.neg()
            }
            Some(b'+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, PolyError> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint("exponent")?;
            if e > 64 {
                return Err(self.err("exponent too large (max 64)"));
            }
            return base.pow(e as u32).map_err(Into::into);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Some(b'i') => {
                self.bump();
                Ok(MultiPoly::constant(
                    self.dim,
                    ComplexScalar::i(Mode::Exact),
                ))
            }
            Some(b'x') => {
                self.bump();
                let start = self.pos;
                let idx = self.uint("variable index")?;
                if idx == 0 || idx as usize > self.dim {
                    self.pos = start;
                    return Err(PolyError::VarOutOfRange {
                        index: idx as usize,
                        dim: self.dim,
                    });
                }
                Ok(MultiPoly::variable(
                    self.dim,
                    idx as usize - 1,
                    Mode::Exact,
                ))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.number()?;
                Ok(MultiPoly::constant(
                    self.dim,
                    ComplexScalar::from_rationals(r, BigRational::zero()),
                ))
            }
            Some(_) => Err(self.err("expected '(', number, 'i', or variable")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<String, PolyError> {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn uint(&mut self, what: &str) -> Result<u64, PolyError> {
        self.skip_ws();
        let d = self.digits()?;
        d.parse::<u64>()
            .map_err(|_| self.err(&format!("{what} out of range")))
    }

    fn number(&mut self) -> Result<BigRational, PolyError> {
        self.skip_ws();
        let int_part = self.digits()?;
        let mut value = BigRational::from_integer(int_part.parse::<BigInt>().unwrap());

        // Lookahead without consuming whitespace: '/' '.' 'e' bind tightly.
        match self.input.get(self.pos).copied() {
            Some(b'/') => {
                self.pos += 1;
                let den = self.digits()?;
                let den: BigInt = den.parse().unwrap();
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                value = BigRational::new(value.numer().clone(), den);
            }
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits()?;
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                let frac: BigInt = frac.parse().unwrap();
                value = value + BigRational::new(frac, scale);
            }
            _ => {}
        }
        if matches!(self.input.get(self.pos).copied(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            let neg = match self.input.get(self.pos).copied() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let exp = self.digits()?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            let ten = BigRational::from_integer(BigInt::from(10u32)).pow(exp as i32);
            if neg {
                value /= ten;
            } else {
                value *= ten;
            }
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_symbol() {
        let p = parse_poly("i*x1 + x2^2", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[1, 0]), ComplexScalar::i(Mode::Exact));
        assert_eq!(p.coeff(&[0, 2]), ComplexScalar::one(Mode::Exact));
    }

    #[test]
    fn zero_polynomial() {
        let p = parse_poly("0", 3).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn cancellation_to_constant() {
        let p = parse_poly("x1*x2 - x2*x1 + 7", 2).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&[0, 0]), ComplexScalar::from_int(7, Mode::Exact));
    }

    #[test]
    fn rationals_decimals_exponents() {
        let p = parse_poly("3/4*x1 + 0.5*x2 + 2e2", 2).unwrap();
        assert_eq!(p.coeff(&[1, 0]), ComplexScalar::from_ratio(3, 4));
        assert_eq!(p.coeff(&[0, 1]), ComplexScalar::from_ratio(1, 2));
        assert_eq!(p.coeff(&[0, 0]), ComplexScalar::from_int(200, Mode::Exact));
    }

    #[test]
    fn syntax_error_position() {
        match parse_poly("x1 + @", 2) {
            Err(PolyError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn variable_out_of_range() {
        assert!(matches!(
            parse_poly("x3", 2),
            Err(PolyError::VarOutOfRange { index: 3, dim: 2 })
        ));
    }

    #[test]
    fn printer_round_trip() {
        let texts = [
            "i*x1 + x2^2",
            "(1/2-3/4*i)*x1^2*x2 - x2^3 + i",
            "x1^3 + x1*x2^2 + x2",
            "0",
            "-x1 - x2",
        ];
        for t in texts {
            let p = parse_poly(t, 2).unwrap();
            let q = parse_poly(&p.to_canonical_string(), 2).unwrap();
            assert_eq!(p, q, "round trip failed for {t}");
        }
    }
}
