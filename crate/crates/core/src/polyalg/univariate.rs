//! Exact univariate helpers over the rationals: Euclidean algorithm and
//! Sturm-chain real-root counting. Used to certify the single-characteristic-
//! direction hypothesis in dimension two.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coefficients low -> high, no trailing zeros.
pub type RatPoly = Vec<BigRational>;

pub fn trim(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree(p: &RatPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn derivative(p: &RatPoly) -> RatPoly {
    if p.len() <= 1 {
        return Vec::new();
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(k.into()))
        .collect()
}

/// Exact polynomial remainder of `a` by `b` (`b` nonzero).
pub fn rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead_b = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead_b;
        let shift = dr - db;
        for (j, bc) in b.iter().enumerate() {
            let idx = j + shift;
            let sub = bc * &factor;
            r[idx] -= sub;
        }
        r = trim(r);
        if degree(&r).map_or(true, |d| d < db) {
            break;
        }
    }
    trim(r)
}

/// Monic greatest common divisor; `gcd(p, 0) = monic(p)`.
pub fn gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut a = trim(a.clone());
    let mut b = trim(b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= lead.clone();
        }
    }
    a
}

fn sign_changes(signs: &[i8]) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at_plus_inf(p: &RatPoly) -> i8 {
    match p.last() {
        None => 0,
        Some(c) => {
            if c.is_positive() {
                1
            } else {
                -1
            }
        }
    }
}

fn sign_at_minus_inf(p: &RatPoly) -> i8 {
    match degree(p) {
        None => 0,
        Some(d) => {
            let s = sign_at_plus_inf(p);
            if d % 2 == 0 {
                s
            } else {
                -s
            }
        }
    }
}

/// Number of distinct real roots of `p` (whole real line), by Sturm's theorem
/// applied to the square-free part `p / gcd(p, p')`.
pub fn count_real_roots(p: &RatPoly) -> usize {
    let p = trim(p.clone());
    if degree(&p).map_or(true, |d| d == 0) {
        return 0;
    }
    // Square-free part.
    let g = gcd(&p, &derivative(&p));
    let sf = if degree(&g) == Some(0) {
        p
    } else {
        divide_exact(&p, &g)
    };
    if degree(&sf).map_or(true, |d| d == 0) {
        return 0;
    }

    // Sturm chain.
    let mut chain = vec![sf.clone(), derivative(&sf)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }

    let at_minus: Vec<i8> = chain.iter().map(|q| sign_at_minus_inf(q)).collect();
    let at_plus: Vec<i8> = chain.iter().map(|q| sign_at_plus_inf(q)).collect();
    sign_changes(&at_minus).saturating_sub(sign_changes(&at_plus))
}

/// Exact division assuming `b | a`.
pub fn divide_exact(a: &RatPoly, b: &RatPoly) -> RatPoly {
    assert!(!b.is_empty());
    let mut r = trim(a.clone());
    let db = b.len() - 1;
    let lead_b = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    while degree(&r).is_some_and(|d| d >= db) {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead_b;
        let shift = dr - db;
        q[shift] = factor.clone();
        for (j, bc) in b.iter().enumerate() {
            let sub = bc * &factor;
            r[j + shift] -= sub;
        }
        r = trim(r);
    }
    debug_assert!(r.is_empty(), "divide_exact called on non-divisor");
    trim(q)
}

/// Largest `k` with `t^k | p`, plus the cofactor `p / t^k`.
pub fn split_power_of_t(p: &RatPoly) -> (usize, RatPoly) {
    let p = trim(p.clone());
    let k = p.iter().take_while(|c| c.is_zero()).count();
    (k, p[k..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rp(coeffs: &[i64]) -> RatPoly {
        trim(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    #[test]
    fn sturm_counts() {
        // (t^2+1): no real roots
        assert_eq!(count_real_roots(&rp(&[1, 0, 1])), 0);
        // t^2 - 1: two
        assert_eq!(count_real_roots(&rp(&[-1, 0, 1])), 2);
        // t^3 - t = t(t-1)(t+1): three
        assert_eq!(count_real_roots(&rp(&[0, -1, 0, 1])), 3);
        // t^2: one distinct (double) root
        assert_eq!(count_real_roots(&rp(&[0, 0, 1])), 1);
        // (t^2+1)^2 (t-2): one real root
        let p = {
            let a = rp(&[1, 0, 1]);
            let mut sq = vec![BigRational::zero(); 5];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in a.iter().enumerate() {
                    sq[i + j] += x * y;
                }
            }
            // multiply by (t - 2)
            let mut out = vec![BigRational::zero(); 6];
            for (i, c) in sq.iter().enumerate() {
                out[i + 1] += c;
                out[i] -= c * BigRational::from_integer(BigInt::from(2));
            }
            trim(out)
        };
        assert_eq!(count_real_roots(&p), 1);
    }

    #[test]
    fn gcd_and_split() {
        // gcd(t^2-1, t^3-t) = t^2 - 1
        let g = gcd(&rp(&[-1, 0, 1]), &rp(&[0, -1, 0, 1]));
        assert_eq!(g, rp(&[-1, 0, 1]));
        let (k, rest) = split_power_of_t(&rp(&[0, 0, 3, 1]));
        assert_eq!(k, 2);
        assert_eq!(rest, rp(&[3, 1]));
    }
}
