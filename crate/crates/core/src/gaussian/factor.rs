//! Factorization in ℤ[i] by factoring the norm over ℤ and lifting each
//! rational prime.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::GaussianInt;
use crate::arith::{self, isqrt, pow_mod};
use crate::error::{Error, Result};

/// `w = unit · Π primes`, primes in first-quadrant form, sorted by
/// `(norm, re, im)` with repetition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianFactorization {
    pub unit: GaussianInt,
    pub primes: Vec<GaussianInt>,
}

impl GaussianFactorization {
    pub fn product(&self) -> GaussianInt {
        self.primes
            .iter()
            .fold(self.unit.clone(), |acc, p| &acc * p)
    }

    /// Distinct primes with multiplicities.
    pub fn grouped(&self) -> Vec<(GaussianInt, u32)> {
        let mut out: Vec<(GaussianInt, u32)> = Vec::new();
        for p in &self.primes {
            match out.last_mut() {
                Some((q, k)) if q == p => *k += 1,
                _ => out.push((p.clone(), 1)),
            }
        }
        out
    }
}

/// `(a, b)` with `a² + b² = p` for a prime `p ≡ 1 (mod 4)`.
pub(crate) fn two_squares_of_prime(p: u64) -> (u64, u64) {
    let nonresidue = (2..p)
        .find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1)
        .expect("odd primes have quadratic nonresidues");
    let root = pow_mod(nonresidue, (p - 1) / 4, p);
    // Euclid on (p, root) stops at the first remainder below √p.
    let limit = isqrt(p);
    let (mut a, mut b) = (p, root);
    while b > limit {
        (a, b) = (b, a % b);
    }
    let rest = p - b * b;
    let c = isqrt(rest);
    debug_assert_eq!(c * c, rest);
    (b, c)
}

fn sort_key(g: &GaussianInt) -> (BigInt, BigInt, BigInt) {
    (g.norm(), g.re.clone(), g.im.clone())
}

pub fn gaussian_factor(w: &GaussianInt) -> Result<GaussianFactorization> {
    if w.is_zero() {
        return Err(Error::FactorZero);
    }
    let norm = w.norm();
    let n = norm
        .to_u64()
        .ok_or_else(|| Error::NormTooLarge(norm.to_string()))?;

    let mut rest = w.clone();
    let mut primes = Vec::new();
    let mut divide_out = |pi: &GaussianInt, limit: u32, rest: &mut GaussianInt| -> u32 {
        let mut k = 0;
        while k < limit {
            match rest.div_exact(pi) {
                Some(q) => {
                    *rest = q;
                    primes.push(pi.clone());
                    k += 1;
                }
                None => break,
            }
        }
        k
    };

    for (p, e) in arith::factorize(n) {
        if p == 2 {
            divide_out(&GaussianInt::new(1, 1), e, &mut rest);
        } else if p % 4 == 3 {
            divide_out(&GaussianInt::new(p, 0), e / 2, &mut rest);
        } else {
            let (a, b) = two_squares_of_prime(p);
            let first = GaussianInt::new(a, b).canonical();
            let second = GaussianInt::new(a, -(b as i64)).canonical();
            let k = divide_out(&first, e, &mut rest);
            divide_out(&second, e - k, &mut rest);
        }
    }
    if !rest.is_unit() {
        return Err(Error::Invariant(format!(
            "factoring {w} left the non-unit cofactor {rest}"
        )));
    }
    primes.sort_by_key(sort_key);
    Ok(GaussianFactorization { unit: rest, primes })
}
