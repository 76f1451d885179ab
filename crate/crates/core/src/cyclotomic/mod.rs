//! Exact arithmetic in cyclotomic fields and 2-adic membership tests.

mod field;
pub mod gf2;
mod number;
mod prime;

pub use field::{cyclotomic_polynomial, field, totient, Field};
pub use number::CycNum;
pub use prime::{num_primes_above_two, prime_context, IdealTester, PrimeContext, Valuation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ζ_M^k` reduced to the power basis.
pub fn root_of_unity(m: u32, k: i64) -> CycNum {
    CycNum::root_of_unity(m, k)
}

/// Outcome of classifying a sum of `2^m` powers of a primitive `2^n`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RootSum {
    NotInIdeal,
    Zero,
    AllEqual,
}

/// Classifies `s = Σ ζ^{l_i}` (`ζ` a primitive `2^n`-th root of unity, `2^m`
/// terms): outside `2^m O`, zero, or all terms equal. A sum that is in the
/// ideal, nonzero and has unequal terms is reported as a `LemmaViolation`.
pub fn root_sum_classify(n: u32, m: u32, exponents: &[i64]) -> Result<RootSum> {
    if n == 0 || m == 0 || exponents.len() != 1usize << m {
        return Err(Error::Malformed(format!(
            "need n >= 1, m >= 1 and 2^m exponents (n = {n}, m = {m}, {} given)",
            exponents.len()
        )));
    }
    let modulus = 1u32 << n;
    let ctx = prime_context(modulus, 0)?;
    root_sum_classify_in(&ctx, n, m, exponents)
}

/// As [`root_sum_classify`], reusing a context for conductor `2^n`.
pub fn root_sum_classify_in(ctx: &PrimeContext, n: u32, m: u32, exponents: &[i64]) -> Result<RootSum> {
    let modulus = 1i64 << n;
    debug_assert_eq!(ctx.conductor() as i64, modulus);
    let fld = ctx.field();
    let mut s = vec![0i64; fld.degree()];
    for &l in exponents {
        for (a, &b) in s.iter_mut().zip(fld.power(l)) {
            *a += b;
        }
    }
    if !ctx.int_in_ideal_power(&s, (m * ctx.e()) as usize) {
        return Ok(RootSum::NotInIdeal);
    }
    if s.iter().all(|&c| c == 0) {
        return Ok(RootSum::Zero);
    }
    let first = exponents[0].rem_euclid(modulus);
    if exponents.iter().all(|l| l.rem_euclid(modulus) == first) {
        Ok(RootSum::AllEqual)
    } else {
        Err(Error::LemmaViolation {
            exponents: exponents.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(root_sum_classify(2, 1, &[0, 2]).unwrap(), RootSum::Zero);
        assert_eq!(root_sum_classify(2, 1, &[0, 0]).unwrap(), RootSum::AllEqual);
        assert_eq!(root_sum_classify(2, 1, &[0, 1]).unwrap(), RootSum::NotInIdeal);
        assert!(root_sum_classify(2, 1, &[0]).is_err());
    }
}
