//! Exact binomial and multinomial coefficients.

use num_bigint::BigInt;
use num_traits::One;

/// Binomial coefficient as an exact `u128`. Panics on overflow, which cannot
/// happen for the arities (`k <= 64`) this crate works with.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient as an `f64`. Exact for all values below 2^53.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial_u128(n as u64, k as u64) as f64
}

/// Binomial coefficient as a `BigInt`.
pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Multinomial coefficient `n! / (parts[0]! ... parts[q]!)`. The parts must
/// sum to `n`.
pub fn multinomial_big(n: u64, parts: &[u64]) -> BigInt {
    debug_assert_eq!(parts.iter().sum::<u64>(), n);
    let mut acc = BigInt::one();
    let mut remaining = n;
    for &p in parts {
        acc *= binomial_big(remaining, p);
        remaining -= p;
    }
    acc
}
