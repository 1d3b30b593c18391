//! Exact-rational moment oracles.
//!
//! Everything here is big-rational arithmetic; "agree" between the two modes
//! below always means bit-exact equality.
//!
//! * *Product-formula mode* evaluates the finite-`n` closed forms:
//!   `E[X_p] = C(n,p) q^m` with `q = sum_{i in I} C(k,i)(p/n)^i(1-p/n)^(k-i)`
//!   and `E[X_p^2] = sum_{p'} multinomial(n; p-p', p', p', n-p-p') Q(p')^m`.
//! * *Enumeration mode* averages `X_p` (and its square) over every instance
//!   of the probability space — all `(n^k)^m` ways to draw `m` constraints —
//!   and refuses spaces beyond 1e8 points rather than sampling.

use crate::combinatorics::{binomial_big, multinomial_big};
use crate::exact::{pow_rat, Rat};
use crate::relation::RelationIndexSet;
use crate::tolerances::ENUMERATION_CAP;
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("probability space has {size} instances, enumeration cap is {cap}")]
    SizeLimit { size: u128, cap: u128 },
    #[error("too many p-valuations for the bitmask enumerator: C({n},{p}) > 64")]
    TooManyValuations { n: usize, p: usize },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
}

/// How an exact moment was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    Enumeration,
    ProductFormula,
}

/// An exact moment together with the size of the probability space it
/// averages over.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMoment {
    pub value: Rat,
    pub space_size: BigInt,
    pub method: MomentMethod,
}

fn space_size(n: usize, k: usize, m: usize) -> BigInt {
    BigInt::from(n).pow(k as u32).pow(m as u32)
}

/// Exact single-constraint satisfaction probability for a `p`-valuation:
/// `q = sum_{i in I} C(k,i) (p/n)^i ((n-p)/n)^(k-i)`.
pub fn q_single(rel: &RelationIndexSet, n: usize, p: usize) -> Rat {
    let k = rel.k();
    let pn = Rat::new(BigInt::from(p), BigInt::from(n));
    let qn = Rat::new(BigInt::from(n - p), BigInt::from(n));
    rel.allowed()
        .iter()
        .map(|&i| {
            Rat::from_integer(binomial_big(k as u64, i as u64))
                * pow_rat(&pn, i)
                * pow_rat(&qn, k - i)
        })
        .sum()
}

/// `E[X_p]` by the product formula `C(n,p) q^m`.
pub fn first_moment_formula(
    n: usize,
    p: usize,
    m: usize,
    rel: &RelationIndexSet,
) -> Result<RationalMoment, OracleError> {
    check_np(n, p)?;
    let value = Rat::from_integer(binomial_big(n as u64, p as u64))
        * pow_rat(&q_single(rel, n, p), m);
    Ok(RationalMoment { value, space_size: space_size(n, rel.k(), m), method: MomentMethod::ProductFormula })
}

/// Exact joint satisfaction probability `Q(p')` for a pair of
/// `p`-valuations sharing `p - p'` ones:
/// `Q = sum_{i,j in I} sum_d C(k,i) C(i,d) C(k-i,j-d)
///      ((p-p')/n)^d (p'/n)^(i+j-2d) ((n-p-p')/n)^(k-i-j+d)`.
pub fn q_pair(rel: &RelationIndexSet, n: usize, p: usize, p_prime: usize) -> Rat {
    let k = rel.k();
    let both = Rat::new(BigInt::from(p - p_prime), BigInt::from(n));
    let single = Rat::new(BigInt::from(p_prime), BigInt::from(n));
    let neither = Rat::new(BigInt::from(n - p - p_prime), BigInt::from(n));
    let mut acc = Rat::zero();
    for &i in rel.allowed() {
        for &j in rel.allowed() {
            let dmin = (i + j).saturating_sub(k);
            for d in dmin..=i.min(j) {
                acc += Rat::from_integer(
                    binomial_big(k as u64, i as u64)
                        * binomial_big(i as u64, d as u64)
                        * binomial_big((k - i) as u64, (j - d) as u64),
                ) * pow_rat(&both, d)
                    * pow_rat(&single, i + j - 2 * d)
                    * pow_rat(&neither, k + d - i - j);
            }
        }
    }
    acc
}

/// `E[X_p^2]` by the pair formula, summing over the overlap ones-count `p'`.
pub fn second_moment_formula(
    n: usize,
    p: usize,
    m: usize,
    rel: &RelationIndexSet,
) -> Result<RationalMoment, OracleError> {
    check_np(n, p)?;
    let mut value = Rat::zero();
    for p_prime in 0..=p.min(n - p) {
        let count = multinomial_big(
            n as u64,
            &[(p - p_prime) as u64, p_prime as u64, p_prime as u64, (n - p - p_prime) as u64],
        );
        value += Rat::from_integer(count) * pow_rat(&q_pair(rel, n, p, p_prime), m);
    }
    Ok(RationalMoment { value, space_size: space_size(n, rel.k(), m), method: MomentMethod::ProductFormula })
}

fn check_np(n: usize, p: usize) -> Result<(), OracleError> {
    if n == 0 {
        return Err(OracleError::BadParameters("n must be positive".into()));
    }
    if p > n {
        return Err(OracleError::BadParameters(format!("p={p} exceeds n={n}")));
    }
    Ok(())
}

/// All `p`-subsets of `[0, n)` as bitmasks, in Gosper order.
fn p_subsets(n: usize, p: usize) -> Vec<u64> {
    if p == 0 {
        return vec![0];
    }
    if p > n {
        return vec![];
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << p) - 1;
    while x <= full {
        out.push(x);
        // Gosper's hack: next bitmask with the same popcount
        let c = x & x.wrapping_neg();
        let r = match x.checked_add(c) {
            Some(r) => r,
            None => break,
        };
        x = r | (((r ^ x) >> 2) / c);
    }
    out
}

/// Per-constraint satisfaction bitmasks over all `p`-valuations, indexed by
/// constraint id in `[0, n^k)`.
fn constraint_masks(
    n: usize,
    p: usize,
    rel: &RelationIndexSet,
) -> Result<(Vec<u64>, usize), OracleError> {
    let k = rel.k();
    let valuations = p_subsets(n, p);
    if valuations.len() > 64 {
        return Err(OracleError::TooManyValuations { n, p });
    }

    let n_k = (n as u128).pow(k as u32) as usize;
    let mut masks = vec![0u64; n_k];
    for (cid, mask) in masks.iter_mut().enumerate() {
        // decode constraint id into k base-n digits
        let mut digits = [0usize; 16];
        let mut rest = cid;
        for d in digits.iter_mut().take(k) {
            *d = rest % n;
            rest /= n;
        }
        for (vid, &val) in valuations.iter().enumerate() {
            let ones = digits[..k].iter().filter(|&&var| val & (1u64 << var) != 0).count();
            if rel.permits(ones) {
                *mask |= 1u64 << vid;
            }
        }
    }
    Ok((masks, valuations.len()))
}

/// `(E[X_p], E[X_p^2])` by full enumeration of the instance space.
pub fn moments_enumerated(
    n: usize,
    p: usize,
    m: usize,
    rel: &RelationIndexSet,
) -> Result<(RationalMoment, RationalMoment), OracleError> {
    check_np(n, p)?;
    let k = rel.k();
    if k > 16 {
        return Err(OracleError::BadParameters(format!("enumeration supports k <= 16, got {k}")));
    }
    let n_k = (n as u128).pow(k as u32);
    if n_k > 1_000_000 {
        return Err(OracleError::SizeLimit { size: n_k, cap: 1_000_000 });
    }
    let size = n_k.checked_pow(m as u32).filter(|&s| s <= ENUMERATION_CAP).ok_or(
        OracleError::SizeLimit {
            size: n_k.saturating_pow(m as u32),
            cap: ENUMERATION_CAP,
        },
    )?;

    let (masks, n_valuations) = constraint_masks(n, p, rel)?;
    let full_mask: u64 =
        if n_valuations == 64 { u64::MAX } else { (1u64 << n_valuations) - 1 };

    let mut sum_x: u128 = 0;
    let mut sum_x2: u128 = 0;
    // odometer over m constraint ids
    let mut ids = vec![0usize; m];
    loop {
        let mut acc = full_mask;
        for &id in &ids {
            acc &= masks[id];
            if acc == 0 {
                break;
            }
        }
        let x = acc.count_ones() as u128;
        sum_x += x;
        sum_x2 += x * x;

        // advance odometer
        let mut pos = 0;
        loop {
            if pos == m {
                let make = |total: u128| RationalMoment {
                    value: Rat::new(BigInt::from(total), BigInt::from(size)),
                    space_size: BigInt::from(size),
                    method: MomentMethod::Enumeration,
                };
                return Ok((make(sum_x), make(sum_x2)));
            }
            ids[pos] += 1;
            if ids[pos] < masks.len() {
                break;
            }
            ids[pos] = 0;
            pos += 1;
        }
    }
}

/// Fixes two `p`-valuations with `p - p'` shared ones and enumerates all
/// `n^k` tuples: the exact fraction with `i` ones under the first and `j`
/// under the second must equal the finite-`n` `phi` summand. Returns the
/// comparison as exact rationals.
pub fn verify_phi_counts(
    n: usize,
    p: usize,
    p_prime: usize,
    i: usize,
    j: usize,
    k: usize,
) -> Result<bool, OracleError> {
    if p_prime > p || p + p_prime > n {
        return Err(OracleError::BadParameters(format!(
            "need p' <= p and p + p' <= n, got n={n} p={p} p'={p_prime}"
        )));
    }
    let n_k = (n as u128).pow(k as u32);
    if n_k > 10_000_000 {
        return Err(OracleError::SizeLimit { size: n_k, cap: 10_000_000 });
    }

    // sigma1 owns [0, p), sigma2 owns [0, p-p') and [p, p+p')
    let in_sigma1 = |v: usize| v < p;
    let in_sigma2 = |v: usize| v < p - p_prime || (p <= v && v < p + p_prime);

    let mut hits: u128 = 0;
    let mut digits = vec![0usize; k];
    let mut count = 0u128;
    loop {
        let ones1 = digits.iter().filter(|&&v| in_sigma1(v)).count();
        let ones2 = digits.iter().filter(|&&v| in_sigma2(v)).count();
        if ones1 == i && ones2 == j {
            hits += 1;
        }
        count += 1;
        let mut pos = 0;
        loop {
            if pos == k {
                debug_assert_eq!(count, n_k);
                let fraction = Rat::new(BigInt::from(hits), BigInt::from(n_k));
                // finite-n phi summand with class probabilities
                // (p-p')/n, p'/n, (n-p-p')/n
                let both = Rat::new(BigInt::from(p - p_prime), BigInt::from(n));
                let single = Rat::new(BigInt::from(p_prime), BigInt::from(n));
                let neither = Rat::new(BigInt::from(n - p - p_prime), BigInt::from(n));
                let mut formula = Rat::zero();
                let dmin = (i + j).saturating_sub(k);
                for d in dmin..=i.min(j) {
                    formula += Rat::from_integer(
                        binomial_big(k as u64, i as u64)
                            * binomial_big(i as u64, d as u64)
                            * binomial_big((k - i) as u64, (j - d) as u64),
                    ) * pow_rat(&both, d)
                        * pow_rat(&single, i + j - 2 * d)
                        * pow_rat(&neither, k + d - i - j);
                }
                return Ok(fraction == formula);
            }
            digits[pos] += 1;
            if digits[pos] < n {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Second-moment success ratio `E[X_p]^2 / E[X_p^2]`, exact. Zero when no
/// pair of `p`-valuations can satisfy anything (`E[X_p^2] = 0`).
pub fn moment_ratio(n: usize, p: usize, m: usize, rel: &RelationIndexSet) -> Result<Rat, OracleError> {
    let first = first_moment_formula(n, p, m, rel)?.value;
    let second = second_moment_formula(n, p, m, rel)?.value;
    if second.is_zero() {
        return Ok(Rat::zero());
    }
    Ok(&first * &first / second)
}
