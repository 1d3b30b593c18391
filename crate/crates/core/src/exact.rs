//! Exact-rational twins of the polynomial moment functions.
//!
//! `pi`, `g`, `h`, `kappa`, `phi` and `G` are polynomials in `delta` and
//! `mu`, so they evaluate exactly over big rationals. The oracle module
//! builds its finite-`n` moment formulas on top of these; the test suite
//! uses them to pin the `f64` implementations down to rounding error.

use crate::combinatorics::binomial_big;
use crate::relation::RelationIndexSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

/// `a / b` as an exact rational.
pub fn rat(a: i64, b: i64) -> Rat {
    Rat::new(BigInt::from(a), BigInt::from(b))
}

/// `x^e` with `0^0 = 1`.
pub fn pow_rat(x: &Rat, e: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn binom_rat(n: usize, k: usize) -> Rat {
    Rat::from_integer(binomial_big(n as u64, k as u64))
}

/// Exact `pi_i(delta) = C(k,i) delta^i (1-delta)^(k-i)`.
pub fn pi_exact(i: usize, k: usize, delta: &Rat) -> Rat {
    assert!(i <= k, "pi_exact: i={i} > k={k}");
    let one_minus = Rat::one() - delta;
    binom_rat(k, i) * pow_rat(delta, i) * pow_rat(&one_minus, k - i)
}

/// Exact `g(delta)`.
pub fn g_exact(rel: &RelationIndexSet, delta: &Rat) -> Rat {
    rel.allowed().iter().map(|&i| pi_exact(i, rel.k(), delta)).sum()
}

/// Exact `h(delta) = sum i pi_i(delta)`.
pub fn h_exact(rel: &RelationIndexSet, delta: &Rat) -> Rat {
    rel.allowed()
        .iter()
        .map(|&i| Rat::from_integer(BigInt::from(i)) * pi_exact(i, rel.k(), delta))
        .sum()
}

/// Exact `kappa_{i,j,d}` at overlap class probabilities `both = (1-mu) delta`,
/// `single = mu delta`, `neither = 1 - delta - mu delta`.
pub fn kappa_exact(k: usize, i: usize, j: usize, d: usize, delta: &Rat, mu: &Rat) -> Rat {
    let both = (Rat::one() - mu) * delta;
    let single = mu * delta;
    let neither = Rat::one() - delta - mu * delta;
    pow_rat(&both, d) * pow_rat(&single, i + j - 2 * d) * pow_rat(&neither, k + d - i - j)
}

/// Exact `phi_{i,j}(mu)`.
pub fn phi_exact(k: usize, i: usize, j: usize, delta: &Rat, mu: &Rat) -> Rat {
    let dmin = (i + j).saturating_sub(k);
    let dmax = i.min(j);
    let mut acc = Rat::zero();
    for d in dmin..=dmax {
        acc += binom_rat(k, i)
            * binom_rat(i, d)
            * binom_rat(k - i, j - d)
            * kappa_exact(k, i, j, d, delta, mu);
    }
    acc
}

/// Exact `G(mu)`.
pub fn big_g_exact(rel: &RelationIndexSet, delta: &Rat, mu: &Rat) -> Rat {
    let k = rel.k();
    let mut acc = Rat::zero();
    for &i in rel.allowed() {
        for &j in rel.allowed() {
            acc += phi_exact(k, i, j, delta, mu);
        }
    }
    acc
}

/// Exact rational to `f64` (used only in tests and diagnostics).
pub fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments;
    use crate::rng::SplitMix64;

    #[test]
    fn independence_identity_is_exact() {
        // G(1-delta) = g(delta)^2 as exact rationals
        let rel = RelationIndexSet::new(5, [1, 3, 4]).unwrap();
        for num in 1..8 {
            let d = rat(num, 8);
            let mu = Rat::one() - &d;
            assert_eq!(big_g_exact(&rel, &d, &mu), g_exact(&rel, &d) * g_exact(&rel, &d));
        }
    }

    #[test]
    fn float_agrees_with_rational_twin() {
        // every f64 moment function within 1e-12 of the exact value at
        // rational test points
        let mut rng = SplitMix64::new(3);
        for _ in 0..200 {
            let k = 3 + rng.next_below(8) as usize;
            let n_allowed = 1 + rng.next_below((k - 1) as u64) as usize;
            let mut allowed: Vec<usize> =
                (0..n_allowed).map(|_| 1 + rng.next_below((k - 1) as u64) as usize).collect();
            allowed.sort_unstable();
            allowed.dedup();
            let rel = RelationIndexSet::new(k, allowed).unwrap();
            let dn = 1 + rng.next_below(31) as i64;
            let d = rat(dn, 32);
            let df = dn as f64 / 32.0;
            assert!((moments::g(&rel, df).unwrap() - rat_to_f64(&g_exact(&rel, &d))).abs() < 1e-12);
            assert!((moments::h(&rel, df).unwrap() - rat_to_f64(&h_exact(&rel, &d))).abs() < 1e-12);
            // mu restricted to the valid overlap range
            let sup = moments::overlap_sup(df);
            let mn = rng.next_below(33) as i64;
            let mu = rat(mn, 32) * Rat::from_float(sup).unwrap();
            let muf = rat_to_f64(&mu);
            let exact = big_g_exact(&rel, &d, &mu);
            assert!(
                (moments::big_g(&rel, df, muf).unwrap() - rat_to_f64(&exact)).abs() < 1e-12
            );
            for i in 0..=k {
                let e = pi_exact(i, k, &d);
                assert!((moments::pi(i, k, df).unwrap() - rat_to_f64(&e)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_exact_partitions_unity() {
        let d = rat(2, 7);
        let mu = rat(1, 3);
        let k = 6;
        let mut total = Rat::zero();
        for i in 0..=k {
            for j in 0..=k {
                total += phi_exact(k, i, j, &d, &mu);
            }
        }
        assert_eq!(total, Rat::one());
    }
}
