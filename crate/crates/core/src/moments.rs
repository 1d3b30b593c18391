//! Scalar moment functions in `f64`.
//!
//! For a relation `I` of arity `k` and a fraction `delta` of variables set
//! to 1:
//!
//! * `pi(i) = C(k,i) delta^i (1-delta)^(k-i)` — probability a random k-tuple
//!   sees `i` ones,
//! * `g = sum_{i in I} pi(i)` — probability a delta-valuation satisfies a
//!   random constraint,
//! * `gamma_r = g^r / (delta^delta (1-delta)^(1-delta))` — per-variable
//!   growth rate of the expected number of delta-solutions at ratio `r`,
//! * `rhat` — the ratio above which that expectation vanishes.
//!
//! For a *pair* of delta-valuations at overlap `mu` (fraction of the ones of
//! one valuation that are zeros of the other), `kappa`/`phi`/`big_g` give the
//! joint satisfaction probability `G`, `t_delta` the multinomial entropy
//! term, and `big_gamma = G^r / t` the pairwise growth rate. The overlap
//! ranges over `[0, min(1, (1-delta)/delta)]`, and `mu = 1 - delta` is the
//! independence point where `G = g^2` and `Gamma = gamma^2`.
//!
//! Endpoint convention throughout: `0^0 = 1`, so every function returns its
//! exact limit on the closed domain instead of NaN.

use crate::combinatorics::binomial_f64;
use crate::relation::RelationIndexSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("domain error: {0}")]
pub struct DomainError(pub String);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), DomainError> {
    if cond {
        Ok(())
    } else {
        Err(DomainError(msg()))
    }
}

/// `x^e` with the `0^0 = 1` convention for integer exponents.
fn powi0(x: f64, e: i64) -> f64 {
    if e == 0 {
        1.0
    } else {
        x.powi(e as i32)
    }
}

/// `x^x` with `0^0 = 1`. Tiny negative arguments from rounding are treated
/// as zero.
fn pow_self(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        x.powf(x)
    }
}

/// `delta^delta (1-delta)^(1-delta)`, the reciprocal of the binary entropy
/// exponential.
pub fn entropy_weight(delta: f64) -> f64 {
    pow_self(delta) * pow_self(1.0 - delta)
}

/// Upper end of the overlap domain, `min(1, (1-delta)/delta)`.
pub fn overlap_sup(delta: f64) -> f64 {
    if delta <= 0.5 {
        1.0
    } else {
        (1.0 - delta) / delta
    }
}

/// Probability that a random k-tuple contains exactly `i` ones under a
/// delta-valuation.
pub fn pi(i: usize, k: usize, delta: f64) -> Result<f64, DomainError> {
    check(i <= k, || format!("pi: i={i} > k={k}"))?;
    check((0.0..=1.0).contains(&delta), || format!("pi: delta={delta} outside [0,1]"))?;
    Ok(binomial_f64(k, i) * powi0(delta, i as i64) * powi0(1.0 - delta, (k - i) as i64))
}

/// Probability that a delta-valuation satisfies a random constraint.
pub fn g(rel: &RelationIndexSet, delta: f64) -> Result<f64, DomainError> {
    check((0.0..=1.0).contains(&delta), || format!("g: delta={delta} outside [0,1]"))?;
    Ok(rel.allowed().iter().map(|&i| pi(i, rel.k(), delta).unwrap()).sum())
}

/// `h = sum_{i in I} i pi(i)`; satisfies
/// `delta (1-delta) g'(delta) = h - k delta g`.
pub fn h(rel: &RelationIndexSet, delta: f64) -> Result<f64, DomainError> {
    check((0.0..=1.0).contains(&delta), || format!("h: delta={delta} outside [0,1]"))?;
    Ok(rel
        .allowed()
        .iter()
        .map(|&i| i as f64 * pi(i, rel.k(), delta).unwrap())
        .sum())
}

/// Analytic `g'(delta)`, valid on the closed interval.
pub fn g_prime(rel: &RelationIndexSet, delta: f64) -> f64 {
    let k = rel.k();
    let mut acc = 0.0;
    for &i in rel.allowed() {
        let c = binomial_f64(k, i);
        if i >= 1 {
            acc += c * i as f64 * powi0(delta, i as i64 - 1) * powi0(1.0 - delta, (k - i) as i64);
        }
        if k - i >= 1 {
            acc -= c * (k - i) as f64
                * powi0(delta, i as i64)
                * powi0(1.0 - delta, (k - i) as i64 - 1);
        }
    }
    acc
}

/// Analytic `g''(delta)`.
pub fn g_second(rel: &RelationIndexSet, delta: f64) -> f64 {
    let k = rel.k();
    let mut acc = 0.0;
    for &i in rel.allowed() {
        let c = binomial_f64(k, i);
        let (i, j) = (i as i64, (k - i) as i64);
        if i >= 2 {
            acc += c * (i * (i - 1)) as f64 * powi0(delta, i - 2) * powi0(1.0 - delta, j);
        }
        if i >= 1 && j >= 1 {
            acc -= c * (2 * i * j) as f64 * powi0(delta, i - 1) * powi0(1.0 - delta, j - 1);
        }
        if j >= 2 {
            acc += c * (j * (j - 1)) as f64 * powi0(delta, i) * powi0(1.0 - delta, j - 2);
        }
    }
    acc
}

/// Growth rate `gamma_r(delta) = g^r / (delta^delta (1-delta)^(1-delta))`
/// of the expected delta-solution count per variable.
pub fn gamma(rel: &RelationIndexSet, r: f64, delta: f64) -> Result<f64, DomainError> {
    check(r >= 0.0, || format!("gamma: r={r} negative"))?;
    let gv = g(rel, delta)?;
    let num = if r == 0.0 { 1.0 } else { gv.powf(r) };
    Ok(num / entropy_weight(delta))
}

/// First-moment cap: for `r > rhat` the expected number of delta-solutions
/// vanishes, so no delta-based lower bound can exceed it.
pub fn rhat(rel: &RelationIndexSet, delta: f64) -> Result<f64, DomainError> {
    check(delta > 0.0 && delta < 1.0, || format!("rhat: delta={delta} outside (0,1)"))?;
    let gv = g(rel, delta)?;
    check(gv < 1.0, || format!("rhat: undefined cap, g={gv} >= 1"))?;
    check(gv > 0.0, || format!("rhat: g vanishes at delta={delta}"))?;
    Ok((delta * delta.ln() + (1.0 - delta) * (1.0 - delta).ln()) / gv.ln())
}

/// One overlap term: probability that a random k-tuple takes `i` ones under
/// the first valuation, `j` under the second, with `d` positions set in
/// both. `mu` is the overlap parameter.
pub fn kappa(
    k: usize,
    i: usize,
    j: usize,
    d: usize,
    delta: f64,
    mu: f64,
) -> Result<f64, DomainError> {
    check(i <= k && j <= k, || format!("kappa: i={i}, j={j} outside 0..={k}"))?;
    let dmin = (i + j).saturating_sub(k);
    check(d >= dmin && d <= i.min(j), || {
        format!("kappa: d={d} outside [{dmin}, {}]", i.min(j))
    })?;
    check_mu(delta, mu, "kappa")?;
    let both = (1.0 - mu) * delta;
    let single = mu * delta;
    let neither = (1.0 - delta - mu * delta).max(0.0);
    Ok(powi0(both, d as i64)
        * powi0(single, (i + j - 2 * d) as i64)
        * powi0(neither, (k + d - i - j) as i64))
}

fn check_mu(delta: f64, mu: f64, who: &str) -> Result<(), DomainError> {
    check((0.0..=1.0).contains(&delta), || format!("{who}: delta={delta} outside [0,1]"))?;
    let sup = overlap_sup(delta);
    check(mu >= 0.0 && mu <= sup + 1e-12, || {
        format!("{who}: mu={mu} outside [0, {sup}]")
    })
}

/// Joint ones-count probability `phi_{i,j}(mu)`, summing `kappa` over the
/// feasible intersection sizes `d`.
pub fn phi(k: usize, i: usize, j: usize, delta: f64, mu: f64) -> Result<f64, DomainError> {
    check(i <= k && j <= k, || format!("phi: i={i}, j={j} outside 0..={k}"))?;
    check_mu(delta, mu, "phi")?;
    let dmin = (i + j).saturating_sub(k);
    let dmax = i.min(j);
    let mut acc = 0.0;
    for d in dmin..=dmax {
        acc += binomial_f64(k, i)
            * binomial_f64(i, d)
            * binomial_f64(k - i, j - d)
            * kappa(k, i, j, d, delta, mu)?;
    }
    Ok(acc)
}

/// Probability `G(mu)` that a pair of delta-valuations at overlap `mu` both
/// satisfy a random constraint.
pub fn big_g(rel: &RelationIndexSet, delta: f64, mu: f64) -> Result<f64, DomainError> {
    check_mu(delta, mu, "big_g")?;
    let k = rel.k();
    let mut acc = 0.0;
    for &i in rel.allowed() {
        for &j in rel.allowed() {
            acc += phi(k, i, j, delta, mu)?;
        }
    }
    Ok(acc)
}

/// Multinomial entropy term
/// `t(mu) = ((1-mu)delta)^((1-mu)delta) (mu delta)^(2 mu delta)
///  (1-delta-mu delta)^(1-delta-mu delta)`.
pub fn t_delta(delta: f64, mu: f64) -> Result<f64, DomainError> {
    check_mu(delta, mu, "t")?;
    let both = (1.0 - mu) * delta;
    let single = mu * delta;
    let neither = 1.0 - delta - mu * delta;
    Ok(pow_self(both) * pow_self(single).powi(2) * pow_self(neither))
}

/// `ln t(mu)`, computed directly for scans that need exponents.
pub fn ln_t_delta(delta: f64, mu: f64) -> Result<f64, DomainError> {
    check_mu(delta, mu, "ln_t")?;
    let mut acc = 0.0;
    for (base, weight) in [
        ((1.0 - mu) * delta, (1.0 - mu) * delta),
        (mu * delta, 2.0 * mu * delta),
        (1.0 - delta - mu * delta, 1.0 - delta - mu * delta),
    ] {
        if base > 0.0 {
            acc += weight * base.ln();
        }
    }
    Ok(acc)
}

/// Analytic `(ln t)'(mu) = delta ln(mu^2 delta / ((1-mu)(1-delta-mu delta)))`,
/// valid on the open overlap interval.
pub fn ln_t_prime(delta: f64, mu: f64) -> f64 {
    delta * ((mu * mu * delta) / ((1.0 - mu) * (1.0 - delta - mu * delta))).ln()
}

/// Pairwise growth rate `Gamma_r(mu) = G(mu)^r / t(mu)`.
pub fn big_gamma(rel: &RelationIndexSet, delta: f64, r: f64, mu: f64) -> Result<f64, DomainError> {
    check(r >= 0.0, || format!("big_gamma: r={r} negative"))?;
    let gv = big_g(rel, delta, mu)?;
    let num = if r == 0.0 { 1.0 } else { gv.powf(r) };
    Ok(num / t_delta(delta, mu)?)
}

/// `ln Gamma_r(mu)`; `-inf` where `G` vanishes and `r > 0`.
pub fn ln_big_gamma(
    rel: &RelationIndexSet,
    delta: f64,
    r: f64,
    mu: f64,
) -> Result<f64, DomainError> {
    let gv = big_g(rel, delta, mu)?;
    let num = if r == 0.0 { 0.0 } else { r * gv.ln() };
    Ok(num - ln_t_delta(delta, mu)?)
}

/// One row of the `profile` output: `g`, `gamma` and the first-moment cap at
/// a fixed `delta`.
#[derive(Debug, Clone, Copy)]
pub struct MomentPoint {
    pub delta: f64,
    pub g: f64,
    pub gamma: f64,
    /// First-moment cap at this delta; `+inf` marks an undefined cap.
    pub rhat: f64,
}

impl MomentPoint {
    pub fn at(rel: &RelationIndexSet, r: f64, delta: f64) -> Result<Self, DomainError> {
        let gv = g(rel, delta)?;
        let rh = if delta > 0.0 && delta < 1.0 && gv > 0.0 && gv < 1.0 {
            rhat(rel, delta)?
        } else {
            f64::INFINITY
        };
        Ok(Self { delta, g: gv, gamma: gamma(rel, r, delta)?, rhat: rh })
    }
}

/// One row of the `surface` output: the overlap functions at a fixed `mu`.
#[derive(Debug, Clone, Copy)]
pub struct OverlapPoint {
    pub mu: f64,
    pub big_g: f64,
    pub t: f64,
    pub big_gamma: f64,
}

impl OverlapPoint {
    pub fn at(rel: &RelationIndexSet, delta: f64, r: f64, mu: f64) -> Result<Self, DomainError> {
        Ok(Self {
            mu,
            big_g: big_g(rel, delta, mu)?,
            t: t_delta(delta, mu)?,
            big_gamma: big_gamma(rel, delta, r, mu)?,
        })
    }
}
