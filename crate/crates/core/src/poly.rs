//! Dense univariate polynomials over `f64`.
//!
//! `G(mu)` is a polynomial of degree `k` for any relation, so expanding it
//! once gives analytic derivatives for stationarity and concavity checks
//! with no finite-difference noise.

use crate::combinatorics::binomial_f64;
use crate::relation::RelationIndexSet;

/// Coefficients in ascending degree order. The zero polynomial is `[]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(vec![]);
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add_scaled(&mut self, other: &Poly, scale: f64) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0.0);
        }
        for (i, &b) in other.0.iter().enumerate() {
            self.0[i] += scale * b;
        }
    }

    /// `(a + b x)^e` by repeated multiplication.
    pub fn linear_pow(a: f64, b: f64, e: usize) -> Poly {
        let mut acc = Poly::constant(1.0);
        let base = Poly(vec![a, b]);
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        acc
    }
}

/// Expands `G(mu)` for a fixed `delta` into polynomial coefficients in `mu`.
///
/// Each kappa term is `((1-mu) delta)^d (mu delta)^(i+j-2d)
/// (1-delta-delta mu)^(k-i-j+d)`, a product of three linear powers.
pub fn big_g_poly(rel: &RelationIndexSet, delta: f64) -> Poly {
    let k = rel.k();
    let mut acc = Poly(vec![]);
    for &i in rel.allowed() {
        for &j in rel.allowed() {
            let dmin = (i + j).saturating_sub(k);
            let dmax = i.min(j);
            for d in dmin..=dmax {
                let coeff = binomial_f64(k, i) * binomial_f64(i, d) * binomial_f64(k - i, j - d);
                let both = Poly::linear_pow(delta, -delta, d);
                let single = Poly::linear_pow(0.0, delta, i + j - 2 * d);
                let neither = Poly::linear_pow(1.0 - delta, -delta, k + d - i - j);
                acc.add_scaled(&both.mul(&single).mul(&neither), coeff);
            }
        }
    }
    acc
}

/// `(ln G)''(mu) = (G G'' - G'^2) / G^2` from the expanded polynomial.
pub fn log_g_second(gp: &Poly, gp1: &Poly, gp2: &Poly, mu: f64) -> f64 {
    let g = gp.eval(mu);
    let g1 = gp1.eval(mu);
    let g2 = gp2.eval(mu);
    (g * g2 - g1 * g1) / (g * g)
}
