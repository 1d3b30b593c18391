//! Discrete Laplace approximation of the second-moment sum.
//!
//! The exact second moment of the delta-solution count is a sum over the
//! overlap ones-count `p' = mu floor(delta n)` of
//! `multinomial(n; (1-mu)dn, mu dn, mu dn, (1-d-mu d)n) G(mu)^(r n)`.
//! With `v(mu) = ln Gamma(mu)` peaking at an interior `mu0`, Stirling plus a
//! Gaussian integral collapse the sum to
//!
//! ```text
//! E[X^2] ~ delta / (2 pi n) * [(1-mu0)d (mu0 d)^2 (1-d-mu0 d)]^(-1/2)
//!          / sqrt(|v''(mu0)|) * Gamma(mu0)^n
//! ```
//!
//! (one `sqrt(n)` from the grid density `floor(delta n)` points per unit
//! `mu`, one from the Gaussian width, and the exact Stirling prefactor of
//! the multinomial so the estimate converges to the exact sum rather than
//! just bounding its growth rate). At `r = 0` this reduces to the classical
//! estimate of `C(n, dn)^2`.

use crate::moments;
use crate::numeric::golden_max;
use crate::relation::RelationIndexSet;
use crate::tolerances::FD_STEP_SECOND;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LaplaceError {
    #[error("log Gamma has {0} separated local maxima; Laplace needs a single peak")]
    MultipleMaxima(usize),
    #[error("curvature |v''(mu0)| = {0:.3e} too small for a Gaussian approximation")]
    DegenerateCurvature(f64),
    #[error("log Gamma peaks at the boundary mu = {0}")]
    BoundaryMaximum(f64),
    #[error("domain error: {0}")]
    Domain(String),
}

/// The approximation and the quantities it was built from.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceEstimate {
    /// Estimated `E[X_delta^2]`; may overflow to `inf` for large `n`.
    pub value: f64,
    /// `ln` of the estimate, always finite.
    pub ln_value: f64,
    /// Interior maximizer of `ln Gamma`.
    pub mu0: f64,
    /// `(ln Gamma)''(mu0)`.
    pub curvature: f64,
}

/// Laplace approximation of `E[X_delta^2]` at ratio `r` and size `n`.
///
/// Preconditions checked numerically: `ln Gamma` must have a unique interior
/// maximum on the overlap interval and nonvanishing curvature there.
pub fn laplace_estimate(
    rel: &RelationIndexSet,
    delta: f64,
    r: f64,
    n: usize,
) -> Result<LaplaceEstimate, LaplaceError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LaplaceError::Domain(format!("delta={delta} outside (0,1)")));
    }
    if r < 0.0 {
        return Err(LaplaceError::Domain(format!("r={r} negative")));
    }
    let sup = moments::overlap_sup(delta);
    let v = |mu: f64| {
        moments::ln_big_gamma(rel, delta, r, mu).unwrap_or(f64::NEG_INFINITY)
    };

    // scan for the peak and make sure it is unique
    let steps = 10_000usize;
    let values: Vec<f64> = (0..=steps).map(|i| v(sup * i as f64 / steps as f64)).collect();
    let peaks = separated_peaks(&values);
    if peaks.len() > 1 {
        return Err(LaplaceError::MultipleMaxima(peaks.len()));
    }
    let best = peaks.first().copied().unwrap_or_else(|| {
        values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    });
    if best == 0 || best == steps {
        return Err(LaplaceError::BoundaryMaximum(sup * best as f64 / steps as f64));
    }

    let cell = sup / steps as f64;
    let guess = sup * best as f64 / steps as f64;
    let (mu0, v0) = golden_max(v, guess - cell, guess + cell, 1e-12);

    let h = FD_STEP_SECOND;
    let curvature = (v(mu0 - h) - 2.0 * v0 + v(mu0 + h)) / (h * h);
    if !curvature.is_finite() || curvature.abs() < 1e-9 {
        return Err(LaplaceError::DegenerateCurvature(curvature.abs()));
    }

    let stirling = (1.0 - mu0) * delta * (mu0 * delta).powi(2) * (1.0 - delta - mu0 * delta);
    let ln_value = delta.ln() - (2.0 * std::f64::consts::PI * n as f64).ln()
        - 0.5 * stirling.ln()
        - 0.5 * curvature.abs().ln()
        + n as f64 * v0;
    Ok(LaplaceEstimate { value: ln_value.exp(), ln_value, mu0, curvature })
}

/// Indices of grid local maxima separated by a genuine dip (prominence
/// beyond rounding noise). Plateau runs collapse to one peak.
fn separated_peaks(values: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    for i in 1..values.len() - 1 {
        if values[i] >= values[i - 1]
            && values[i] >= values[i + 1]
            && (values[i] > values[i - 1] || values[i] > values[i + 1])
        {
            peaks.push(i);
        }
    }
    // merge peaks that are not separated by a real valley
    let mut separated: Vec<usize> = Vec::new();
    for &p in &peaks {
        match separated.last() {
            None => separated.push(p),
            Some(&q) => {
                let valley = values[q..=p].iter().copied().fold(f64::INFINITY, f64::min);
                let smaller_peak = values[q].min(values[p]);
                if smaller_peak - valley > 1e-9 {
                    separated.push(p);
                } else if values[p] > values[q] {
                    *separated.last_mut().unwrap() = p;
                }
            }
        }
    }
    separated
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial_f64;
    use approx::assert_abs_diff_eq;

    fn one3() -> RelationIndexSet {
        RelationIndexSet::one_in_k(3)
    }

    #[test]
    fn reduces_to_multinomial_estimate_at_r_zero() {
        // with no constraints E[X^2] = C(n, dn)^2 exactly
        let n = 90usize;
        let est = laplace_estimate(&one3(), 1.0 / 3.0, 0.0, n).unwrap();
        let exact = binomial_f64(n, n / 3).powi(2);
        let ratio = est.value / exact;
        assert!((0.95..=1.05).contains(&ratio), "ratio={ratio}");
        assert_abs_diff_eq!(est.mu0, 2.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn estimate_is_finite_and_positive() {
        let est = laplace_estimate(&one3(), 1.0 / 3.0, 0.3, 60).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0);
        assert!(est.curvature < 0.0);
    }

    #[test]
    fn multiple_maxima_detected_above_the_refined_bound() {
        // past the dominance boundary (~0.554) a second peak appears
        let err = laplace_estimate(&one3(), 1.0 / 3.0, 0.62, 60).unwrap_err();
        assert!(matches!(err, LaplaceError::MultipleMaxima(_)), "{err:?}");
    }

    #[test]
    fn domain_errors() {
        assert!(laplace_estimate(&one3(), 0.0, 0.3, 60).is_err());
        assert!(laplace_estimate(&one3(), 0.5, -1.0, 60).is_err());
    }

    #[test]
    fn peak_separation_helper() {
        // one clean peak
        assert_eq!(separated_peaks(&[0.0, 1.0, 0.0]).len(), 1);
        // plateau counts once
        assert_eq!(separated_peaks(&[0.0, 1.0, 1.0, 0.5]).len(), 1);
        // two separated peaks
        assert_eq!(separated_peaks(&[0.0, 1.0, 0.0, 0.9, 0.0]).len(), 2);
        // shoulder without a valley merges
        assert_eq!(separated_peaks(&[0.0, 1.0, 0.999999999, 1.5, 0.0]).len(), 1);
    }
}
