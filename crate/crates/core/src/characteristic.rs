//! Characteristic points: the local maximizers of `g`.
//!
//! The second moment method on delta-solutions only works at a `delta` where
//! the single-constraint satisfaction probability `g` is locally maximum
//! (there `Gamma` is stationary at the independence overlap `mu = 1-delta`).
//! Detection walks the sign changes of the analytic `g'` on a grid, then
//! refines each `+ -> -` bracket by bisection; an even-multiplicity zero of
//! `g'` produces no sign flip and is correctly skipped.

use crate::moments::{self, gamma, DomainError};
use crate::numeric::{bisect_root, derivative};
use crate::relation::RelationIndexSet;
use crate::tolerances::CHAR_DELTA_TOL;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CharacteristicError {
    #[error("grid_steps must be at least 1000, got {0}")]
    GridTooCoarse(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("no local maximum of g found on (0,1); this contradicts nontriviality")]
    NoMaxima,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// One local maximizer of `g`.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicPoint {
    pub delta: f64,
    pub g_value: f64,
    /// `gamma` at this point, filled by [`CharacteristicSet::annotate_gamma`].
    pub gamma_at_r: Option<f64>,
    /// Set when `g''` is numerically flat at the maximum.
    pub plateau: bool,
}

/// The sorted set of local maximizers of `g` on `(0, 1)`.
#[derive(Debug, Clone)]
pub struct CharacteristicSet {
    relation: RelationIndexSet,
    points: Vec<CharacteristicPoint>,
}

impl CharacteristicSet {
    pub fn relation(&self) -> &RelationIndexSet {
        &self.relation
    }

    pub fn points(&self) -> &[CharacteristicPoint] {
        &self.points
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta).collect()
    }

    /// Distance from `delta` to the nearest characteristic point.
    pub fn distance_to(&self, delta: f64) -> f64 {
        self.points.iter().map(|p| (p.delta - delta).abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, delta: f64, tol: f64) -> bool {
        self.distance_to(delta) <= tol
    }

    /// Fills `gamma_at_r` on every point for the given ratio.
    pub fn annotate_gamma(mut self, r: f64) -> Result<Self, DomainError> {
        for p in &mut self.points {
            p.gamma_at_r = Some(gamma(&self.relation, r, p.delta)?);
        }
        Ok(self)
    }
}

/// Default grid used when callers have no reason to pick one; comfortably
/// past the `10 k` stability point for every arity this crate targets.
pub fn default_grid_steps(rel: &RelationIndexSet) -> usize {
    (200 * rel.k()).max(4000)
}

/// Finds every local maximum of `g` on `(0, 1)`.
///
/// Brackets come from sign changes of the analytic `g'` on a grid of
/// `grid_steps` cells (so the grid must be fine enough to separate maxima;
/// anything past `10 k` is stable for these binomial sums), each refined by
/// bisection until the bracket is narrower than `tol`.
pub fn find_characteristic_set(
    rel: &RelationIndexSet,
    grid_steps: usize,
    tol: f64,
) -> Result<CharacteristicSet, CharacteristicError> {
    if grid_steps < 1000 {
        return Err(CharacteristicError::GridTooCoarse(grid_steps));
    }
    if !(tol > 0.0) {
        return Err(CharacteristicError::BadTolerance(tol));
    }

    let gp = |d: f64| moments::g_prime(rel, d);
    let mut points = Vec::new();

    // last grid point with a strictly positive g', carried across flat spots
    let mut last_pos: Option<f64> = None;
    for i in 1..grid_steps {
        let d = i as f64 / grid_steps as f64;
        let s = gp(d);
        if s > 0.0 {
            last_pos = Some(d);
        } else if s < 0.0 {
            if let Some(lo) = last_pos.take() {
                let root = bisect_root(gp, lo, d, tol);
                let g2 = moments::g_second(rel, root);
                points.push(CharacteristicPoint {
                    delta: root,
                    g_value: moments::g(rel, root)?,
                    gamma_at_r: None,
                    plateau: g2.abs() < 1e-7,
                });
            }
        }
        // s == 0.0 exactly: keep the bracket open; the next strictly
        // negative sample closes it and bisection lands inside the plateau
    }

    if points.is_empty() {
        return Err(CharacteristicError::NoMaxima);
    }
    Ok(CharacteristicSet { relation: rel.clone(), points })
}

/// Closed form for the overlap derivative at the independence point:
/// `G'(1-delta) = -delta g'(delta)^2 / k`.
///
/// Follows from expanding `phi'(1-delta)` with the Vandermonde and
/// hypergeometric-mean identities, which collapses the double sum to
/// `-(h - k delta g)^2 / (k delta (1-delta)^2)`, and then the link
/// `h - k delta g = delta (1-delta) g'`. Always nonpositive; zero exactly
/// at characteristic points, which is what makes `mu = 1-delta` stationary
/// for `Gamma` precisely there.
pub fn gprime_closed_at_independence(
    rel: &RelationIndexSet,
    delta: f64,
) -> Result<f64, DomainError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DomainError(format!("delta={delta} outside (0,1)")));
    }
    let gp = moments::g_prime(rel, delta);
    Ok(-delta * gp * gp / rel.k() as f64)
}

/// Numerically checks `Gamma'(1-delta) = 0` by central finite differences.
/// True exactly for characteristic `delta` (up to `tol`).
pub fn verify_stationarity(rel: &RelationIndexSet, delta: f64, r: f64, tol: f64) -> bool {
    let f = |mu: f64| moments::big_gamma(rel, delta, r, mu).unwrap_or(f64::NAN);
    let d = derivative(f, 1.0 - delta, 1);
    d.is_finite() && d.abs() < tol
}

/// The characteristic `delta` maximizing `gamma_r`; ties break toward the
/// smallest `delta`. Implements the selection rule conjectured to give the
/// best lower bound.
pub fn best_delta(rel: &RelationIndexSet, r: f64) -> Result<f64, CharacteristicError> {
    let set = find_characteristic_set(rel, default_grid_steps(rel), CHAR_DELTA_TOL)?;
    let mut best: Option<(f64, f64)> = None;
    for p in set.points() {
        let gv = gamma(rel, r, p.delta)?;
        let better = match best {
            None => true,
            Some((_, cur)) => gv > cur,
        };
        if better {
            best = Some((p.delta, gv));
        }
    }
    Ok(best.expect("set is nonempty").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_in_k_has_single_maximum_at_inverse_k() {
        for k in 3..=10 {
            let rel = RelationIndexSet::one_in_k(k);
            let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
            assert_eq!(set.points().len(), 1, "k={k}");
            assert_abs_diff_eq!(set.points()[0].delta, 1.0 / k as f64, epsilon = 1e-8);
            assert!(!set.points()[0].plateau);
        }
    }

    #[test]
    fn nae3_has_single_maximum_at_half() {
        let rel = RelationIndexSet::nae(3);
        let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
        assert_eq!(set.points().len(), 1);
        assert_abs_diff_eq!(set.points()[0].delta, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn i13_has_three_ordered_maxima() {
        let rel = RelationIndexSet::new(13, [1, 8, 12]).unwrap();
        let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
        assert_eq!(set.points().len(), 3);
        let p = set.points();
        assert!(p[0].delta < p[1].delta && p[1].delta < p[2].delta);
        // g(d2) < g(d1) < g(d3)
        assert!(p[1].g_value < p[0].g_value);
        assert!(p[0].g_value < p[2].g_value);
    }

    #[test]
    fn found_points_are_stationary_maxima() {
        for (k, allowed) in [(3usize, vec![1]), (13, vec![1, 8, 12]), (6, vec![2, 3, 5])] {
            let rel = RelationIndexSet::new(k, allowed).unwrap();
            let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
            for p in set.points() {
                assert!(moments::g_prime(&rel, p.delta).abs() < 1e-8);
                let eps = 1e-5;
                let g0 = p.g_value;
                assert!(moments::g(&rel, p.delta - eps).unwrap() <= g0 + 1e-12);
                assert!(moments::g(&rel, p.delta + eps).unwrap() <= g0 + 1e-12);
            }
        }
    }

    #[test]
    fn stable_under_grid_refinement() {
        let rel = RelationIndexSet::new(13, [1, 8, 12]).unwrap();
        let coarse = find_characteristic_set(&rel, 1000, 1e-10).unwrap();
        let fine = find_characteristic_set(&rel, 20_000, 1e-10).unwrap();
        assert_eq!(coarse.points().len(), fine.points().len());
        for (a, b) in coarse.points().iter().zip(fine.points()) {
            assert_abs_diff_eq!(a.delta, b.delta, epsilon = 1e-8);
        }
    }

    #[test]
    fn grid_and_tolerance_preconditions() {
        let rel = RelationIndexSet::one_in_k(3);
        assert_eq!(
            find_characteristic_set(&rel, 999, 1e-8).unwrap_err(),
            CharacteristicError::GridTooCoarse(999)
        );
        assert_eq!(
            find_characteristic_set(&rel, 1000, 0.0).unwrap_err(),
            CharacteristicError::BadTolerance(0.0)
        );
    }

    #[test]
    fn closed_form_gprime_examples() {
        let rel = RelationIndexSet::one_in_k(3);
        // at the characteristic point the closed form vanishes
        assert_abs_diff_eq!(
            gprime_closed_at_independence(&rel, 1.0 / 3.0).unwrap(),
            0.0,
            epsilon = 1e-10
        );
        // hand-evaluated at delta = 1/2: g'(1/2) = 3(1-d)(1-3d) = -3/4, so
        // -(1/2)(9/16)/3 = -3/32
        assert_abs_diff_eq!(
            gprime_closed_at_independence(&rel, 0.5).unwrap(),
            -3.0 / 32.0,
            epsilon = 1e-12
        );
        assert!(gprime_closed_at_independence(&rel, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_finite_difference_everywhere() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(13);
        for _ in 0..100 {
            let k = 3 + rng.next_below(8) as usize;
            let n_allowed = 1 + rng.next_below((k - 1) as u64) as usize;
            let mut allowed: Vec<usize> =
                (0..n_allowed).map(|_| 1 + rng.next_below((k - 1) as u64) as usize).collect();
            allowed.sort_unstable();
            allowed.dedup();
            let rel = RelationIndexSet::new(k, allowed).unwrap();
            let d = 0.1 + 0.8 * (rng.next_below(1_000_000) as f64 / 1e6);
            let fd = derivative(|mu| moments::big_g(&rel, d, mu).unwrap(), 1.0 - d, 1);
            let closed = gprime_closed_at_independence(&rel, d).unwrap();
            let scale = closed.abs().max(1e-3);
            assert!(
                (fd - closed).abs() <= 1e-6 * scale.max(1.0) + 1e-8,
                "k={k} d={d} fd={fd} closed={closed}"
            );
            assert!(closed <= 0.0);
        }
    }

    #[test]
    fn stationarity_examples() {
        let one3 = RelationIndexSet::one_in_k(3);
        assert!(verify_stationarity(&one3, 1.0 / 3.0, 0.3, 1e-5));
        assert!(!verify_stationarity(&one3, 0.25, 0.3, 1e-5));
        let nae3 = RelationIndexSet::nae(3);
        assert!(verify_stationarity(&nae3, 0.5, 0.7, 1e-5));
    }

    #[test]
    fn stationarity_iff_g_prime_vanishes_on_a_grid() {
        // Gamma'(1-d) = r Gamma G'/G at the independence point (t is always
        // stationary there), and G'(1-d) = -d g'^2/k, so the finite
        // difference verdict must match the closed-form prediction wherever
        // that prediction is decisively above or below the tolerance. The
        // vanishing set is all stationary points of g: for I_13 that is
        // three maxima plus the minima between them.
        let rel = RelationIndexSet::new(13, [1, 8, 12]).unwrap();
        let r = 0.4;
        let tol = 1e-5;
        let mut decisive = 0;
        for i in 1..200 {
            let d = i as f64 / 200.0;
            let expected_prime = r
                * moments::big_gamma(&rel, d, r, 1.0 - d).unwrap()
                * gprime_closed_at_independence(&rel, d).unwrap()
                / moments::big_g(&rel, d, 1.0 - d).unwrap();
            let verdict = verify_stationarity(&rel, d, r, tol);
            if expected_prime.abs() < tol / 20.0 {
                assert!(verdict, "d={d} expected stationary, |Gamma'|~{expected_prime:.2e}");
                decisive += 1;
            } else if expected_prime.abs() > 20.0 * tol {
                assert!(!verdict, "d={d} expected non-stationary, |Gamma'|~{expected_prime:.2e}");
                decisive += 1;
            }
        }
        assert!(decisive > 150, "only {decisive} decisive grid points");
        // the direction the bounds rely on: every characteristic point is
        // a stationary point of Gamma
        let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
        for p in set.points() {
            assert!(verify_stationarity(&rel, p.delta, r, tol));
        }
    }

    #[test]
    fn best_delta_selects_gamma_maximizer() {
        let one5 = RelationIndexSet::one_in_k(5);
        assert_abs_diff_eq!(best_delta(&one5, 0.3).unwrap(), 0.2, epsilon = 1e-8);
        // I_13: gamma at r=0.64 is maximized at the middle point
        let rel = RelationIndexSet::new(13, [1, 8, 12]).unwrap();
        let set = find_characteristic_set(&rel, 4000, 1e-10).unwrap();
        let best = best_delta(&rel, 0.64).unwrap();
        assert_abs_diff_eq!(best, set.points()[1].delta, epsilon = 1e-8);
        let nae4 = RelationIndexSet::nae(4);
        let b = best_delta(&nae4, 0.5).unwrap();
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-8);
    }
}
