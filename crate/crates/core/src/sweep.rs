//! Monte Carlo satisfiability sweeps over a ratio grid.
//!
//! For each grid ratio `r` the sweep solves `trials` fresh random instances
//! with `m = round(r n)` constraints. Per-trial seeds are derived up front
//! from `(master_seed, point index, trial index)`, and results aggregate in
//! trial order, so the output is byte-identical no matter how many rayon
//! workers run the trials. Budget-exhausted solves count as `unresolved`,
//! reported separately and excluded from the satisfiable fraction.

use crate::relation::{Instance, RelationIndexSet};
use crate::rng::derive_seed;
use crate::solver::{solve_with, SolveError, SolveStatus, SolverConfig};
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("sweep does not bracket the 0.5 satisfiable fraction")]
    NoCrossing,
}

/// 95% z-score for the Wilson interval.
const WILSON_Z: f64 = 1.959963984540054;

/// Wilson score interval for `successes / trials` at 95% confidence.
/// Well-behaved at fractions 0 and 1; `(0, 1)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub r: f64,
    pub m: usize,
    pub trials: u64,
    pub sat: u64,
    pub unresolved: u64,
    /// satisfiable fraction among resolved trials
    pub frac: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub relation: RelationIndexSet,
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub trials: u64,
    pub node_budget: u64,
}

impl SweepConfig {
    pub fn ratios(&self) -> Vec<f64> {
        let count = ((self.r_max - self.r_min) / self.r_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.r_min + i as f64 * self.r_step).collect()
    }
}

/// Runs the sweep. Deterministic for a fixed `master_seed` and grid,
/// independent of worker count.
pub fn sweep(
    rel: &RelationIndexSet,
    n: usize,
    config: &SweepConfig,
    master_seed: u64,
) -> Result<SweepResult, SweepError> {
    if n < 10 {
        return Err(SweepError::InvalidGrid(format!("n={n} below the sweep minimum of 10")));
    }
    if config.trials < 1 {
        return Err(SweepError::InvalidGrid("trials must be at least 1".into()));
    }
    if !(config.r_min < config.r_max) {
        return Err(SweepError::InvalidGrid(format!(
            "need r_min < r_max, got [{}, {}]",
            config.r_min, config.r_max
        )));
    }
    if !(config.r_step > 0.0) {
        return Err(SweepError::InvalidGrid(format!("r_step {} not positive", config.r_step)));
    }

    let solver_config = SolverConfig { node_budget: config.node_budget };
    let points = config
        .ratios()
        .iter()
        .enumerate()
        .map(|(pi, &r)| {
            let m = (r * n as f64).round() as usize;
            let outcomes: Vec<Option<SolveStatus>> = (0..config.trials)
                .into_par_iter()
                .map(|ti| {
                    let seed = derive_seed(master_seed, ((pi as u64) << 32) | ti);
                    let inst = Instance::generate(n, m, rel.clone(), seed);
                    match solve_with(&inst, &solver_config) {
                        Ok(res) => Some(res.status),
                        Err(SolveError::BudgetExceeded { .. }) => None,
                        Err(e) => unreachable!("solver returned {e} on a generated instance"),
                    }
                })
                .collect();
            let sat = outcomes.iter().filter(|o| **o == Some(SolveStatus::Sat)).count() as u64;
            let unresolved = outcomes.iter().filter(|o| o.is_none()).count() as u64;
            let resolved = config.trials - unresolved;
            let frac = if resolved == 0 { 0.0 } else { sat as f64 / resolved as f64 };
            let (ci_lo, ci_hi) = wilson_interval(sat, resolved);
            SweepPoint { r, m, trials: config.trials, sat, unresolved, frac, ci_lo, ci_hi }
        })
        .collect();

    Ok(SweepResult {
        relation: rel.clone(),
        n,
        trials: config.trials,
        master_seed,
        points,
    })
}

impl SweepResult {
    /// Overall fraction of trials that exhausted the node budget.
    pub fn unresolved_rate(&self) -> f64 {
        let total: u64 = self.points.iter().map(|p| p.trials).sum();
        let unresolved: u64 = self.points.iter().map(|p| p.unresolved).sum();
        if total == 0 {
            0.0
        } else {
            unresolved as f64 / total as f64
        }
    }

    /// CSV rendering: metadata comment, header, one row per grid point with
    /// reals at 6 decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# seed={} rel={} n={}",
            self.master_seed,
            self.relation.label(),
            self.n
        );
        let _ = writeln!(out, "r,m,trials,sat,unresolved,frac,ci_lo,ci_hi");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.6},{},{},{},{},{:.6},{:.6},{:.6}",
                p.r, p.m, p.trials, p.sat, p.unresolved, p.frac, p.ci_lo, p.ci_hi
            );
        }
        out
    }
}

/// Interpolated ratio where the satisfiable fraction crosses 0.5, with a
/// confidence band from the Wilson interval curves.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub r: f64,
    pub band: (f64, f64),
}

fn interpolate_crossing(points: &[(f64, f64)]) -> Option<f64> {
    for w in points.windows(2) {
        let (r0, f0) = w[0];
        let (r1, f1) = w[1];
        if f0 >= 0.5 && f1 < 0.5 {
            return Some(r0 + (0.5 - f0) * (r1 - r0) / (f1 - f0));
        }
    }
    None
}

/// Linear interpolation of the 0.5 crossing of the sat-fraction curve.
/// Errors when the sweep does not bracket 0.5.
pub fn empirical_threshold(sr: &SweepResult) -> Result<Crossing, SweepError> {
    let frac: Vec<(f64, f64)> = sr.points.iter().map(|p| (p.r, p.frac)).collect();
    let r = interpolate_crossing(&frac).ok_or(SweepError::NoCrossing)?;
    let lo_curve: Vec<(f64, f64)> = sr.points.iter().map(|p| (p.r, p.ci_lo)).collect();
    let hi_curve: Vec<(f64, f64)> = sr.points.iter().map(|p| (p.r, p.ci_hi)).collect();
    // the optimistic curve crosses earlier, the pessimistic one later
    let band_lo = interpolate_crossing(&lo_curve).unwrap_or(sr.points.first().map(|p| p.r).unwrap_or(r));
    let band_hi = interpolate_crossing(&hi_curve).unwrap_or(sr.points.last().map(|p| p.r).unwrap_or(r));
    Ok(Crossing { r, band: (band_lo.min(r), band_hi.max(r)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fake_result(fracs: &[(f64, f64)]) -> SweepResult {
        SweepResult {
            relation: RelationIndexSet::one_in_k(3),
            n: 100,
            trials: 100,
            master_seed: 0,
            points: fracs
                .iter()
                .map(|&(r, f)| {
                    let sat = (f * 100.0).round() as u64;
                    let (ci_lo, ci_hi) = wilson_interval(sat, 100);
                    SweepPoint {
                        r,
                        m: (r * 100.0).round() as usize,
                        trials: 100,
                        sat,
                        unresolved: 0,
                        frac: f,
                        ci_lo,
                        ci_hi,
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(lo > 0.40 && hi < 0.60);
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.95);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn crossing_interpolation_example() {
        let sr = fake_result(&[(0.3, 1.0), (0.5, 0.8), (0.7, 0.4), (0.9, 0.0)]);
        let c = empirical_threshold(&sr).unwrap();
        assert_abs_diff_eq!(c.r, 0.65, epsilon = 1e-12);
        assert!(c.band.0 <= c.r && c.r <= c.band.1);
    }

    #[test]
    fn no_crossing_is_an_error() {
        let sr = fake_result(&[(0.1, 1.0), (0.2, 1.0)]);
        assert_eq!(empirical_threshold(&sr).unwrap_err(), SweepError::NoCrossing);
    }

    #[test]
    fn grid_validation() {
        let rel = RelationIndexSet::one_in_k(3);
        let bad = SweepConfig { r_min: 0.5, r_max: 0.2, r_step: 0.1, trials: 5, node_budget: 1000 };
        assert!(matches!(sweep(&rel, 50, &bad, 1), Err(SweepError::InvalidGrid(_))));
        let bad = SweepConfig { r_min: 0.1, r_max: 0.2, r_step: 0.1, trials: 0, node_budget: 1000 };
        assert!(matches!(sweep(&rel, 50, &bad, 1), Err(SweepError::InvalidGrid(_))));
        let bad = SweepConfig { r_min: 0.1, r_max: 0.9, r_step: 0.1, trials: 5, node_budget: 1000 };
        assert!(matches!(sweep(&rel, 5, &bad, 1), Err(SweepError::InvalidGrid(_))));
    }

    #[test]
    fn ratio_grid_is_inclusive() {
        let cfg = SweepConfig { r_min: 0.2, r_max: 1.0, r_step: 0.05, trials: 1, node_budget: 1 };
        let ratios = cfg.ratios();
        assert_eq!(ratios.len(), 17);
        assert_abs_diff_eq!(ratios[0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(*ratios.last().unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn sweep_is_deterministic_and_monotone_ish() {
        let rel = RelationIndexSet::one_in_k(3);
        let cfg = SweepConfig {
            r_min: 0.3,
            r_max: 0.9,
            r_step: 0.3,
            trials: 40,
            node_budget: 10_000_000,
        };
        let a = sweep(&rel, 60, &cfg, 7).unwrap();
        let b = sweep(&rel, 60, &cfg, 7).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        // monotone non-increasing up to CI overlap
        for w in a.points.windows(2) {
            assert!(
                w[1].ci_lo <= w[0].ci_hi + 1e-12,
                "fraction rose beyond CI overlap: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
        assert_eq!(a.unresolved_rate(), 0.0);
    }

    #[test]
    fn csv_shape() {
        let rel = RelationIndexSet::one_in_k(3);
        let cfg =
            SweepConfig { r_min: 0.2, r_max: 0.4, r_step: 0.2, trials: 3, node_budget: 100_000 };
        let sr = sweep(&rel, 30, &cfg, 5).unwrap();
        let csv = sr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# seed=5 rel=k:3;I:1 n=30");
        assert_eq!(lines.next().unwrap(), "r,m,trials,sat,unresolved,frac,ci_lo,ci_hi");
        assert_eq!(lines.count(), 2);
    }
}
