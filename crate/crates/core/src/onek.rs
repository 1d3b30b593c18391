//! Positive 1-in-k-SAT specializations.
//!
//! For `I = {1}` at the characteristic `delta = 1/k` everything has closed
//! forms: `G(mu) = k^(1-k) (k-1-mu)^(k-2) (k(1-mu+mu^2) - 1)`, and the
//! `log k / k` lower bound follows from showing `mu = 1-1/k` is the global
//! maximum of `Gamma` at that ratio. The verification procedures here
//! reproduce that argument numerically:
//!
//! * a direct grid certificate for the global maximum,
//! * the staged `tau` upper bounds covering `mu` in `[0, 1/2]`. The staging
//!   replaces the bracket factor `k(1-mu+mu^2)-1` of `G` by a constant per
//!   stage; since `1-mu+mu^2` decreases on `[0,1/2]`, the sound stage
//!   constant on `[a, 1/2]` is `l = 1-a+a^2`. The two fixed stages with
//!   `l = 1-a-a^2` are also evaluated and recorded: that constant under-
//!   estimates the bracket near `mu = a` and its second step only closes
//!   numerically for `k >= 12`, so the gating certificate is the adaptive
//!   staircase, which covers `[0, 1/2]` in a handful of stages for every
//!   `k >= 4`.
//! * the chord/tangent derivative-sign argument on `[1/2, 1]`,
//! * and the three-piece first-moment bound at `r = log^2 k / k` (the third
//!   piece holds only for `k >= 8`; at `k = 7` it is evaluated and recorded
//!   while the dense-grid check carries the claim).

use crate::moments;
use crate::numeric::bisect_predicate;
use crate::relation::RelationIndexSet;
use crate::report::{CheckReport, Stage};
use std::time::Instant;

/// Closed form `G_{1_k,1/k}(mu) = k^(1-k) (k-1-mu)^(k-2) (k(1-mu+mu^2)-1)`.
pub fn big_g_onek(k: usize, mu: f64) -> f64 {
    let kf = k as f64;
    kf.powi(1 - k as i32)
        * (kf - 1.0 - mu).powi(k as i32 - 2)
        * (kf * (1.0 - mu + mu * mu) - 1.0)
}

/// `gamma_{1_k, r}(1/k)` via the generic moment functions.
pub fn gamma_onek_at_char(k: usize, r: f64) -> f64 {
    let rel = RelationIndexSet::one_in_k(k);
    moments::gamma(&rel, r, 1.0 / k as f64).expect("1/k is in (0,1)")
}

/// `ln Gamma_{1_k,1/k,r}(mu)` from the closed form.
pub fn ln_big_gamma_onek(k: usize, r: f64, mu: f64) -> f64 {
    let g = big_g_onek(k, mu);
    let lng = if g > 0.0 { g.ln() } else { f64::NEG_INFINITY };
    r * lng - moments::ln_t_delta(1.0 / k as f64, mu).expect("mu in [0,1]")
}

/// Outcome of the Lemma-level global-maximum certificate at `r = log k / k`.
#[derive(Debug, Clone, Copy)]
pub struct GlobalMaxCheck {
    pub k: usize,
    pub grid_argmax: f64,
    pub independence: f64,
    /// `|Gamma(1-1/k) - gamma(1/k)^2|`
    pub identity_gap: f64,
    pub ok: bool,
}

/// Certifies that at `r = log k / k` the grid maximum of `Gamma_{1_k,1/k,r}`
/// over `[0, 1]` sits at `mu = 1 - 1/k` (within the 1e-4 grid).
pub fn verify_onek_global_max(k: usize) -> GlobalMaxCheck {
    assert!(k >= 3, "verify_onek_global_max needs k >= 3");
    let r = (k as f64).ln() / k as f64;
    let independence = 1.0 - 1.0 / k as f64;
    let steps = 10_000usize;
    let mut best = (0.0f64, f64::NEG_INFINITY);
    for i in 0..=steps {
        let mu = i as f64 / steps as f64;
        let v = ln_big_gamma_onek(k, r, mu);
        if v > best.1 {
            best = (mu, v);
        }
    }
    // exact independence point participates too
    let v_ind = ln_big_gamma_onek(k, r, independence);
    if v_ind >= best.1 {
        best = (independence, v_ind);
    }
    let gamma2 = gamma_onek_at_char(k, r).powi(2);
    let identity_gap = (v_ind.exp() - gamma2).abs();
    GlobalMaxCheck {
        k,
        grid_argmax: best.0,
        independence,
        identity_gap,
        ok: (best.0 - independence).abs() <= 1e-4 + 1e-12 && identity_gap < 1e-10,
    }
}

/// `tau_l(mu) = log k log(k^(1-k) (k-1-mu)^(k-2) (k l - 1)) - k log t_{1/k}(mu)`
/// with an explicit stage constant `l` standing in for `1 - mu + mu^2`.
pub fn tau(k: usize, l: f64, mu: f64) -> f64 {
    let kf = k as f64;
    let bound = kf.powi(1 - k as i32) * (kf - 1.0 - mu).powi(k as i32 - 2) * (kf * l - 1.0);
    kf.ln() * bound.ln() - kf * moments::ln_t_delta(1.0 / kf, mu).expect("mu in [0,1]")
}

/// Analytic `tau'(mu)`; independent of the stage constant.
pub fn tau_prime(k: usize, mu: f64) -> f64 {
    let kf = k as f64;
    -(kf - 2.0) * kf.ln() / (kf - 1.0 - mu)
        + ((1.0 - mu) * (kf - 1.0 - mu) / (mu * mu)).ln()
}

/// The stage constant that soundly upper-bounds `1 - mu + mu^2` on
/// `[a, 1/2]` (the factor is decreasing there, so its value at `a`).
fn stage_constant_sound(a: f64) -> f64 {
    1.0 - a + a * a
}

/// The stage constant as printed in the two-step instantiation
/// (`1 - a - a^2`).
fn stage_constant_fixed(a: f64) -> f64 {
    1.0 - a - a * a
}

/// Staged verification of the `[0, 1/2]` half of the global-maximum proof
/// plus the derivative-sign argument on `[1/2, 1]`.
pub fn verify_appendix_c(k: usize) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(format!("appendix-c k={k}"));
    if k < 3 {
        report.push(Stage::failed("arity", format!("k={k} below 3")));
        report.elapsed = start.elapsed();
        return report;
    }

    let r = (k as f64).ln() / k as f64;
    let target = 2.0 * k as f64 * gamma_onek_at_char(k, r).ln();

    if k == 3 {
        report.push(Stage::recorded(
            "tau-stages",
            "not applicable: the tau inequalities are stated for k > 3",
        ));
    } else {
        // stage: tau' positive at 1/2 (closed form) and decreasing, hence
        // tau strictly increasing on [0, 1/2]
        let kf = k as f64;
        let tp_half = (2.0 * kf - 3.0).ln() - 2.0 * (kf - 2.0) * kf.ln() / (2.0 * kf - 3.0);
        let mut decreasing = true;
        let mut positive = true;
        let mut prev = f64::INFINITY;
        for i in 1..=500 {
            let mu = 0.5 * i as f64 / 500.0;
            let tp = tau_prime(k, mu);
            if tp > prev + 1e-9 {
                decreasing = false;
            }
            if tp <= 0.0 {
                positive = false;
            }
            prev = tp;
        }
        report.push(Stage::gate(
            "tau-increasing",
            tp_half > 0.0 && decreasing && positive,
            format!("tau'(1/2)={tp_half:.6}, tau' decreasing and positive on (0,1/2]"),
        ));

        // stage: first step tau_0(0.15) < 2k log gamma
        let step1 = tau(k, stage_constant_fixed(0.0), 0.15) - target;
        report.push(Stage::gate("step-1", step1 < 0.0, format!("tau_0(0.15) - 2k log gamma = {step1:.6}")));

        // the printed second step, evaluated as-is and recorded
        let step2 = tau(k, stage_constant_fixed(0.15), 0.5) - target;
        report.push(Stage::recorded(
            "step-2-fixed",
            format!(
                "tau_0.15(0.5) - 2k log gamma = {step2:.6} with l=1-a-a^2 ({})",
                if step2 < 0.0 { "closes" } else { "does not close; staircase below covers the interval" }
            ),
        ));

        // gating certificate: adaptive staircase with the sound constant
        let mut a = 0.15f64;
        let mut stages = vec![0.15];
        let mut ok = true;
        for _ in 0..64 {
            if a >= 0.5 {
                break;
            }
            let l = stage_constant_sound(a);
            if tau(k, l, 0.5) < target {
                a = 0.5;
                stages.push(a);
                break;
            }
            // tau is increasing: push the stage end as far as the bound allows
            let next = bisect_predicate(|mu| tau(k, l, mu) < target, a, 0.5, 1e-9);
            // retreat slightly so the certified value stays strictly below
            let step_end = a + 0.98 * (next - a);
            if step_end <= a + 1e-9 {
                ok = false;
                break;
            }
            a = step_end;
            stages.push(a);
        }
        ok = ok && a >= 0.5;
        report.push(Stage::gate(
            "staircase",
            ok,
            format!("covered [0, 1/2] with stage ends {stages:.4?}"),
        ));
    }

    // stage: derivative of k log Gamma positive on [1/2, 1-1/k), negative on
    // (1-1/k, 1], from the closed-form G
    let kf = k as f64;
    let ind = 1.0 - 1.0 / kf;
    let dlog_gamma = |mu: f64| {
        let g_ratio = -(kf - 2.0) / (kf - 1.0 - mu)
            + kf * (2.0 * mu - 1.0) / (kf * (1.0 - mu + mu * mu) - 1.0);
        r * g_ratio - moments::ln_t_prime(1.0 / kf, mu)
    };
    let mut rising = true;
    let mut mu = 0.5;
    while mu < ind - 1e-3 {
        if dlog_gamma(mu) <= 0.0 {
            rising = false;
            break;
        }
        mu += 1e-3;
    }
    let mut falling = true;
    let mut mu = ind + 1e-3;
    while mu <= 1.0 - 1e-3 {
        if dlog_gamma(mu) >= 0.0 {
            falling = false;
            break;
        }
        mu += 1e-3;
    }
    report.push(Stage::gate(
        "chord-tangent",
        rising && falling,
        format!("d/dmu log Gamma > 0 on [1/2, {ind:.4}) and < 0 on ({ind:.4}, 1]"),
    ));

    report.elapsed = start.elapsed();
    report
}

/// The three-piece first-moment argument for
/// `max_delta gamma_{1_k, log^2 k / k}(delta) < 1`, plus a dense-grid
/// confirmation of the statement itself.
pub fn verify_upper_bound_fact(k: usize) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(format!("upper-bound-fact k={k}"));
    let kf = k as f64;
    let r = kf.ln().powi(2) / kf;
    let rel = RelationIndexSet::one_in_k(k);
    let in_regime = k >= 7;

    // piece 1: gamma(1/2) = 2 (k/2^k)^r < 1 covers [1/2, 1]
    let p1 = 2.0 * (kf / 2f64.powi(k as i32)).powf(r);
    report.push(stage_in(
        in_regime,
        "piece-1-right-half",
        p1 < 1.0,
        format!("2 (k/2^k)^r = {p1:.6}"),
    ));

    // piece 2: with the entropy tangent at 1/k and g <= g(1/k), the bound
    // k (k-1)^(delta-1) g(1/k)^r stays at or below 1 up to its exact root s
    let s = -(1.0 - 1.0 / kf).ln() * ((kf - 1.0) * kf.ln().powi(2) - kf) / (kf * (kf - 1.0).ln());
    let g_char = moments::g(&rel, 1.0 / kf).expect("1/k in [0,1]");
    let bound2 = |d: f64| kf * (kf - 1.0).powf(d - 1.0) * g_char.powf(r);
    let mut worst2 = f64::NEG_INFINITY;
    for i in 0..=1000 {
        let d = 1.0 / kf + (s - 1.0 / kf) * i as f64 / 1000.0;
        worst2 = worst2.max(bound2(d));
    }
    report.push(stage_in(
        in_regime,
        "piece-2-left-of-s",
        worst2 <= 1.0 + 1e-12,
        format!("max bound on [1/k, s={s:.5}] = {worst2:.9} (equality at s is by construction)"),
    ));

    // piece 3: add the tangent of ln g at s; linear exponent checked on
    // [s, 1/2]. The argument needs k >= 8 (at k = 7 the bound crests above 1
    // near delta = 1/2 even though the fact itself holds).
    let ln_g_s = moments::g(&rel, s).expect("s in (0,1)").ln();
    let slope = 1.0 / s - (kf - 1.0) / (1.0 - s);
    let exponent =
        |d: f64| kf.ln() + (d - 1.0) * (kf - 1.0).ln() + r * (ln_g_s + slope * (d - s));
    let mut worst3 = f64::NEG_INFINITY;
    for i in 0..=1000 {
        let d = s + (0.5 - s) * i as f64 / 1000.0;
        worst3 = worst3.max(exponent(d));
    }
    let detail3 = format!("max log-bound on [s, 1/2] = {worst3:.6}");
    if k >= 8 {
        report.push(Stage::gate("piece-3-tangent", worst3 < 0.0, detail3));
    } else {
        report.push(Stage::recorded(
            "piece-3-tangent",
            format!("{detail3} (argument applies for k > 7 only)"),
        ));
    }

    // dense-grid confirmation of the fact itself
    let steps = 100_000usize;
    let mut max_gamma = f64::NEG_INFINITY;
    for i in 1..steps {
        let d = i as f64 / steps as f64;
        max_gamma = max_gamma.max(moments::gamma(&rel, r, d).expect("d in (0,1)"));
    }
    report.push(stage_in(
        in_regime,
        "dense-grid",
        max_gamma < 1.0,
        format!("max_delta gamma = {max_gamma:.6} on a 1e-5 grid"),
    ));

    report.elapsed = start.elapsed();
    report
}

/// Gate inside the claimed regime, record outside it.
fn stage_in(in_regime: bool, label: &str, ok: bool, detail: String) -> Stage {
    if in_regime {
        Stage::gate(label, ok, detail)
    } else {
        Stage::recorded(label, format!("{detail} (outside the k >= 7 regime: {ok})"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_matches_generic_big_g() {
        for k in 3..=12 {
            let rel = RelationIndexSet::one_in_k(k);
            let d = 1.0 / k as f64;
            for i in 0..=50 {
                let mu = i as f64 / 50.0;
                assert_abs_diff_eq!(
                    big_g_onek(k, mu),
                    moments::big_g(&rel, d, mu).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn global_max_certificate_for_small_k() {
        for k in 3..=12 {
            let check = verify_onek_global_max(k);
            assert!(check.ok, "k={k}: argmax {} vs {}", check.grid_argmax, check.independence);
        }
    }

    #[test]
    fn exploratory_double_ratio_recorded_not_asserted() {
        // beyond the proven regime: at r = 2 log 3 / 3 the argmax may move;
        // run the scan and only require it to terminate with a finite answer
        let r = 2.0 * 3f64.ln() / 3.0;
        let mut best = (0.0f64, f64::NEG_INFINITY);
        for i in 0..=10_000 {
            let mu = i as f64 / 10_000.0;
            let v = ln_big_gamma_onek(3, r, mu);
            if v > best.1 {
                best = (mu, v);
            }
        }
        assert!(best.1.is_finite());
    }

    #[test]
    fn tau_prime_closed_form_at_half() {
        for k in 4..=12 {
            let kf = k as f64;
            let closed = (2.0 * kf - 3.0).ln() - 2.0 * (kf - 2.0) * kf.ln() / (2.0 * kf - 3.0);
            assert_abs_diff_eq!(tau_prime(k, 0.5), closed, epsilon = 1e-12);
            assert!(closed > 0.0, "k={k}");
        }
    }

    #[test]
    fn appendix_c_passes_for_k_4_to_12() {
        for k in 4..=12 {
            let report = verify_appendix_c(k);
            assert!(report.passed(), "k={k}:\n{report}");
        }
    }

    #[test]
    fn appendix_c_fixed_second_step_closes_only_for_large_k() {
        // the printed two-step constant under-estimates the bracket; its
        // second step closes numerically from k = 12 on
        let r12 = verify_appendix_c(12);
        let s12 = r12.stages.iter().find(|s| s.label == "step-2-fixed").unwrap();
        assert!(s12.detail.contains("closes"), "{}", s12.detail);
        let r5 = verify_appendix_c(5);
        let s5 = r5.stages.iter().find(|s| s.label == "step-2-fixed").unwrap();
        assert!(s5.detail.contains("does not close"), "{}", s5.detail);
        assert!(r5.passed(), "recorded stage must not gate");
    }

    #[test]
    fn appendix_c_k3_marks_tau_stages_not_applicable() {
        let report = verify_appendix_c(3);
        assert!(report.passed());
        let tau_stage = report.stages.iter().find(|s| s.label == "tau-stages").unwrap();
        assert!(tau_stage.detail.contains("not applicable"));
        // the derivative-sign stage still runs for k = 3
        assert!(report.stages.iter().any(|s| s.label == "chord-tangent"));
    }

    #[test]
    fn upper_bound_fact_passes_for_k_7_to_15() {
        for k in 7..=15 {
            let report = verify_upper_bound_fact(k);
            assert!(report.passed(), "k={k}:\n{report}");
        }
    }

    #[test]
    fn upper_bound_fact_k6_recorded_only() {
        // the fact is silent below 7; at k=6 the dense grid actually crests
        // above 1 and the report must record rather than fail
        let report = verify_upper_bound_fact(6);
        assert!(report.passed());
        let dense = report.stages.iter().find(|s| s.label == "dense-grid").unwrap();
        assert!(dense.detail.contains("outside the k >= 7 regime"));
    }

    #[test]
    fn upper_bound_fact_k7_piece3_recorded() {
        let report = verify_upper_bound_fact(7);
        let p3 = report.stages.iter().find(|s| s.label == "piece-3-tangent").unwrap();
        assert!(p3.detail.contains("k > 7"), "{}", p3.detail);
        assert!(report.passed());
    }

    #[test]
    fn independence_identity_from_closed_form() {
        for k in 3..=12 {
            let r = (k as f64).ln() / k as f64;
            let lhs = ln_big_gamma_onek(k, r, 1.0 - 1.0 / k as f64).exp();
            let rhs = gamma_onek_at_char(k, r).powi(2);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }
}
