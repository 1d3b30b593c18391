//! Finite differences, golden-section search and bisection.

use crate::tolerances::{FD_STEP_FIRST, FD_STEP_SECOND};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericError {
    #[error("stencil [{lo}, {hi}] exits the domain [{dom_lo}, {dom_hi}]")]
    StencilOutsideDomain { lo: f64, hi: f64, dom_lo: f64, dom_hi: f64 },
    #[error("invalid derivative order {0}, expected 1 or 2")]
    BadOrder(u8),
}

/// Central finite difference of order 1 or 2 with the crate's fixed steps
/// (1e-6 for first derivatives, 1e-4 for second).
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, order: u8) -> f64 {
    match order {
        1 => {
            let h = FD_STEP_FIRST;
            (f(x + h) - f(x - h)) / (2.0 * h)
        }
        2 => {
            let h = FD_STEP_SECOND;
            (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
        }
        _ => panic!("derivative order must be 1 or 2"),
    }
}

/// Like [`derivative`] but refuses stencils that leave `[dom_lo, dom_hi]`.
pub fn derivative_checked(
    f: impl Fn(f64) -> f64,
    x: f64,
    order: u8,
    dom_lo: f64,
    dom_hi: f64,
) -> Result<f64, NumericError> {
    let h = match order {
        1 => FD_STEP_FIRST,
        2 => FD_STEP_SECOND,
        o => return Err(NumericError::BadOrder(o)),
    };
    if x - h < dom_lo || x + h > dom_hi {
        return Err(NumericError::StencilOutsideDomain {
            lo: x - h,
            hi: x + h,
            dom_lo,
            dom_hi,
        });
    }
    Ok(derivative(f, x, order))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization on `[lo, hi]` down to interval width `tol`.
/// Returns `(argmin, min)`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Golden-section maximization. Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_min(|x| -f(x), lo, hi, tol);
    (x, -neg)
}

/// Bisection root refinement on a bracket with `f(lo)` and `f(hi)` of
/// opposite sign, to interval width `tol`. Returns the midpoint.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo == 0.0 || flo.signum() != f(hi).signum(), "bracket does not straddle a root");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest `r` in `[lo, hi]` satisfying a monotone predicate (true on a
/// prefix), to tolerance `tol`. Returns `lo` when the predicate fails
/// immediately above `lo`.
pub fn bisect_predicate(pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if pred(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Scans `steps + 1` equispaced points of `[lo, hi]` and returns
/// `(index, x, f(x))` of the minimum.
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> (usize, f64, f64) {
    let mut best = (0usize, lo, f(lo));
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(x);
        if v < best.2 {
            best = (i, x, v);
        }
    }
    best
}

/// Scans `steps + 1` equispaced points of `[lo, hi]` and returns
/// `(index, x, f(x))` of the maximum.
pub fn grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> (usize, f64, f64) {
    let (i, x, v) = grid_min(|x| -f(x), lo, hi, steps);
    (i, x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn derivative_of_square() {
        assert_abs_diff_eq!(derivative(|x| x * x, 3.0, 1), 6.0, epsilon = 1e-7);
        assert_abs_diff_eq!(derivative(|x| x * x * x, 2.0, 2), 12.0, epsilon = 1e-4);
    }

    #[test]
    fn derivative_checked_clips() {
        let err = derivative_checked(|x| x.sqrt(), 0.0, 1, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, NumericError::StencilOutsideDomain { .. }));
        assert!(derivative_checked(|x| x.sqrt(), 0.5, 1, 0.0, 1.0).is_ok());
    }

    #[test]
    fn golden_finds_parabola_minimum()
    {
        let (x, v) = golden_min(|x| (x - 1.3) * (x - 1.3) + 2.0, -4.0, 5.0, 1e-10);
        assert_abs_diff_eq!(x, 1.3, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bisect_root_cosine() {
        let root = bisect_root(|x| x.cos(), 1.0, 2.0, 1e-12);
        assert_abs_diff_eq!(root, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
    }

    #[test]
    fn bisect_predicate_finds_boundary() {
        let r = bisect_predicate(|x| x <= 0.7312, 0.0, 1.0, 1e-9);
        assert_abs_diff_eq!(r, 0.7312, epsilon = 1e-8);
        // immediate failure degenerates to lo
        assert_eq!(bisect_predicate(|x| x <= 0.0, 0.0, 1.0, 1e-9), 0.0);
        // predicate true at hi short-circuits
        assert_eq!(bisect_predicate(|_| true, 0.0, 1.0, 1e-9), 1.0);
    }

    #[test]
    fn grid_scan_hits_interior_extremum() {
        let (_, x, v) = grid_min(|x| (x - 0.25) * (x - 0.25), 0.0, 1.0, 1000);
        assert_abs_diff_eq!(x, 0.25, epsilon = 1e-3);
        assert!(v < 1e-6);
        let (_, x, _) = grid_max(|x| -(x - 0.75) * (x - 0.75), 0.0, 1.0, 1000);
        assert_abs_diff_eq!(x, 0.75, epsilon = 1e-3);
    }
}
