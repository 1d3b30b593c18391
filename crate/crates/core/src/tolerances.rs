//! Numerical tolerances and grid resolutions used across the crate.
//!
//! Every scan step, finite-difference step and acceptance threshold is pinned
//! here so the verification suite and the library agree on one set of values.

/// Central finite-difference step for first derivatives.
pub const FD_STEP_FIRST: f64 = 1e-6;

/// Central finite-difference step for second derivatives.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// Default grid step for scans over the overlap parameter `mu`.
pub const MU_GRID_STEP: f64 = 1e-4;

/// Grid step for concavity certificates and derivative sign checks.
pub const CERT_GRID_STEP: f64 = 1e-3;

/// Default grid step for scans over `delta`.
pub const DELTA_GRID_STEP: f64 = 1e-4;

/// Bisection tolerance on the ratio `r` for the refined lower bound.
pub const R_BISECT_TOL: f64 = 1e-6;

/// Golden-section tolerance for the interior minimum defining `rho`.
pub const RHO_REFINE_TOL: f64 = 1e-10;

/// Guard distance from interval endpoints where scans would hit a
/// singularity of the scanned formula.
pub const ENDPOINT_GUARD: f64 = 1e-9;

/// Stationarity tolerance on `delta` for characteristic points.
pub const CHAR_DELTA_TOL: f64 = 1e-8;

/// Tolerance on derivative magnitude for stationarity checks.
pub const CHAR_DERIV_TOL: f64 = 1e-6;

/// Absolute tolerance for the independence-point identity `G = g^2`.
pub const IDENTITY_G_TOL: f64 = 1e-12;

/// Absolute tolerance for the independence-point identity `Gamma = gamma^2`.
pub const IDENTITY_GAMMA_TOL: f64 = 1e-10;

/// Relative tolerance for the closed-form `G'(1-delta)` against finite
/// differences.
pub const GIKETG_REL_TOL: f64 = 1e-6;

/// Enumeration oracles refuse probability spaces larger than this.
pub const ENUMERATION_CAP: u128 = 100_000_000;

/// Below this value of `G` a scan records a numeric-instability warning.
pub const G_UNDERFLOW_FLOOR: f64 = 1e-300;
