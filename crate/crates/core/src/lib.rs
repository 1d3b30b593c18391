//! Threshold bounds for random permutation-invariant boolean CSPs.
//!
//! A relation of arity `k` that is invariant under coordinate permutations is
//! determined by the set `I ⊆ {1..k-1}` of ones-counts it accepts; `CSP(I_k)`
//! instances draw `m` constraints uniformly over `n` variables. This crate
//! implements, for any such relation:
//!
//! * the satisfaction-probability curves `g`, `γ` and their overlap
//!   counterparts `G`, `t`, `Γ` in both `f64` and exact-rational arithmetic
//!   ([`moments`], [`exact`]),
//! * characteristic-point analysis (local maximizers of `g`) and the
//!   independence-point identities ([`characteristic`]),
//! * lower/upper bounds on the satisfiability threshold ratio via the
//!   first/second moment methods ([`bounds`], [`onek`], [`laplace`]),
//! * exact enumeration oracles for tiny instances ([`oracle`]),
//! * a complete backtracking solver plus seeded Monte Carlo ratio sweeps
//!   ([`solver`], [`sweep`]),
//! * and a named verification suite tying everything together ([`verify`]).

pub mod bounds;
pub mod characteristic;
pub mod combinatorics;
pub mod exact;
pub mod format;
pub mod laplace;
pub mod moments;
pub mod numeric;
pub mod onek;
pub mod oracle;
pub mod poly;
pub mod relation;
pub mod report;
pub mod rng;
pub mod solver;
pub mod sweep;
pub mod tolerances;
pub mod verify;

pub use bounds::BoundsReport;
pub use characteristic::CharacteristicSet;
pub use relation::{Constraint, Instance, RelationIndexSet, Valuation};
pub use report::{CheckReport, Stage, StageStatus};
pub use solver::{SolveResult, SolveStatus};
pub use sweep::SweepResult;
