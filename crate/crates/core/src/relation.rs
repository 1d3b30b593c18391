//! Permutation-invariant relations, valuations, constraints and random
//! instances.
//!
//! A relation of arity `k` that is closed under coordinate permutations is
//! fully described by the set of ones-counts it accepts. Constraint
//! coordinates are drawn i.i.d. uniform over all `n` variables, so a variable
//! may repeat inside one constraint; `ones_count` counts repeats with
//! multiplicity. This is the unique finite-`n` model under which the
//! per-tuple satisfaction probability is exactly a binomial sum in `p/n`,
//! which is what lets the enumeration oracles check the analytic formulas
//! bit-for-bit.

use crate::rng::SplitMix64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("arity must be at least 3, got k={0}")]
    ArityTooSmall(usize),
    #[error("allowed ones-count set must be nonempty")]
    EmptyAllowed,
    #[error("allowed ones-count {value} outside {{1..{}}} for k={k}", k - 1)]
    CountOutOfRange { value: usize, k: usize },
    #[error("duplicate allowed ones-count {0}")]
    DuplicateCount(usize),
    #[error("variable index {index} out of range for n={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("valuation has {got} variables, instance has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("constraint has {got} variables, relation arity is {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

/// The pair `(k, I)` defining a nontrivial permutation-invariant relation:
/// a constraint over `k` variables is satisfied iff its ones-count lies in
/// `I ⊆ {1..k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationIndexSet {
    k: usize,
    allowed: Vec<usize>,
}

impl RelationIndexSet {
    /// Builds a relation, validating nontriviality (`0` and `k` excluded),
    /// range and distinctness. The allowed set is stored sorted ascending.
    pub fn new(k: usize, allowed: impl IntoIterator<Item = usize>) -> Result<Self, RelationError> {
        if k < 3 {
            return Err(RelationError::ArityTooSmall(k));
        }
        let mut allowed: Vec<usize> = allowed.into_iter().collect();
        allowed.sort_unstable();
        if allowed.is_empty() {
            return Err(RelationError::EmptyAllowed);
        }
        for w in allowed.windows(2) {
            if w[0] == w[1] {
                return Err(RelationError::DuplicateCount(w[0]));
            }
        }
        for &v in &allowed {
            if v == 0 || v >= k {
                return Err(RelationError::CountOutOfRange { value: v, k });
            }
        }
        Ok(Self { k, allowed })
    }

    /// Positive 1-in-k-SAT: exactly one variable per constraint is 1.
    pub fn one_in_k(k: usize) -> Self {
        Self::new(k, [1]).expect("1-in-k is valid for k >= 3")
    }

    /// Positive NAE-k-SAT: a constraint may be neither all-0 nor all-1.
    pub fn nae(k: usize) -> Self {
        Self::new(k, 1..k).expect("NAE-k is valid for k >= 3")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn allowed(&self) -> &[usize] {
        &self.allowed
    }

    pub fn permits(&self, ones: usize) -> bool {
        self.allowed.binary_search(&ones).is_ok()
    }

    /// Compact label used in CSV metadata comments, e.g. `k:13;I:1,8,12`.
    pub fn label(&self) -> String {
        let counts: Vec<String> = self.allowed.iter().map(|c| c.to_string()).collect();
        format!("k:{};I:{}", self.k, counts.join(","))
    }
}

/// A total assignment of `n` boolean variables with a cached ones-count.
/// A `p`-valuation has exactly `p` variables set; a `delta`-valuation has
/// `floor(delta * n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    bits: Vec<bool>,
    ones: usize,
}

impl Valuation {
    pub fn new(bits: Vec<bool>) -> Self {
        let ones = bits.iter().filter(|&&b| b).count();
        Self { bits, ones }
    }

    pub fn all_zeros(n: usize) -> Self {
        Self { bits: vec![false; n], ones: 0 }
    }

    pub fn all_ones(n: usize) -> Self {
        Self { bits: vec![true; n], ones: n }
    }

    /// Valuation with exactly the given positions set.
    pub fn from_ones(n: usize, positions: &[usize]) -> Result<Self, RelationError> {
        let mut bits = vec![false; n];
        for &p in positions {
            if p >= n {
                return Err(RelationError::IndexOutOfRange { index: p, n });
            }
            bits[p] = true;
        }
        Ok(Self::new(bits))
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// The `p = floor(delta * n)` mapping used everywhere a real `delta` is
/// turned into a ones-count.
pub fn delta_to_p(delta: f64, n: usize) -> usize {
    (delta * n as f64).floor() as usize
}

/// A k-tuple of variable indices. Indices may repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    vars: Vec<usize>,
}

impl Constraint {
    pub fn new(vars: Vec<usize>) -> Self {
        Self { vars }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Number of positions of `c` whose variable is 1 under `v`, counting
/// repeated variables with multiplicity.
pub fn ones_count(v: &Valuation, c: &Constraint) -> Result<usize, RelationError> {
    let mut ones = 0;
    for &idx in c.vars() {
        if idx >= v.n() {
            return Err(RelationError::IndexOutOfRange { index: idx, n: v.n() });
        }
        if v.get(idx) {
            ones += 1;
        }
    }
    Ok(ones)
}

/// A random-model CSP instance: `m` constraints of arity `k` over `n`
/// variables. The generation seed is kept so serialized instances can be
/// reproduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    relation: RelationIndexSet,
    constraints: Vec<Constraint>,
    seed: Option<u64>,
}

impl Instance {
    pub fn new(
        n: usize,
        relation: RelationIndexSet,
        constraints: Vec<Constraint>,
        seed: Option<u64>,
    ) -> Result<Self, RelationError> {
        for c in &constraints {
            if c.len() != relation.k() {
                return Err(RelationError::ArityMismatch { expected: relation.k(), got: c.len() });
            }
            for &idx in c.vars() {
                if idx >= n {
                    return Err(RelationError::IndexOutOfRange { index: idx, n });
                }
            }
        }
        Ok(Self { n, relation, constraints, seed })
    }

    /// Draws `m` constraints whose `m * k` coordinates are i.i.d. uniform
    /// over `[0, n)` (with replacement, so duplicate variables and duplicate
    /// constraints are possible). Deterministic in `(n, m, rel, seed)`.
    pub fn generate(n: usize, m: usize, relation: RelationIndexSet, seed: u64) -> Self {
        assert!(n >= 1, "need at least one variable");
        let mut rng = SplitMix64::new(seed);
        let k = relation.k();
        let constraints = (0..m)
            .map(|_| Constraint::new((0..k).map(|_| rng.next_below(n as u64) as usize).collect()))
            .collect();
        Self { n, relation, constraints, seed: Some(seed) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// Constraint-to-variable ratio `m / n`.
    pub fn ratio(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    pub fn relation(&self) -> &RelationIndexSet {
        &self.relation
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Whether `v` satisfies every constraint of `inst`.
pub fn satisfies(v: &Valuation, inst: &Instance) -> Result<bool, RelationError> {
    if v.n() != inst.n() {
        return Err(RelationError::DimensionMismatch { expected: inst.n(), got: v.n() });
    }
    for c in inst.constraints() {
        if !inst.relation().permits(ones_count(v, c)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
