//! Complete backtracking decision procedure for `CSP(I_k)` instances.
//!
//! Each constraint tracks the interval `[assigned ones, assigned ones +
//! unassigned slots]` of reachable ones-counts. A branch dies when no
//! allowed count intersects the interval; when the only feasible allowed
//! count pins every unassigned slot (all-0 or all-1), those assignments
//! propagate before branching. There is no clause learning. Branching picks
//! the variable occurring in the most undecided constraints; the first value
//! tried is 0 when the relation's mean allowed count sits below k/2 and 1
//! otherwise.

use crate::relation::{satisfies, Instance, Valuation};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("node budget of {budget} exceeded after {nodes} nodes")]
    BudgetExceeded { budget: u64, nodes: u64 },
    #[error("brute force supports at most 25 variables, got {0}")]
    TooLargeForBruteForce(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witness: Option<Valuation>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { node_budget: 10_000_000 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unassigned,
    Zero,
    One,
}

struct Search<'a> {
    inst: &'a Instance,
    /// per variable: (constraint index, multiplicity) occurrences
    occurrences: Vec<Vec<(usize, u32)>>,
    assignment: Vec<Value>,
    /// per constraint: ones among assigned slots
    assigned_ones: Vec<u32>,
    /// per constraint: unassigned slots (with multiplicity)
    unassigned: Vec<u32>,
    trail: Vec<usize>,
    stats: SolveStats,
    budget: u64,
    zero_first: bool,
}

enum Propagation {
    Ok,
    Conflict,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, budget: u64) -> Self {
        let n = inst.n();
        let mut occurrences = vec![Vec::new(); n];
        for (ci, c) in inst.constraints().iter().enumerate() {
            let mut sorted = c.vars().to_vec();
            sorted.sort_unstable();
            let mut idx = 0;
            while idx < sorted.len() {
                let var = sorted[idx];
                let mut mult = 0u32;
                while idx < sorted.len() && sorted[idx] == var {
                    mult += 1;
                    idx += 1;
                }
                occurrences[var].push((ci, mult));
            }
        }
        let rel = inst.relation();
        let mean_allowed =
            rel.allowed().iter().sum::<usize>() as f64 / rel.allowed().len() as f64;
        Self {
            inst,
            occurrences,
            assignment: vec![Value::Unassigned; n],
            assigned_ones: vec![0; inst.m()],
            unassigned: vec![rel.k() as u32; inst.m()],
            trail: Vec::with_capacity(n),
            stats: SolveStats::default(),
            budget,
            zero_first: 2.0 * mean_allowed <= rel.k() as f64,
        }
    }

    /// Feasible allowed counts intersected with the reachable interval.
    /// Returns (conflict, force_all_zero, force_all_one).
    fn examine(&self, ci: usize) -> (bool, bool, bool) {
        let lo = self.assigned_ones[ci];
        let hi = lo + self.unassigned[ci];
        let mut feas_min = u32::MAX;
        let mut feas_max = 0u32;
        for &a in self.inst.relation().allowed() {
            let a = a as u32;
            if a >= lo && a <= hi {
                feas_min = feas_min.min(a);
                feas_max = feas_max.max(a);
            }
        }
        if feas_min == u32::MAX {
            return (true, false, false);
        }
        if self.unassigned[ci] == 0 {
            return (false, false, false);
        }
        // only reachable allowed count is the current floor: the rest must
        // stay 0; only the ceiling: the rest must all be 1
        (false, feas_max == lo, feas_min == hi)
    }

    /// Assigns a variable and propagates forced values. Returns whether the
    /// state is still consistent; appends to the trail either way.
    fn assign(&mut self, var: usize, one: bool) -> Propagation {
        let mut queue = vec![(var, one)];
        while let Some((v, val)) = queue.pop() {
            match self.assignment[v] {
                Value::One if val => continue,
                Value::Zero if !val => continue,
                Value::Unassigned => {}
                _ => return Propagation::Conflict,
            }
            self.assignment[v] = if val { Value::One } else { Value::Zero };
            self.trail.push(v);
            self.stats.propagations += 1;
            // apply every counter update first so undo_to stays symmetric
            // even when a conflict surfaces below
            for &(ci, mult) in &self.occurrences[v] {
                self.unassigned[ci] -= mult;
                if val {
                    self.assigned_ones[ci] += mult;
                }
            }
            for oi in 0..self.occurrences[v].len() {
                let (ci, _) = self.occurrences[v][oi];
                let (conflict, force_zero, force_one) = self.examine(ci);
                if conflict {
                    return Propagation::Conflict;
                }
                if force_zero || force_one {
                    for &w in self.inst.constraints()[ci].vars() {
                        if self.assignment[w] == Value::Unassigned {
                            queue.push((w, force_one));
                        }
                    }
                }
            }
        }
        Propagation::Ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let was_one = self.assignment[v] == Value::One;
            self.assignment[v] = Value::Unassigned;
            for oi in 0..self.occurrences[v].len() {
                let (ci, mult) = self.occurrences[v][oi];
                self.unassigned[ci] += mult;
                if was_one {
                    self.assigned_ones[ci] -= mult;
                }
            }
        }
    }

    /// Unassigned variable appearing in the most undecided constraints.
    fn pick_branch_var(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.assignment.len() {
            if self.assignment[v] != Value::Unassigned {
                continue;
            }
            let degree = self
                .occurrences[v]
                .iter()
                .filter(|&&(ci, _)| self.unassigned[ci] > 0)
                .count();
            match best {
                Some((_, d)) if d >= degree => {}
                _ => best = Some((v, degree)),
            }
        }
        best.map(|(v, _)| v)
    }

    fn search(&mut self) -> Result<bool, SolveError> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            return Err(SolveError::BudgetExceeded {
                budget: self.budget,
                nodes: self.stats.nodes,
            });
        }
        let var = match self.pick_branch_var() {
            Some(v) => v,
            // fully assigned; constraints were kept feasible throughout
            None => return Ok(true),
        };
        let order = if self.zero_first { [false, true] } else { [true, false] };
        for val in order {
            let mark = self.trail.len();
            if matches!(self.assign(var, val), Propagation::Ok) && self.search()? {
                return Ok(true);
            }
            self.undo_to(mark);
        }
        Ok(false)
    }
}

/// Decides satisfiability with the default node budget.
pub fn solve(inst: &Instance) -> Result<SolveResult, SolveError> {
    solve_with(inst, &SolverConfig::default())
}

/// Decides satisfiability. SAT results carry a witness re-verified against
/// the plain satisfaction semantics; UNSAT is returned only after the search
/// space is exhausted. Exceeding the node budget is an error, reported
/// distinctly from UNSAT.
pub fn solve_with(inst: &Instance, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    let mut s = Search::new(inst, config.node_budget);

    let mut root_conflict = false;
    for ci in 0..inst.m() {
        if s.examine(ci).0 {
            root_conflict = true;
            break;
        }
    }
    let sat = if root_conflict { false } else { s.search()? };

    if sat {
        let bits: Vec<bool> = s.assignment.iter().map(|&v| v == Value::One).collect();
        let witness = Valuation::new(bits);
        debug_assert!(satisfies(&witness, inst).unwrap_or(false), "witness failed re-check");
        Ok(SolveResult { status: SolveStatus::Sat, witness: Some(witness), stats: s.stats })
    } else {
        Ok(SolveResult { status: SolveStatus::Unsat, witness: None, stats: s.stats })
    }
}

/// Exhaustive 2^n reference decision, for cross-checking the solver.
pub fn brute_force_status(inst: &Instance) -> Result<SolveStatus, SolveError> {
    let n = inst.n();
    if n > 25 {
        return Err(SolveError::TooLargeForBruteForce(n));
    }
    let rel = inst.relation();
    for mask in 0u32..(1u32 << n) {
        let mut ok = true;
        for c in inst.constraints() {
            let ones = c.vars().iter().filter(|&&v| mask & (1 << v) != 0).count();
            if !rel.permits(ones) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SolveStatus::Sat);
        }
    }
    Ok(SolveStatus::Unsat)
}
