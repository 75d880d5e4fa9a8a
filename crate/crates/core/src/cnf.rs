//! Boolean clause-sets with DIMACS-style signed integer literals.

use std::collections::HashSet;

/// A clause: nonzero signed variable indices, positive for the variable, negative for its complement.
pub type Clause = Vec<i32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoolClauseSet {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl BoolClauseSet {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn with_clauses(num_vars: usize, clauses: Vec<Clause>) -> Self {
        Self { num_vars, clauses }
    }

    pub fn push(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// All literals within `[1..num_vars]` and no clause containing a literal and its complement.
    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars)
                && !is_tautology(c)
        })
    }

    /// Clause-set as a set of sorted, deduplicated clauses; for order-insensitive comparison.
    pub fn normalized(&self) -> HashSet<Clause> {
        self.clauses.iter().map(|c| normalize_clause(c)).collect()
    }
}

pub fn is_tautology(c: &[i32]) -> bool {
    c.iter().any(|&l| c.contains(&-l))
}

pub fn normalize_clause(c: &[i32]) -> Clause {
    let mut c = c.to_vec();
    c.sort_unstable_by_key(|&l| (l.unsigned_abs(), l < 0));
    c.dedup();
    c
}
