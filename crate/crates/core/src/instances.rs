//! Parameter tuples and the non-boolean clause-sets `F(k_1, ..., k_m; n)`.
//!
//! A non-boolean literal `(v, e)` asserts "variable `v` does not take value `e`".
//! For a tuple `(k_1, ..., k_m)` colour `i` is forbidden to contain a progression
//! of size `k_i`, so every size-`k_i` edge `H` yields the clause `{v != i : v in H}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hypergraph::{ap_hypergraph, Family};

/// Largest search space accepted by [`solve_nb_bruteforce`].
pub const NB_BRUTEFORCE_LIMIT: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("parameter tuple is empty")]
    Empty,
    #[error("parameter tuple entry {0} is below 2")]
    EntryTooSmall(usize),
    #[error("parameter tuple is not sorted non-decreasingly")]
    Unsorted,
    #[error("invalid parameter tuple entry `{0}`")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("search space of {0} assignments exceeds the brute-force limit")]
    SearchSpaceTooLarge(u128),
}

/// A sorted parameter tuple `k_1 <= ... <= k_m` with every entry at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParameterTuple(Vec<usize>);

impl ParameterTuple {
    pub fn new(entries: Vec<usize>) -> Result<Self, TupleError> {
        if entries.is_empty() {
            return Err(TupleError::Empty);
        }
        if let Some(&k) = entries.iter().find(|&&k| k < 2) {
            return Err(TupleError::EntryTooSmall(k));
        }
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(TupleError::Unsorted);
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Number of colours `m`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn classify(&self) -> TupleClass {
        classify_tuple(self)
    }
}

impl fmt::Display for ParameterTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses the comma-separated form `3,3,4`.
impl FromStr for ParameterTuple {
    type Err = TupleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let entries = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<usize>()
                    .map_err(|_| TupleError::Syntax(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries)
    }
}

/// Classification labels of a parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleClass {
    /// All entries equal 2.
    pub trivial: bool,
    /// Length 1.
    pub simple: bool,
    /// Length at least 2, all entries at least 3.
    pub core: bool,
    /// Leading 2's followed by exactly one entry >= 3 (extended simple tuple).
    pub transversal: bool,
    /// Leading 2's followed by a core tuple.
    pub extended_core: bool,
    /// All entries equal; otherwise the tuple is mixed.
    pub diagonal: bool,
    /// Number of leading 2's.
    pub extension_length: usize,
    /// The suffix of entries >= 3.
    pub core_part: Vec<usize>,
}

impl TupleClass {
    pub fn mixed(&self) -> bool {
        !self.diagonal
    }
}

pub fn classify_tuple(t: &ParameterTuple) -> TupleClass {
    let entries = t.entries();
    let extension_length = entries.iter().take_while(|&&k| k == 2).count();
    let core_part = entries[extension_length..].to_vec();
    TupleClass {
        trivial: core_part.is_empty(),
        simple: entries.len() == 1,
        core: extension_length == 0 && entries.len() >= 2,
        transversal: extension_length >= 1 && core_part.len() == 1,
        extended_core: extension_length >= 1 && core_part.len() >= 2,
        diagonal: entries.windows(2).all(|w| w[0] == w[1]),
        extension_length,
        core_part,
    }
}

/// Non-boolean literal "variable `var` is not `value`"; `var` indexes
/// [`NbClauseSet::variables`], `value` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NbLit {
    pub var: usize,
    pub value: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NbVariable {
    /// The vertex this variable stands for.
    pub vertex: u64,
    /// Domain is `1..=domain`.
    pub domain: usize,
}

/// A generalised clause-set with finite-domain variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NbClauseSet {
    pub variables: Vec<NbVariable>,
    pub clauses: Vec<Vec<NbLit>>,
}

impl NbClauseSet {
    /// Checks the literal invariants: values within domains, one literal per variable per clause.
    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().all(|l| {
                l.var < self.variables.len()
                    && (1..=self.variables[l.var].domain).contains(&l.value)
            }) && (0..c.len()).all(|i| c[i + 1..].iter().all(|l| l.var != c[i].var))
        })
    }

    /// Does `assignment` (1-based values per variable) satisfy every clause?
    pub fn satisfied_by(&self, assignment: &[usize]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| assignment[l.var] != l.value))
    }
}

/// `F(t; n)` for the given family: one variable per vertex with domain `[1..m]`,
/// one clause per colour `i` and size-`k_i` edge, ordered by colour then edge.
pub fn build_instance(family: Family, t: &ParameterTuple, n: usize) -> NbClauseSet {
    let m = t.len();
    let vertices = family.vertices(n);
    let position: HashMap<u64, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut cache: HashMap<usize, Vec<Vec<u64>>> = HashMap::new();
    let mut clauses = Vec::new();
    for (colour, &k) in t.entries().iter().enumerate() {
        let edges = cache
            .entry(k)
            .or_insert_with(|| ap_hypergraph(family, k, n).edges);
        for edge in edges.iter() {
            clauses.push(
                edge.iter()
                    .map(|v| NbLit {
                        var: position[v],
                        value: colour + 1,
                    })
                    .collect(),
            );
        }
    }
    NbClauseSet {
        variables: vertices
            .into_iter()
            .map(|vertex| NbVariable { vertex, domain: m })
            .collect(),
        clauses,
    }
}

/// Exhaustive satisfiability check; returns a witness assignment (1-based values) if satisfiable.
pub fn solve_nb_bruteforce(f: &NbClauseSet) -> Result<Option<Vec<usize>>, InstanceError> {
    let space = f
        .variables
        .iter()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.domain as u128))
        .unwrap_or(u128::MAX);
    if space > NB_BRUTEFORCE_LIMIT {
        return Err(InstanceError::SearchSpaceTooLarge(space));
    }
    if f.clauses.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    // each clause is checked once its highest variable is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); f.variables.len()];
    for (ci, c) in f.clauses.iter().enumerate() {
        let last = c.iter().map(|l| l.var).max().unwrap();
        ready[last].push(ci);
    }

    fn extend(f: &NbClauseSet, ready: &[Vec<usize>], assignment: &mut Vec<usize>) -> bool {
        let var = assignment.len();
        if var == f.variables.len() {
            return true;
        }
        for value in 1..=f.variables[var].domain {
            assignment.push(value);
            let ok = ready[var]
                .iter()
                .all(|&ci| f.clauses[ci].iter().any(|l| assignment[l.var] != l.value));
            if ok && extend(f, ready, assignment) {
                return true;
            }
            assignment.pop();
        }
        false
    }

    let mut assignment = Vec::with_capacity(f.variables.len());
    Ok(extend(f, &ready, &mut assignment).then_some(assignment))
}
