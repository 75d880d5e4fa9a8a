//! Translation of non-boolean clause-sets into boolean CNF.
//!
//! Every variable `v` with domain size `m` is given its own copy of an
//! unsatisfiable boolean clause-set `T(v)` over `w` fresh "slot" variables, and
//! each value `e` is bound to a distinct main clause `gamma(e)` of `T(v)`. A
//! non-boolean literal `v != e` is replaced by the literals of `gamma(e)`, and the
//! clauses of `T(v)` not used as main clauses (the remainder) are added as they are.
//!
//! Main clauses are assigned to values in the listed order of `T(v)`, which is
//! non-decreasing in clause length; with sorted parameter tuples the longest
//! main clauses therefore go to the largest progression sizes.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cnf::{is_tautology, normalize_clause, BoolClauseSet, Clause};
use crate::instances::NbClauseSet;
use crate::satcore::MapEntry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("domain size {0} is below 2")]
    DomainTooSmall(usize),
    #[error("unknown translation `{0}`")]
    UnknownKind(String),
    #[error("literal value {value} outside the domain of variable {var}")]
    ValueOutOfDomain { var: usize, value: usize },
    #[error("no main clause of variable {0} is falsified by the assignment")]
    NoFalsifiedMainClause(usize),
    #[error("assignment covers {got} boolean variables, translation has {expected}")]
    PartialAssignment { expected: usize, got: usize },
}

/// The seven instances of the translation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TranslationKind {
    WeakDirect,
    StrongDirect,
    WeakReduced,
    StrongReduced,
    WeakNested,
    StrongNested,
    SimpleLogarithmic,
}

impl TranslationKind {
    pub const ALL: [TranslationKind; 7] = [
        TranslationKind::WeakDirect,
        TranslationKind::StrongDirect,
        TranslationKind::WeakReduced,
        TranslationKind::StrongReduced,
        TranslationKind::WeakNested,
        TranslationKind::StrongNested,
        TranslationKind::SimpleLogarithmic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TranslationKind::WeakDirect => "weak-direct",
            TranslationKind::StrongDirect => "strong-direct",
            TranslationKind::WeakReduced => "weak-reduced",
            TranslationKind::StrongReduced => "strong-reduced",
            TranslationKind::WeakNested => "weak-nested",
            TranslationKind::StrongNested => "strong-nested",
            TranslationKind::SimpleLogarithmic => "simple-logarithmic",
        }
    }

    /// Number of boolean slot variables per non-boolean variable of domain size `m`.
    pub fn width(self, m: usize) -> usize {
        match self {
            TranslationKind::WeakDirect | TranslationKind::StrongDirect => m,
            TranslationKind::SimpleLogarithmic => log2_ceil(m),
            _ => m - 1,
        }
    }

    fn is_strong(self) -> bool {
        matches!(
            self,
            TranslationKind::StrongDirect
                | TranslationKind::StrongReduced
                | TranslationKind::StrongNested
        )
    }
}

impl fmt::Display for TranslationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TranslationKind {
    type Err = TranslationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| TranslationError::UnknownKind(s.to_string()))
    }
}

/// Smallest `p` with `2^p >= m`.
fn log2_ceil(m: usize) -> usize {
    let mut p = 0;
    while (1usize << p) < m {
        p += 1;
    }
    p
}

/// An unsatisfiable clause-set over slot variables `1..=slots` together with the
/// main clause chosen for each value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseClauseSet {
    pub slots: usize,
    pub clauses: Vec<Clause>,
    /// `main[e - 1]` is the index in `clauses` of the main clause for value `e`.
    pub main: Vec<usize>,
}

impl BaseClauseSet {
    pub fn main_clause(&self, value: usize) -> &Clause {
        &self.clauses[self.main[value - 1]]
    }

    /// Clauses not used as main clauses, in listed order.
    pub fn remainder(&self) -> impl Iterator<Item = &Clause> {
        let used: HashSet<usize> = self.main.iter().copied().collect();
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(i, _)| !used.contains(i))
            .map(|(_, c)| c)
    }
}

/// `{{1}, ..., {w}, {-1, ..., -w}}`
fn direct_clauses(w: usize) -> Vec<Clause> {
    let mut clauses: Vec<Clause> = (1..=w as i32).map(|i| vec![i]).collect();
    clauses.push((1..=w as i32).map(|i| -i).collect());
    clauses
}

/// `{{1}, {-1, 2}, ..., {-1, ..., -(w-1), w}, {-1, ..., -w}}`
fn nested_clauses(w: usize) -> Vec<Clause> {
    let mut clauses: Vec<Clause> = (1..=w as i32)
        .map(|j| (1..j).map(|i| -i).chain(std::iter::once(j)).collect())
        .collect();
    clauses.push((1..=w as i32).map(|i| -i).collect());
    clauses
}

/// All `2^p` full clauses over `p` variables in reflected Gray-code order, where
/// bit `i` of the code negates variable `i + 1`.
fn full_clauses(p: usize) -> Vec<Clause> {
    (0..1usize << p)
        .map(|g| {
            let code = g ^ (g >> 1);
            (1..=p as i32)
                .map(|v| if code >> (v - 1) & 1 == 1 { -v } else { v })
                .collect()
        })
        .collect()
}

fn positive_pairs(w: usize) -> impl Iterator<Item = Clause> {
    (1..=w as i32).flat_map(move |i| (i + 1..=w as i32).map(move |j| vec![i, j]))
}

/// The base clause-set and main-clause selection of `kind` for domain size `m`.
pub fn base_clauseset(kind: TranslationKind, m: usize) -> Result<BaseClauseSet, TranslationError> {
    if m < 2 {
        return Err(TranslationError::DomainTooSmall(m));
    }
    let slots = kind.width(m);
    let mut clauses = match kind {
        TranslationKind::WeakDirect | TranslationKind::StrongDirect => direct_clauses(m),
        TranslationKind::WeakReduced | TranslationKind::StrongReduced => direct_clauses(m - 1),
        TranslationKind::WeakNested | TranslationKind::StrongNested => nested_clauses(m - 1),
        TranslationKind::SimpleLogarithmic => full_clauses(slots),
    };
    if kind.is_strong() {
        clauses.extend(positive_pairs(slots));
    }
    Ok(BaseClauseSet {
        slots,
        clauses,
        main: (0..m).collect(),
    })
}

/// Association between `(variable, slot)` pairs and boolean variable indices.
///
/// The slots of the `r`-th variable (1-based) occupy a contiguous block; with a
/// uniform width `w` slot `s` of variable `r` is `(r - 1) * w + s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    vertices: Vec<u64>,
    offsets: Vec<usize>,
}

impl VarMap {
    pub fn new(vertices: Vec<u64>, widths: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(widths.len() + 1);
        offsets.push(0);
        for w in widths {
            offsets.push(offsets.last().unwrap() + w);
        }
        Self { vertices, offsets }
    }

    pub fn num_bool_vars(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn width(&self, var: usize) -> usize {
        self.offsets[var + 1] - self.offsets[var]
    }

    /// Boolean index of slot `slot` (1-based) of variable `var` (0-based).
    pub fn index(&self, var: usize, slot: usize) -> usize {
        debug_assert!((1..=self.width(var)).contains(&slot));
        self.offsets[var] + slot
    }

    /// `(variable, slot)` of a boolean index.
    pub fn lookup(&self, boolvar: usize) -> Option<(usize, usize)> {
        if boolvar == 0 || boolvar > self.num_bool_vars() {
            return None;
        }
        let var = self.offsets.partition_point(|&o| o < boolvar) - 1;
        Some((var, boolvar - self.offsets[var]))
    }

    pub fn entries(&self) -> Vec<MapEntry> {
        (0..self.vertices.len())
            .flat_map(|var| {
                (1..=self.width(var)).map(move |slot| MapEntry {
                    vertex: self.vertices[var],
                    slot,
                    var: self.index(var, slot),
                })
            })
            .collect()
    }

    fn instantiate(&self, var: usize, slot_lit: i32) -> i32 {
        let idx = self.index(var, slot_lit.unsigned_abs() as usize) as i32;
        if slot_lit > 0 {
            idx
        } else {
            -idx
        }
    }
}

fn bases_for(
    f: &NbClauseSet,
    kind: TranslationKind,
) -> Result<HashMap<usize, BaseClauseSet>, TranslationError> {
    let mut bases = HashMap::new();
    for v in &f.variables {
        if let std::collections::hash_map::Entry::Vacant(e) = bases.entry(v.domain) {
            e.insert(base_clauseset(kind, v.domain)?);
        }
    }
    Ok(bases)
}

/// Translates `f` under `kind`. Main clauses come first in the order of `f`,
/// followed by the remainder clauses of each variable in variable order.
pub fn translate(
    f: &NbClauseSet,
    kind: TranslationKind,
) -> Result<(BoolClauseSet, VarMap), TranslationError> {
    let bases = bases_for(f, kind)?;
    let widths: Vec<usize> = f.variables.iter().map(|v| bases[&v.domain].slots).collect();
    let map = VarMap::new(f.variables.iter().map(|v| v.vertex).collect(), &widths);
    let mut out = BoolClauseSet::new(map.num_bool_vars());

    for clause in &f.clauses {
        let mut lits = Vec::new();
        for l in clause {
            let base = &bases[&f.variables[l.var].domain];
            if !(1..=base.main.len()).contains(&l.value) {
                return Err(TranslationError::ValueOutOfDomain {
                    var: l.var,
                    value: l.value,
                });
            }
            lits.extend(
                base.main_clause(l.value)
                    .iter()
                    .map(|&s| map.instantiate(l.var, s)),
            );
        }
        // slot variables of distinct variables are disjoint, so no clash can arise
        assert!(
            !is_tautology(&lits),
            "translated clause contains clashing literals"
        );
        out.push(lits);
    }
    for (var, v) in f.variables.iter().enumerate() {
        for c in bases[&v.domain].remainder() {
            out.push(c.iter().map(|&s| map.instantiate(var, s)).collect());
        }
    }
    Ok((out, map))
}

/// Recovers a non-boolean assignment from a boolean model of `translate(f, kind)`:
/// each variable takes the least value whose main clause is falsified.
pub fn decode_model(
    f: &NbClauseSet,
    kind: TranslationKind,
    map: &VarMap,
    model: &[bool],
) -> Result<Vec<usize>, TranslationError> {
    if model.len() < map.num_bool_vars() {
        return Err(TranslationError::PartialAssignment {
            expected: map.num_bool_vars(),
            got: model.len(),
        });
    }
    let bases = bases_for(f, kind)?;
    let falsified = |var: usize, clause: &Clause| {
        clause.iter().all(|&s| {
            let b = map.instantiate(var, s);
            model[b.unsigned_abs() as usize - 1] != (b > 0)
        })
    };
    f.variables
        .iter()
        .enumerate()
        .map(|(var, v)| {
            let base = &bases[&v.domain];
            (1..=v.domain)
                .find(|&e| falsified(var, base.main_clause(e)))
                .ok_or(TranslationError::NoFalsifiedMainClause(var))
        })
        .collect()
}

/// DP-reduction: replaces all clauses on `var` by their non-tautological
/// resolvents on `var`. Other clauses keep their order; new resolvents follow,
/// with duplicates dropped.
pub fn dp_reduce(f: &BoolClauseSet, var: usize) -> BoolClauseSet {
    let v = var as i32;
    let (pos, neg): (Vec<&Clause>, Vec<&Clause>) = {
        let on: Vec<&Clause> = f
            .clauses
            .iter()
            .filter(|c| c.contains(&v) || c.contains(&-v))
            .collect();
        on.into_iter().partition(|c| c.contains(&v))
    };
    let mut out = BoolClauseSet::new(f.num_vars);
    let mut seen: HashSet<Clause> = HashSet::new();
    for c in f
        .clauses
        .iter()
        .filter(|c| !c.contains(&v) && !c.contains(&-v))
    {
        if seen.insert(normalize_clause(c)) {
            out.push(c.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let mut r: Clause = p.iter().filter(|&&l| l != v).copied().collect();
            for &l in n.iter().filter(|&&l| l != -v) {
                if !r.contains(&l) {
                    r.push(l);
                }
            }
            if !is_tautology(&r) && seen.insert(normalize_clause(&r)) {
                out.push(r);
            }
        }
    }
    out
}
