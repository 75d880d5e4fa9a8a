//! Number searches on top of the instance builders, translations and solvers:
//! single threshold decisions, vdW-/GT-number scans, certificates, transversal
//! sequences, and a few closed-form bounds.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::cardinality::{encode_exactly, CardinalityError};
use crate::cnf::BoolClauseSet;
use crate::hypergraph::{ap_hypergraph, Family};
use crate::instances::{build_instance, ParameterTuple};
use crate::satcore::{
    self, run_external, ExternalCommand, SatError, SolveResult, SolverConfig, Status,
};
use crate::translation::{decode_model, translate, TranslationError, TranslationKind};

pub use crate::satcore::Budget;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Solver(#[from] SatError),
    #[error(transparent)]
    Cardinality(#[from] CardinalityError),
    #[error("solver budget exhausted at n = {n}")]
    Unknown { n: usize, log: Vec<SolveRecord> },
    #[error("transversal computation stopped by the budget at n = {n}")]
    TransversalUnknown {
        n: usize,
        prefix: TransversalSequence,
    },
    #[error("colouring is not a partition of the first {n} vertices: {reason}")]
    NotAPartition { n: usize, reason: String },
    #[error("decoded colouring at n = {0} failed verification")]
    BadCertificate(usize),
    #[error("certificate line {line}: {message}")]
    CertificateSyntax { line: usize, message: String },
    #[error("ratio must lie in (0, 1], got {num}/{den}")]
    InvalidRatio { num: u64, den: u64 },
    #[error("invalid search range {start}..={end}")]
    InvalidRange { start: usize, end: usize },
}

/// Colour classes; `classes[i]` holds the vertices of colour `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Colouring {
    pub classes: Vec<Vec<u64>>,
}

impl Colouring {
    /// Builds the colouring from 1-based colour values per vertex.
    pub fn from_values(vertices: &[u64], values: &[usize], colours: usize) -> Self {
        let mut classes = vec![Vec::new(); colours];
        for (&v, &c) in vertices.iter().zip(values) {
            classes[c - 1].push(v);
        }
        Self { classes }
    }
}

/// Certificate format: one line per colour, `"<i>: v1 v2 ..."`.
impl fmt::Display for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in self.classes.iter().enumerate() {
            write!(f, "{}:", i + 1)?;
            for v in class {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parses a certificate. Colours not listed get an empty class; blank lines and
/// `#` comments are skipped.
pub fn parse_certificate(text: &str) -> Result<Colouring, DriverError> {
    let mut classes: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| DriverError::CertificateSyntax {
            line: i + 1,
            message,
        };
        let (colour, rest) = line
            .split_once(':')
            .ok_or_else(|| err("expected `<colour>: <vertices>`".into()))?;
        let colour: usize = colour
            .trim()
            .parse()
            .ok()
            .filter(|c| (1..=1 << 16).contains(c))
            .ok_or_else(|| err(format!("invalid colour `{}`", colour.trim())))?;
        let vertices = rest
            .split_whitespace()
            .map(|w| {
                w.parse::<u64>()
                    .map_err(|_| err(format!("invalid vertex `{w}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if classes.insert(colour, vertices).is_some() {
            return Err(err(format!("colour {colour} listed twice")));
        }
    }
    let count = classes.keys().next_back().copied().unwrap_or(0);
    Ok(Colouring {
        classes: (1..=count)
            .map(|c| classes.remove(&c).unwrap_or_default())
            .collect(),
    })
}

/// Does no colour class `i` contain a progression of size `k_i`? Checked directly
/// on the class members, independent of the hypergraph enumeration.
pub fn verify_certificate(
    family: Family,
    t: &ParameterTuple,
    n: usize,
    c: &Colouring,
) -> Result<bool, DriverError> {
    let not_partition = |reason: String| DriverError::NotAPartition { n, reason };
    if c.classes.len() > t.len() {
        return Err(not_partition(format!(
            "{} colours for a tuple of length {}",
            c.classes.len(),
            t.len()
        )));
    }
    let expected: HashSet<u64> = family.vertices(n).into_iter().collect();
    let mut seen = HashSet::new();
    for v in c.classes.iter().flatten() {
        if !expected.contains(v) {
            return Err(not_partition(format!("{v} is not among the vertices")));
        }
        if !seen.insert(*v) {
            return Err(not_partition(format!("{v} is coloured twice")));
        }
    }
    if seen.len() != expected.len() {
        return Err(not_partition(format!(
            "{} of {} vertices coloured",
            seen.len(),
            expected.len()
        )));
    }
    Ok(c.classes
        .iter()
        .zip(t.entries())
        .all(|(class, &k)| !contains_progression(class, k)))
}

fn contains_progression(class: &[u64], k: usize) -> bool {
    if k <= 1 {
        return !class.is_empty() && k == 1;
    }
    let mut sorted = class.to_vec();
    sorted.sort_unstable();
    let members: HashSet<u64> = sorted.iter().copied().collect();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            let d = b - a;
            if (2..k as u64).all(|j| members.contains(&(a + j * d))) {
                return true;
            }
        }
    }
    false
}

/// Which solver answers the queries.
#[derive(Debug, Clone)]
pub enum SolverBackend {
    Embedded(SolverConfig),
    External(ExternalCommand),
}

impl Default for SolverBackend {
    fn default() -> Self {
        SolverBackend::Embedded(SolverConfig::default())
    }
}

impl SolverBackend {
    pub fn solve(&self, f: &BoolClauseSet, budget: Budget) -> Result<SolveResult, DriverError> {
        match self {
            SolverBackend::Embedded(config) => Ok(satcore::solve_with(f, budget, config)),
            SolverBackend::External(cmd) => Ok(run_external(cmd, f)?),
        }
    }
}

/// One line of a result log: `family tuple n status conflicts seconds`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub family: Family,
    pub tuple: String,
    pub n: usize,
    pub status: Status,
    pub conflicts: u64,
    pub elapsed: Duration,
}

impl fmt::Display for SolveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {:.3}",
            self.family,
            self.tuple,
            self.n,
            self.status,
            self.conflicts,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdOutcome {
    /// A verified good colouring of the first `n` vertices.
    Sat(Colouring),
    Unsat,
    Unknown,
}

/// Is there a colouring of the first `n` vertices avoiding a size-`k_i`
/// progression in every colour `i`?
pub fn decide_threshold(
    family: Family,
    t: &ParameterTuple,
    n: usize,
    kind: TranslationKind,
    budget: Budget,
    backend: &SolverBackend,
) -> Result<(ThresholdOutcome, SolveRecord), DriverError> {
    let mut record = SolveRecord {
        family,
        tuple: t.to_string(),
        n,
        status: Status::Unknown,
        conflicts: 0,
        elapsed: Duration::ZERO,
    };
    let f = build_instance(family, t, n);
    if t.len() == 1 {
        // one colour: satisfiable iff there is no edge at all
        let outcome = if f.clauses.is_empty() {
            let vertices: Vec<u64> = f.variables.iter().map(|v| v.vertex).collect();
            ThresholdOutcome::Sat(Colouring {
                classes: vec![vertices],
            })
        } else {
            ThresholdOutcome::Unsat
        };
        record.status = if f.clauses.is_empty() {
            Status::Sat
        } else {
            Status::Unsat
        };
        return Ok((outcome, record));
    }
    let (cnf, map) = translate(&f, kind)?;
    let result = backend.solve(&cnf, budget)?;
    record.status = result.status;
    record.conflicts = result.stats.conflicts;
    record.elapsed = result.stats.elapsed;
    let outcome = match result.status {
        Status::Unsat => ThresholdOutcome::Unsat,
        Status::Unknown => ThresholdOutcome::Unknown,
        Status::Sat => {
            let model = result.model.expect("SAT result carries a model");
            let values = decode_model(&f, kind, &map, &model)?;
            let vertices: Vec<u64> = f.variables.iter().map(|v| v.vertex).collect();
            let colouring = Colouring::from_values(&vertices, &values, t.len());
            if !verify_certificate(family, t, n, &colouring)? {
                return Err(DriverError::BadCertificate(n));
            }
            ThresholdOutcome::Sat(colouring)
        }
    };
    Ok((outcome, record))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberStatus {
    /// The number itself.
    Exact(usize),
    /// The number is at least this value ("> value - 1").
    LowerBound(usize),
}

impl fmt::Display for NumberStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberStatus::Exact(v) => write!(f, "exact {v}"),
            NumberStatus::LowerBound(v) => write!(f, "lower-bound {v}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NumberResult {
    pub family: Family,
    pub tuple: ParameterTuple,
    pub kind: TranslationKind,
    pub status: NumberStatus,
    /// Verified colouring of the first `certificate_n` vertices.
    pub certificate: Colouring,
    pub certificate_n: usize,
    pub log: Vec<SolveRecord>,
}

/// Parameters of a number search.
#[derive(Debug, Clone)]
pub struct NumberSearch {
    pub kind: TranslationKind,
    pub n_start: usize,
    pub n_max: usize,
    /// Budget of every single solve.
    pub budget: Budget,
    pub backend: SolverBackend,
    /// Number of `n` values solved concurrently.
    pub jobs: usize,
}

impl NumberSearch {
    pub fn new(kind: TranslationKind, n_max: usize) -> Self {
        Self {
            kind,
            n_start: 1,
            n_max,
            budget: Budget::unlimited(),
            backend: SolverBackend::default(),
            jobs: 1,
        }
    }
}

/// Scans `n` upwards; by monotonicity the first unsatisfiable `n` is the number.
///
/// If the very first scanned `n` is already unsatisfiable, the scan continues
/// downwards until a satisfiable level is found, so an exact answer always comes
/// with a certificate for `value - 1`.
pub fn compute_number(
    family: Family,
    t: &ParameterTuple,
    search: &NumberSearch,
) -> Result<NumberResult, DriverError> {
    if search.n_start > search.n_max {
        return Err(DriverError::InvalidRange {
            start: search.n_start,
            end: search.n_max,
        });
    }
    let solve_one =
        |n: usize| decide_threshold(family, t, n, search.kind, search.budget, &search.backend);
    let mut log = Vec::new();
    let mut last_sat: Option<(usize, Colouring)> = None;
    let mut first_unsat = None;

    let jobs = search.jobs.max(1);
    let mut n = search.n_start;
    'scan: while n <= search.n_max {
        let window: Vec<usize> = (n..=search.n_max).take(jobs).collect();
        let results: Vec<Result<(ThresholdOutcome, SolveRecord), DriverError>> = if jobs == 1 {
            vec![solve_one(n)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = window
                    .iter()
                    .map(|&w| s.spawn(move || solve_one(w)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("solver thread panicked"))
                    .collect()
            })
        };
        for (&w, result) in window.iter().zip(results) {
            let (outcome, record) = result?;
            log.push(record);
            match outcome {
                ThresholdOutcome::Sat(c) => last_sat = Some((w, c)),
                ThresholdOutcome::Unsat => {
                    first_unsat = Some(w);
                    break 'scan;
                }
                ThresholdOutcome::Unknown => return Err(DriverError::Unknown { n: w, log }),
            }
        }
        n += window.len();
    }

    if first_unsat == Some(search.n_start) {
        let mut below = search.n_start;
        while below > 0 {
            below -= 1;
            let (outcome, record) = solve_one(below)?;
            log.push(record);
            match outcome {
                ThresholdOutcome::Sat(c) => {
                    last_sat = Some((below, c));
                    break;
                }
                ThresholdOutcome::Unsat => first_unsat = Some(below),
                ThresholdOutcome::Unknown => return Err(DriverError::Unknown { n: below, log }),
            }
        }
    }

    let (certificate_n, certificate) = last_sat.unwrap_or_default();
    let status = match first_unsat {
        Some(v) => NumberStatus::Exact(v),
        None => NumberStatus::LowerBound(search.n_max + 1),
    };
    Ok(NumberResult {
        family,
        tuple: t.clone(),
        kind: search.kind,
        status,
        certificate,
        certificate_n,
        log,
    })
}

/// Transversal numbers `tau(1..=n)` of the size-`k` hypergraphs of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalSequence {
    pub family: Family,
    pub k: usize,
    /// `tau[n - 1]` is the transversal number on the first `n` vertices.
    pub tau: Vec<usize>,
}

impl TransversalSequence {
    /// Consecutive values differ by 0 or 1 and the first value is 0 or 1.
    pub fn is_valid(&self) -> bool {
        self.tau.first().is_none_or(|&t| t <= 1)
            && self
                .tau
                .windows(2)
                .all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }
}

/// Computes `tau(n)` for `n = 1..=n_max` with one query per step: given
/// `b = tau(n)`, does the hypergraph on `n + 1` vertices have a transversal
/// of size exactly `b`? If so `tau(n + 1) = b`, otherwise `b + 1`.
pub fn compute_transversal_sequence(
    family: Family,
    k: usize,
    n_max: usize,
    budget: Budget,
    backend: &SolverBackend,
) -> Result<TransversalSequence, DriverError> {
    let mut seq = TransversalSequence {
        family,
        k,
        tau: Vec::with_capacity(n_max),
    };
    if n_max == 0 {
        return Ok(seq);
    }
    seq.tau.push(usize::from(k <= 1));
    let full = ap_hypergraph(family, k, n_max);
    let position: std::collections::HashMap<u64, usize> = full
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i + 1))
        .collect();
    for n in 2..=n_max {
        let b = *seq.tau.last().unwrap();
        let max_vertex = full.vertices[n - 1];
        let mut cnf = BoolClauseSet::new(n);
        for e in full
            .edges
            .iter()
            .filter(|e| *e.last().unwrap() <= max_vertex)
        {
            cnf.push(e.iter().map(|v| position[v] as i32).collect());
        }
        let vars: Vec<usize> = (1..=n).collect();
        let card = encode_exactly(&vars, b, n + 1)?;
        cnf.num_vars = card.next_free() - 1;
        cnf.clauses.extend(card.clauses);
        let result = backend.solve(&cnf, budget)?;
        match result.status {
            Status::Sat => seq.tau.push(b),
            Status::Unsat => seq.tau.push(b + 1),
            Status::Unknown => return Err(DriverError::TransversalUnknown { n, prefix: seq }),
        }
    }
    Ok(seq)
}

/// For `m = 0, 1, ...`: the smallest `n` with `tau(n) > m`, as far as the sequence reaches.
pub fn extension_numbers_from_tau(seq: &TransversalSequence) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &t) in seq.tau.iter().enumerate() {
        while out.len() < t {
            out.push(i + 1);
        }
    }
    out
}

/// `a_i` = smallest `n` with independence number `n - tau(n)` equal to `i`, for `i = 1, 2, ...`.
pub fn alpha_steplist(seq: &TransversalSequence) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &t) in seq.tau.iter().enumerate() {
        let n = i + 1;
        let alpha = n - t;
        while out.len() < alpha {
            out.push(n);
        }
    }
    out
}

/// `(m + 1) * base`: bound for the tuple extended by `m` leading 2's, given its
/// number `base` (each extra colour class absorbs one translate of a good colouring).
pub fn transversal_extension_upper_bound(_t: &ParameterTuple, m: usize, base: usize) -> usize {
    (m + 1) * base
}

/// Least integer strictly greater than `((sum ks) - len(ks)) / q` for `q = num/den` in `(0, 1]`.
pub fn complete_hypergraph_gcr(ks: &[usize], num: u64, den: u64) -> Result<u64, DriverError> {
    if num == 0 || den == 0 || num > den {
        return Err(DriverError::InvalidRatio { num, den });
    }
    let excess: u64 = ks.iter().map(|&k| k as u64).sum::<u64>() - ks.len() as u64;
    // floor(excess * den / num) + 1
    Ok(excess * den / num + 1)
}
