//! SAT solving: the embedded CDCL solver, model verification, DIMACS I/O and
//! an adapter for external DIMACS solvers.

mod dimacs;
mod external;
mod solver;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::cnf::BoolClauseSet;

pub use dimacs::{parse_dimacs, parse_dimacs_file, write_dimacs, DimacsFile, MapEntry};
pub use external::{parse_solver_output, run_external, ExternalCommand};
pub use solver::{Solver, SolverConfig};

#[derive(Debug, Error)]
pub enum SatError {
    #[error("assignment covers {got} variables, clause-set has {expected}")]
    PartialAssignment { expected: usize, got: usize },
    #[error("DIMACS line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unparseable solver output: {0}")]
    UnparseableOutput(String),
    #[error("external solver model does not satisfy the instance")]
    ModelRejected,
    #[error("external solver `{command}` failed: {message}")]
    ExternalFailed { command: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub elapsed: Duration,
}

/// Resource limits for one solve. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn conflicts(max: u64) -> Self {
        Self {
            conflicts: Some(max),
            time: None,
        }
    }

    pub fn time(max: Duration) -> Self {
        Self {
            conflicts: None,
            time: Some(max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Present iff `status` is `Sat`; index `i` holds variable `i + 1`.
    pub model: Option<Vec<bool>>,
    pub stats: SolveStats,
}

/// Solves `f` with the embedded solver under `budget`.
pub fn solve(f: &BoolClauseSet, budget: Budget) -> SolveResult {
    solve_with(f, budget, &SolverConfig::default())
}

pub fn solve_with(f: &BoolClauseSet, budget: Budget, config: &SolverConfig) -> SolveResult {
    let mut solver = Solver::new(f.num_vars, config.clone());
    for c in &f.clauses {
        if !solver.add_clause(c) {
            break;
        }
    }
    let status = solver.solve(&budget);
    let model = (status == Status::Sat).then(|| solver.model());
    if let Some(m) = &model {
        assert!(
            verify_assignment(f, m).unwrap_or(false),
            "embedded solver produced a non-model"
        );
    }
    SolveResult {
        status,
        model,
        stats: solver.stats().clone(),
    }
}

/// Does the total assignment `a` (index `i` = variable `i + 1`) satisfy every clause?
pub fn verify_assignment(f: &BoolClauseSet, a: &[bool]) -> Result<bool, SatError> {
    if a.len() < f.num_vars {
        return Err(SatError::PartialAssignment {
            expected: f.num_vars,
            got: a.len(),
        });
    }
    Ok(f.clauses.iter().all(|c| {
        c.iter()
            .any(|&l| a[l.unsigned_abs() as usize - 1] == (l > 0))
    }))
}
