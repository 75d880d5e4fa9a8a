//! Exact Ramsey-type numbers on arithmetic progressions (van der Waerden and
//! Green-Tao numbers) via SAT.
//!
//! Instances are built as non-boolean clause-sets over colour variables,
//! translated to boolean CNF by one of several translation kinds, and solved
//! by the embedded CDCL solver or an external DIMACS solver.

pub mod cardinality;
pub mod cnf;
pub mod drivers;
pub mod estimation;
pub mod hypergraph;
pub mod instances;
pub mod primes;
pub mod satcore;
pub mod translation;

pub use cnf::{BoolClauseSet, Clause};
pub use drivers::{
    compute_number, compute_transversal_sequence, decide_threshold, Colouring, NumberSearch,
    NumberStatus,
};
pub use hypergraph::{ap_hypergraph, Family, Hypergraph};
pub use instances::{build_instance, NbClauseSet, ParameterTuple};
pub use satcore::{solve, Budget, Status};
pub use translation::{translate, TranslationKind};
