//! Machine constructions: Deutsch and Deutsch-Jozsa around black-box
//! oracles, the parallelizability check, and the CNF satisfiability decider.

pub mod cnf;
pub mod csat;
pub mod deutsch;
pub mod oracle;
pub mod parallel;

pub use cnf::{random_cnf, Cnf, CnfError};
pub use csat::{csat_compile, csat_core, csat_evaluator, run_csat, CsatOutcome};
pub use deutsch::{build_deutsch, build_deutsch_jozsa, classify, Construction, DeutschOutcome};
pub use oracle::{OracleError, OracleFragment};
pub use parallel::{check_parallelizable, ParallelError, ParallelReport};
