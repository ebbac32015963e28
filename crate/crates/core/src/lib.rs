//! Paraconsistent Turing machines and their classical relatives.
//!
//! One machine format drives four execution semantics:
//!
//! * [`classical`]: deterministic runs and exhaustive nondeterministic trees,
//! * [`paraconsistent`]: every applicable instruction fires at once and cells
//!   accumulate symbol sets,
//! * [`entangled`]: a multiset of classical configurations that split on
//!   ambiguity but never mix,
//! * [`track`]: a deterministic multi-track machine that simulates the
//!   paraconsistent one.
//!
//! [`axioms`] emits and model-checks first-order theories of computations,
//! [`modal`] is a small S5 kernel, and [`problems`] builds the Deutsch,
//! Deutsch-Jozsa and CNF satisfiability machines.
//!
//! ```
//! use partm::{fixtures, paraconsistent};
//!
//! let m = fixtures::example1();
//! let trace = paraconsistent::partm_run(&m, &m.parse_input("0").unwrap(), 100);
//! assert!(trace.halted);
//! assert_eq!(trace.configs.len(), 5);
//! ```

pub mod axioms;
pub mod classical;
pub mod dsl;
pub mod entangled;
pub mod fixtures;
pub mod json;
pub mod machine;
pub mod modal;
pub mod paraconsistent;
pub mod problems;
pub mod track;

pub use dsl::{parse_machine, serialize};
pub use machine::{
    validate, Action, Instruction, Machine, MachineBuilder, MachineError, StateId, SymbolId, ValidationReport,
};
