//! Whether an oracle, run on a superposed input, realizes exactly the union
//! of its classical runs.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use super::oracle::{bits_of, OracleError, OracleFragment};
use crate::machine::{StateId, SymbolId};
use crate::paraconsistent::{partm_run_from, ParConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelReport {
    /// Verdict relative to the full domain `{0,1}^n`.
    pub parallelizable: bool,
    pub superposed_symbols: BTreeSet<SymbolId>,
    pub superposed_states: BTreeSet<StateId>,
    pub classical_symbols: BTreeSet<SymbolId>,
    pub classical_states: BTreeSet<StateId>,
    /// Present after the superposed run but produced by no classical run.
    pub spurious_symbols: BTreeSet<SymbolId>,
    pub spurious_states: BTreeSet<StateId>,
    /// Produced classically but lost in the superposed run.
    pub missing_symbols: BTreeSet<SymbolId>,
    pub missing_states: BTreeSet<StateId>,
}

impl ParallelReport {
    pub fn to_json(&self, oracle: &OracleFragment) -> Value {
        let m = &oracle.machine;
        let syms = |s: &BTreeSet<SymbolId>| s.iter().map(|&x| m.symbol_name(x).to_owned()).collect::<Vec<_>>();
        let states = |s: &BTreeSet<StateId>| s.iter().map(|&x| m.state_name(x).to_owned()).collect::<Vec<_>>();
        json!({
            "parallelizable": self.parallelizable,
            "domain": "on-domain",
            "superposed": {"result": syms(&self.superposed_symbols), "states": states(&self.superposed_states)},
            "classical": {"result": syms(&self.classical_symbols), "states": states(&self.classical_states)},
            "spurious": {"result": syms(&self.spurious_symbols), "states": states(&self.spurious_states)},
            "missing": {"result": syms(&self.missing_symbols), "states": states(&self.missing_states)},
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParallelError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("arity mismatch: oracle has {oracle}, asked for {asked}")]
    Arity { oracle: usize, asked: usize },
    #[error("superposed run did not halt within {0} steps")]
    NoHalt(usize),
}

fn diff<T: Ord + Copy>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
    a.difference(b).copied().collect()
}

/// Compares the superposed run (every input cell holding `{0,1}`) against
/// all `2^n` classical runs.
pub fn check_parallelizable(
    oracle: &OracleFragment,
    n: usize,
    max_steps: usize,
) -> Result<ParallelReport, ParallelError> {
    if oracle.arity != n {
        return Err(ParallelError::Arity { oracle: oracle.arity, asked: n });
    }
    oracle.validate()?;
    let m = &oracle.machine;
    let cell = oracle.result_cell();

    let mut classical_symbols = BTreeSet::new();
    let mut classical_states = BTreeSet::new();
    for x in 0..1usize << n {
        let trace = oracle.call(&bits_of(x, n)).expect("validated oracles are deterministic");
        let last = trace.last();
        classical_states.insert(last.state);
        classical_symbols.insert(last.read(cell, m.blank()));
    }

    let (zero, one) = super::oracle::bit_symbols(m);
    let mut tape = BTreeMap::new();
    for k in 0..n as i64 {
        tape.insert(k, BTreeSet::from([zero, one]));
    }
    let start = ParConfig { active: BTreeSet::from([(oracle.entry, 0)]), tape };
    let trace = partm_run_from(m, start, max_steps);
    if !trace.halted {
        return Err(ParallelError::NoHalt(max_steps));
    }
    let last = trace.last();
    let superposed_symbols = last.cell(cell, m.blank());
    let superposed_states: BTreeSet<StateId> = last.active.iter().map(|&(q, _)| q).collect();

    let spurious_symbols = diff(&superposed_symbols, &classical_symbols);
    let spurious_states = diff(&superposed_states, &classical_states);
    let missing_symbols = diff(&classical_symbols, &superposed_symbols);
    let missing_states = diff(&classical_states, &superposed_states);
    let parallelizable = spurious_symbols.is_empty()
        && spurious_states.is_empty()
        && missing_symbols.is_empty()
        && missing_states.is_empty();
    Ok(ParallelReport {
        parallelizable,
        superposed_symbols,
        superposed_states,
        classical_symbols,
        classical_states,
        spurious_symbols,
        spurious_states,
        missing_symbols,
        missing_states,
    })
}
