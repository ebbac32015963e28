//! Black-box function machines with a fixed calling convention.
//!
//! An oracle of arity `n` starts in its entry state on cell 0 with a bit in
//! each of cells `0..n`, and halts in its exit state on cell `n` after
//! writing `f(x)` there.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::classical::{dtm_run_from, ClassicalConfig, ClassicalError};
use crate::machine::{Machine, MachineBuilder, MachineError, StateId, SymbolId};

/// Step budget for a single classical oracle call during validation.
pub const ORACLE_STEP_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFragment {
    pub machine: Machine,
    pub entry: StateId,
    pub exit: StateId,
    pub arity: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("oracle has no state {0}")]
    UnknownState(String),
    #[error("oracle alphabet lacks symbol {0}")]
    MissingSymbol(&'static str),
    #[error("oracle carries inconsistency marks")]
    Marked,
    #[error("oracle is not deterministic: {0}")]
    Nondeterministic(String),
    #[error("exit state {0} has an instruction on a result bit")]
    ExitNotFinal(String),
    #[error("on input {input} the oracle {problem}")]
    Convention { input: String, problem: String },
    #[error("arity mismatch: expected {expected}, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("arity {0} is too large for exhaustive checks")]
    TooLarge(usize),
    #[error("truth table has {actual} entries, expected {expected}")]
    TableSize { expected: usize, actual: usize },
}

/// The bits of `x` as cell contents, most significant first.
pub fn bits_of(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| (x >> (n - 1 - k) & 1) as u8).collect()
}

impl OracleFragment {
    /// Checks the convention on every input in `{0,1}^n` and returns the
    /// truth table, indexed with cell 0 as the most significant bit.
    pub fn validate(&self) -> Result<Vec<u8>, OracleError> {
        let m = &self.machine;
        if self.arity > 16 {
            return Err(OracleError::TooLarge(self.arity));
        }
        let zero = m.symbol_id("0").ok_or(OracleError::MissingSymbol("0"))?;
        let one = m.symbol_id("1").ok_or(OracleError::MissingSymbol("1"))?;
        if m.has_marks() {
            return Err(OracleError::Marked);
        }
        for bit in [zero, one] {
            if !m.matching(self.exit, bit).is_empty() {
                return Err(OracleError::ExitNotFinal(m.state_name(self.exit).to_owned()));
            }
        }
        let mut table = Vec::with_capacity(1 << self.arity);
        for x in 0..1usize << self.arity {
            let bits = bits_of(x, self.arity);
            let shown: String = bits.iter().map(|b| b.to_string()).collect();
            let trace = self.call(&bits).map_err(|e| match e {
                ClassicalError::Nondeterministic(s) => OracleError::Nondeterministic(s),
                ClassicalError::Marks(_) => OracleError::Marked,
            })?;
            let fail = |problem: String| OracleError::Convention { input: shown.clone(), problem };
            if !trace.halted {
                return Err(fail(format!("does not halt within {ORACLE_STEP_LIMIT} steps")));
            }
            let last = trace.last();
            if last.state != self.exit {
                return Err(fail(format!("halts in {} instead of the exit state", m.state_name(last.state))));
            }
            if last.position != self.arity as i64 {
                return Err(fail(format!("halts on cell {} instead of {}", last.position, self.arity)));
            }
            let out = last.read(self.arity as i64, m.blank());
            table.push(match out {
                s if s == zero => 0,
                s if s == one => 1,
                s => return Err(fail(format!("leaves {} in the result cell", m.symbol_name(s)))),
            });
        }
        Ok(table)
    }

    /// Classical run of the oracle on one input.
    pub fn call(&self, bits: &[u8]) -> Result<crate::classical::Trace, ClassicalError> {
        let m = &self.machine;
        let mut tape = BTreeMap::new();
        for (k, &b) in bits.iter().enumerate() {
            let s = m.symbol_id(if b == 0 { "0" } else { "1" }).expect("validated alphabet");
            if s != m.blank() {
                tape.insert(k as i64, s);
            }
        }
        let start = ClassicalConfig { state: self.entry, position: 0, tape };
        dtm_run_from(m, start, ORACLE_STEP_LIMIT)
    }

    pub fn result_cell(&self) -> i64 {
        self.arity as i64
    }

    /// Wraps an arbitrary machine, checking only that the named states exist.
    pub fn from_machine(machine: Machine, entry: &str, exit: &str, arity: usize) -> Result<Self, OracleError> {
        let e = machine.state_id(entry).ok_or_else(|| OracleError::UnknownState(entry.to_owned()))?;
        let x = machine.state_id(exit).ok_or_else(|| OracleError::UnknownState(exit.to_owned()))?;
        Ok(OracleFragment { machine, entry: e, exit: x, arity })
    }
}

fn base(name: &str) -> MachineBuilder {
    let mut b = MachineBuilder::new(name);
    b.blank("_");
    b.symbol("0");
    b.symbol("1");
    b
}

fn finish(mut b: MachineBuilder, entry: &str, exit: &str, arity: usize) -> OracleFragment {
    b.state(exit);
    b.start(entry, 0);
    let machine = b.build().expect("template machines are well formed");
    OracleFragment::from_machine(machine, entry, exit, arity).expect("template states exist")
}

/// `f(x) = bit` for every `x`: walk to the result cell and write.
pub fn constant(arity: usize, bit: u8) -> OracleFragment {
    let mut b = base(&format!("const{bit}"));
    for k in 0..arity {
        let (here, next) = (format!("w{k}"), format!("w{}", k + 1));
        b.right(&here, "0", &next).right(&here, "1", &next);
    }
    b.write(&format!("w{arity}"), "_", &bit.to_string(), "done");
    finish(b, "w0", "done", arity)
}

/// `f(x) = x_k` (cell `k`, 0-based), or its negation.
pub fn projection(arity: usize, k: usize, negated: bool) -> OracleFragment {
    assert!(k < arity, "projection index out of range");
    let name = if negated { format!("neg{k}") } else { format!("proj{k}") };
    let mut b = base(&name);
    for j in 0..k {
        let (here, next) = (format!("w{j}"), format!("w{}", j + 1));
        b.right(&here, "0", &next).right(&here, "1", &next);
    }
    let here = format!("w{k}");
    b.right(&here, "0", "c0").right(&here, "1", "c1");
    for c in ["c0", "c1"] {
        b.right(c, "0", c).right(c, "1", c);
    }
    let (out0, out1) = if negated { ("1", "0") } else { ("0", "1") };
    b.write("c0", "_", out0, "done").write("c1", "_", out1, "done");
    finish(b, "w0", "done", arity)
}

/// Decision tree over all inputs: one state per prefix read so far.
/// `table[x]` is `f` at the input whose bits (cell 0 first) spell `x`.
pub fn truth_table(arity: usize, table: &[u8]) -> Result<OracleFragment, OracleError> {
    if arity > 10 {
        return Err(OracleError::TooLarge(arity));
    }
    if table.len() != 1 << arity {
        return Err(OracleError::TableSize { expected: 1 << arity, actual: table.len() });
    }
    let label: String = table.iter().map(|b| b.to_string()).collect();
    let mut b = base(&format!("table{label}"));
    let node = |prefix: &str| format!("n{prefix}");
    let mut frontier = vec![String::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for p in &frontier {
            for bit in ["0", "1"] {
                let child = format!("{p}{bit}");
                b.right(&node(p), bit, &node(&child));
                next.push(child);
            }
        }
        frontier = next;
    }
    for (x, p) in frontier.iter().enumerate() {
        b.write(&node(p), "_", &table[x].to_string(), "done");
    }
    Ok(finish(b, &node(""), "done", arity))
}

/// The `f(x) = 1` fragment of the nine-instruction example machine.
pub fn example1_constant_one() -> OracleFragment {
    let mut b = base("example1_oracle");
    b.right("q2", "0", "q3").right("q2", "1", "q3").write("q3", "_", "1", "q4");
    finish(b, "q2", "q4", 1)
}

/// Classically constant 1, but mixes paths on a superposed cell.
pub fn anomaly() -> OracleFragment {
    let machine = crate::fixtures::anomaly();
    OracleFragment::from_machine(machine, "q1", "q4", 1).expect("fixture states exist")
}

/// Arity 0: one instruction writing `bit` on the result cell.
pub fn single_writer(bit: u8) -> OracleFragment {
    let mut b = base(&format!("writer{bit}"));
    b.write("e", "_", &bit.to_string(), "done");
    finish(b, "e", "done", 0)
}

/// Looks up a 0/1 symbol; the oracle alphabet always has both.
pub(crate) fn bit_symbols(m: &Machine) -> (SymbolId, SymbolId) {
    (m.symbol_id("0").expect("bit symbol 0"), m.symbol_id("1").expect("bit symbol 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_compute_their_functions() {
        assert_eq!(constant(2, 1).validate().unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(constant(0, 0).validate().unwrap(), vec![0]);
        assert_eq!(projection(2, 0, false).validate().unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(projection(2, 1, true).validate().unwrap(), vec![1, 0, 1, 0]);
        let t = [0, 1, 1, 0, 1, 0, 0, 1];
        assert_eq!(truth_table(3, &t).unwrap().validate().unwrap(), t.to_vec());
        assert_eq!(example1_constant_one().validate().unwrap(), vec![1, 1]);
        assert_eq!(anomaly().validate().unwrap(), vec![1, 1]);
        assert_eq!(single_writer(1).validate().unwrap(), vec![1]);
    }

    #[test]
    fn convention_violations_are_reported() {
        let mut b = base("stray");
        b.right("e", "0", "done").right("e", "1", "x");
        b.write("done", "_", "1", "done2");
        let o = finish(b, "e", "done", 1);
        assert!(matches!(o.validate(), Err(OracleError::Convention { .. })));
        assert!(matches!(truth_table(1, &[0]), Err(OracleError::TableSize { .. })));
    }

    #[test]
    fn bits_are_most_significant_first() {
        assert_eq!(bits_of(6, 3), vec![1, 1, 0]);
        assert_eq!(bits_of(0, 0), Vec::<u8>::new());
    }
}
