//! Deutsch and Deutsch-Jozsa machines: superpose the input, call the oracle
//! once, and test the result cell for multiplicity.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::oracle::{OracleError, OracleFragment};
use crate::machine::{Action, Machine, MachineBuilder, StateId, SymbolId};
use crate::paraconsistent::{partm_run, ParTrace};

/// A spliced machine together with what is needed to run and read it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub machine: Machine,
    pub input: Vec<SymbolId>,
    /// The oracle's entry state inside `machine`.
    pub entry: StateId,
    pub result_cell: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeutschOutcome {
    /// 0 when `f` is constant, 1 otherwise.
    pub verdict: u8,
    /// Final contents of the result cell.
    pub result: BTreeSet<SymbolId>,
    /// Time steps at which the oracle entry state is active.
    pub entry_times: Vec<usize>,
    pub trace: ParTrace,
}

impl DeutschOutcome {
    pub fn to_json(&self, machine: &Machine) -> Value {
        let result: Vec<&str> = self.result.iter().map(|&s| machine.symbol_name(s)).collect();
        json!({
            "verdict": self.verdict,
            "result_cell": result,
            "entry_times": self.entry_times,
            "steps": self.trace.firings.len(),
            "halted": self.trace.halted,
        })
    }
}

impl Construction {
    /// Runs the machine under paraconsistent semantics and reads the verdict.
    pub fn run(&self, max_steps: usize) -> DeutschOutcome {
        let trace = partm_run(&self.machine, &self.input, max_steps);
        let one = self.machine.symbol_id("1").expect("constructions declare 1");
        let result = trace.last().cell(self.result_cell, self.machine.blank());
        let entry_times = trace
            .configs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.active.iter().any(|&(q, _)| q == self.entry))
            .map(|(t, _)| t)
            .collect();
        DeutschOutcome { verdict: u8::from(result.contains(&one)), result, entry_times, trace }
    }
}

fn oracle_state(name: &str) -> String {
    format!("f.{name}")
}

/// Declares the shared alphabet and copies the oracle under `f.` names.
/// Returns the builder and the multiplicity marker symbol.
fn splice(name: &str, oracle: &OracleFragment) -> (MachineBuilder, String) {
    let o = &oracle.machine;
    let mut b = MachineBuilder::new(name);
    b.blank(o.symbol_name(o.blank()));
    b.symbol("0");
    b.symbol("1");
    for s in o.alphabet() {
        b.symbol(s);
    }
    let mut marker = "*".to_owned();
    while o.symbol_id(&marker).is_some() {
        marker.push('\'');
    }
    b.symbol(&marker);
    (b, marker)
}

fn copy_oracle(b: &mut MachineBuilder, oracle: &OracleFragment) {
    let o = &oracle.machine;
    for inst in o.instructions() {
        let action = match inst.action {
            Action::Write(s) => Action::Write(b.symbol(o.symbol_name(s))),
            a => a,
        };
        b.add(
            &oracle_state(o.state_name(inst.head_state)),
            false,
            o.symbol_name(inst.scan_symbol),
            false,
            action,
            &oracle_state(o.state_name(inst.next_state)),
        );
    }
    for q in o.states() {
        b.state(&oracle_state(q));
    }
}

/// The multiplicity test run from the oracle's exit state: a single bit is
/// overwritten by 0; a cell holding both bits additionally gets the marker,
/// which then becomes 1.
fn add_tester(b: &mut MachineBuilder, oracle: &OracleFragment, marker: &str) {
    let x = oracle_state(oracle.machine.state_name(oracle.exit));
    b.write(&x, "0", "0", "v");
    b.write(&x, "1", "0", "v");
    let m = b.symbol(marker);
    b.add(&x, false, "1", true, Action::Write(m), "v");
    b.write("v", marker, "1", "v");
}

fn finish(b: &mut MachineBuilder, oracle: &OracleFragment, n: usize) -> Construction {
    b.start("s0", 0);
    let machine = b.build().expect("spliced machine is well formed");
    let zero = machine.symbol_id("0").expect("declared");
    let entry = machine.state_id(&oracle_state(oracle.machine.state_name(oracle.entry))).expect("copied");
    Construction { machine, input: vec![zero; n], entry, result_cell: n as i64 }
}

/// Deutsch's problem for a one-bit oracle: write both bits on cell 0 at
/// once, call the oracle, test cell 1.
pub fn build_deutsch(oracle: &OracleFragment) -> Result<Construction, OracleError> {
    if oracle.arity != 1 {
        return Err(OracleError::Arity { expected: 1, actual: oracle.arity });
    }
    oracle.validate()?;
    let (mut b, marker) = splice(&format!("deutsch_{}", oracle.machine.name()), oracle);
    let entry = oracle_state(oracle.machine.state_name(oracle.entry));
    b.write("s0", "0", "0", &entry);
    b.write("s0", "0", "1", &entry);
    copy_oracle(&mut b, oracle);
    add_tester(&mut b, oracle, &marker);
    Ok(finish(&mut b, oracle, 1))
}

/// Deutsch-Jozsa for an `n`-bit oracle on input `0^n`: superpose every
/// input cell, return to cell 0, call the oracle, test cell `n`.
pub fn build_deutsch_jozsa(n: usize, oracle: &OracleFragment) -> Result<Construction, OracleError> {
    if oracle.arity != n || n == 0 {
        return Err(OracleError::Arity { expected: n.max(1), actual: oracle.arity });
    }
    if n == 1 {
        return build_deutsch(oracle);
    }
    oracle.validate()?;
    let (mut b, marker) = splice(&format!("dj{n}_{}", oracle.machine.name()), oracle);
    let entry = oracle_state(oracle.machine.state_name(oracle.entry));
    let blank = oracle.machine.symbol_name(oracle.machine.blank()).to_owned();
    b.write("s0", "0", "0", "s1");
    b.write("s0", "0", "1", "s1");
    b.right("s1", "0", "s0");
    b.right("s1", "1", "s0");
    b.left("s0", &blank, "s2");
    b.left("s2", "0", "s2");
    b.left("s2", "1", "s2");
    b.right("s2", &blank, &entry);
    copy_oracle(&mut b, oracle);
    add_tester(&mut b, oracle, &marker);
    Ok(finish(&mut b, oracle, n))
}

/// Brute-force classification: 0 when the table is constant.
pub fn classify(table: &[u8]) -> u8 {
    u8::from(table.iter().any(|&b| b != table[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::format_instruction;
    use crate::fixtures;
    use crate::problems::oracle;

    #[test]
    fn constant_one_splice_is_the_example_machine() {
        let c = build_deutsch(&oracle::example1_constant_one()).unwrap();
        let ex = fixtures::example1();
        let rename = |s: &str| match s {
            "q1" => "s0".to_owned(),
            "q5" => "v".to_owned(),
            q => format!("f.{q}"),
        };
        assert_eq!(c.machine.instructions().len(), ex.instructions().len());
        for (a, b) in c.machine.instructions().iter().zip(ex.instructions()) {
            let expected = format_instruction(&ex, b);
            let mut renamed = expected.clone();
            for q in ex.states().iter().rev() {
                renamed = renamed.replace(q.as_str(), &rename(q));
            }
            assert_eq!(format_instruction(&c.machine, a), renamed);
        }
        let out = c.run(100);
        assert_eq!(out.verdict, 0);
        assert_eq!(out.entry_times, vec![1]);
    }

    #[test]
    fn deutsch_verdicts() {
        let cases = [
            (oracle::constant(1, 0), 0),
            (oracle::constant(1, 1), 0),
            (oracle::projection(1, 0, false), 1),
            (oracle::projection(1, 0, true), 1),
        ];
        for (o, expected) in cases {
            let out = build_deutsch(&o).unwrap().run(100);
            assert!(out.trace.halted);
            assert_eq!(out.verdict, expected, "{}", o.machine.name());
            assert_eq!(out.entry_times.len(), 1);
        }
    }

    #[test]
    fn dj_two_bits() {
        let c = build_deutsch_jozsa(2, &oracle::constant(2, 1)).unwrap();
        assert_eq!(c.run(200).verdict, 0);
        let c = build_deutsch_jozsa(2, &oracle::projection(2, 0, false)).unwrap();
        let out = c.run(200);
        assert_eq!(out.verdict, 1);
        assert_eq!(out.entry_times.len(), 1);
    }

    #[test]
    fn dj_with_one_bit_is_deutsch() {
        let o = oracle::projection(1, 0, true);
        assert_eq!(build_deutsch_jozsa(1, &o).unwrap(), build_deutsch(&o).unwrap());
        assert!(matches!(build_deutsch_jozsa(2, &o), Err(OracleError::Arity { .. })));
    }
}
