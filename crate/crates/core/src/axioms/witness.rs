//! Locating the clash between multiplicity and the uniqueness axioms.
//!
//! When two instructions fire from one occurrence of a head pair and leave
//! different traces, the next configuration holds two state facts or two
//! symbol facts that the uniqueness axioms forbid together. The witness names
//! one of those facts `φ`, the instruction axiom producing it, and the
//! uniqueness axiom instance that yields `¬φ` from the other fact.

use std::fmt;

use serde_json::{json, Value};

use super::check::TraceModel;
use super::PredSym;
use crate::machine::{Action, Machine, SymbolId};
use crate::paraconsistent::{partm_run, FiringRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Two symbols in one cell, clashing through an `As` axiom.
    Symbol,
    /// Two state facts, clashing through an `Aq` axiom.
    State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContradictionWitness {
    pub kind: WitnessKind,
    /// Time of the clashing facts (one after the ambiguous step).
    pub time: i64,
    /// Cell of `φ`.
    pub position: i64,
    /// The atom `φ`.
    pub atom: GroundAtom,
    /// The fact that, through the uniqueness axiom, yields `¬φ`.
    pub premise: GroundAtom,
    /// 0-based instructions producing `premise` and `atom`, in that order.
    pub instructions: [usize; 2],
    /// Id of the instruction axiom producing `φ`.
    pub producing_axiom: String,
    /// Id of the uniqueness axiom instantiated with `premise`.
    pub uniqueness_axiom: String,
    /// Both `φ` and the premise hold in the structure harvested from the run.
    pub certified: bool,
}

impl ContradictionWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": match self.kind { WitnessKind::Symbol => "symbol", WitnessKind::State => "state" },
            "t": self.time,
            "x": self.position,
            "atom": self.atom.to_string(),
            "negation": format!("not({})", self.atom),
            "premise": self.premise.to_string(),
            "instructions": [self.instructions[0] + 1, self.instructions[1] + 1],
            "producing_axiom": self.producing_axiom,
            "uniqueness_axiom": self.uniqueness_axiom,
            "certified": self.certified,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSearch {
    pub witness: Option<ContradictionWitness>,
    /// The step budget ran out before the run halted or clashed.
    pub truncated: bool,
    pub steps: usize,
}

/// A ground `Q` or `S` atom at integer time and cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAtom {
    pub pred: PredSym,
    pub t: i64,
    pub x: i64,
}

impl GroundAtom {
    pub fn holds(&self, model: &TraceModel) -> bool {
        match &self.pred {
            PredSym::Q(q) => model.holds_q(q, self.t, self.x),
            PredSym::S(s) => model.holds_s(s, self.t, self.x),
            PredSym::Less => self.t < self.x,
            PredSym::Eq => self.t == self.x,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pred {
            PredSym::Q(q) => write!(f, "Q_{q}({}, {})", self.t, self.x),
            PredSym::S(s) => write!(f, "S_{s}({}, {})", self.t, self.x),
            PredSym::Less => write!(f, "less({}, {})", self.t, self.x),
            PredSym::Eq => write!(f, "eq({}, {})", self.t, self.x),
        }
    }
}

/// The effect of one firing: next state, head position, written symbol.
fn effect(machine: &Machine, f: &FiringRecord) -> (usize, i64, Option<SymbolId>) {
    let inst = &machine.instructions()[f.inst];
    let written = match inst.action {
        Action::Write(s) => Some(s),
        _ => None,
    };
    (inst.next_state.0, inst.target(f.position), written)
}

fn clash(machine: &Machine, t: i64, a: &FiringRecord, b: &FiringRecord) -> Option<ContradictionWitness> {
    let (qa, pa, wa) = effect(machine, a);
    let (qb, pb, wb) = effect(machine, b);
    let ia = &machine.instructions()[a.inst];
    let ib = &machine.instructions()[b.inst];
    let base = |kind, position, atom: GroundAtom, premise: GroundAtom, uniq: String| ContradictionWitness {
        kind,
        time: t + 1,
        position,
        atom,
        premise,
        instructions: [a.inst, b.inst],
        producing_axiom: format!("Ai{}", b.inst + 1),
        uniqueness_axiom: uniq,
        certified: false,
    };
    match (wa, wb) {
        (Some(sa), Some(sb)) if sa != sb && qa == qb && pa == pb => {
            let x = a.position;
            let atom = GroundAtom { pred: PredSym::S(machine.symbol_name(sb).into()), t: t + 1, x };
            let premise = GroundAtom { pred: PredSym::S(machine.symbol_name(sa).into()), t: t + 1, x };
            Some(base(WitnessKind::Symbol, x, atom, premise, format!("As_{}", machine.symbol_name(sa))))
        }
        _ if (qa, pa) != (qb, pb) => {
            let atom = GroundAtom { pred: PredSym::Q(machine.state_name(ib.next_state).into()), t: t + 1, x: pb };
            let premise = GroundAtom { pred: PredSym::Q(machine.state_name(ia.next_state).into()), t: t + 1, x: pa };
            Some(base(WitnessKind::State, pb, atom, premise, format!("Aq_{}", machine.state_name(ia.next_state))))
        }
        _ => None,
    }
}

/// Runs the paraconsistent engine and returns the first clash between two
/// instructions firing from one head-pair occurrence.
///
/// The theory being contradicted is the classical one, so inconsistency
/// marks are ignored for the run.
pub fn contradiction_witness(machine: &Machine, input: &[SymbolId], max_steps: usize) -> WitnessSearch {
    let plain = machine.without_marks();
    let trace = partm_run(&plain, input, max_steps);
    let model = TraceModel::from_par_trace(&plain, &trace);
    for (t, fired) in trace.firings.iter().enumerate() {
        for (i, a) in fired.iter().enumerate() {
            for b in &fired[i + 1..] {
                if (a.state, a.position, a.symbol) != (b.state, b.position, b.symbol) {
                    continue;
                }
                if let Some(mut w) = clash(&plain, t as i64, a, b) {
                    w.certified = w.atom.holds(&model) && w.premise.holds(&model);
                    return WitnessSearch { witness: Some(w), truncated: false, steps: t + 1 };
                }
            }
        }
    }
    WitnessSearch { witness: None, truncated: trace.truncated, steps: trace.firings.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example1_clashes_on_cell_zero_symbols() {
        let m = fixtures::example1();
        let r = contradiction_witness(&m, &m.parse_input("0").unwrap(), 50);
        let w = r.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Symbol);
        assert_eq!((w.time, w.position), (1, 0));
        assert_eq!(w.atom.to_string(), "S_1(1, 0)");
        assert_eq!(w.premise.to_string(), "S_0(1, 0)");
        assert_eq!(w.uniqueness_axiom, "As_0");
        assert_eq!(w.producing_axiom, "Ai2");
        assert!(w.certified);
    }

    #[test]
    fn forked_states_clash_through_state_uniqueness() {
        let m = fixtures::forked();
        let w = contradiction_witness(&m, &m.parse_input("0").unwrap(), 10).witness.unwrap();
        assert_eq!(w.kind, WitnessKind::State);
        assert_eq!(w.atom.to_string(), "Q_r(1, 1)");
        assert_eq!(w.premise.to_string(), "Q_l(1, 1)");
        assert_eq!(w.uniqueness_axiom, "Aq_l");
        assert!(w.certified);
    }

    #[test]
    fn deterministic_runs_have_no_witness() {
        let m = fixtures::anomaly();
        let r = contradiction_witness(&m, &m.parse_input("0").unwrap(), 50);
        assert_eq!(r.witness, None);
        assert!(!r.truncated);
        let m = fixtures::flipper();
        let r = contradiction_witness(&m, &m.parse_input("0110").unwrap(), 2);
        assert_eq!(r.witness, None);
        assert!(r.truncated);
    }
}
