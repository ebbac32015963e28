//! A CNF decider for the entangled semantics.
//!
//! The machine guesses one bit per variable on cells `0..v`, then evaluates
//! the clauses with a head trajectory that depends on the formula only: each
//! clause is a left-to-right sweep over the assignment followed by a walk
//! back to cell 0. Every path therefore reaches the verdict state at the same
//! time and on the same cell. Finally the amplification instructions turn a
//! mixed verdict into a unanimous accept.

use serde_json::{json, Value};

use super::cnf::Cnf;
use crate::entangled::{epartm_acceptance, epartm_run, EParTrace};
use crate::machine::{Action, Machine, MachineBuilder};
use crate::paraconsistent::Fraction;

pub const ACCEPT: &str = "qy";
pub const REJECT: &str = "qn";
const SYMBOLS: [&str; 3] = ["_", "0", "1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Parts {
    guess: bool,
    amplify: bool,
}

fn sweep(c: usize, i: usize, sat: bool, ok: bool) -> String {
    format!("c{c}.{i}.{}{}", u8::from(sat), u8::from(ok))
}

fn rewind(c: usize, ok: bool) -> String {
    format!("r{c}.{}", u8::from(ok))
}

fn build(cnf: &Cnf, parts: Parts, name: &str) -> Machine {
    let v = cnf.vars;
    let k = cnf.clauses.len();
    let mut b = MachineBuilder::new(name);
    for s in SYMBOLS {
        b.symbol(s);
    }
    b.blank("_");

    let first = sweep(1, 0, false, true);
    if parts.guess {
        for i in 0..v {
            let (g, m) = (format!("g{i}"), format!("m{i}"));
            let next = if i + 1 == v { "end".to_owned() } else { format!("g{}", i + 1) };
            b.write(&g, "_", "0", &m).write(&g, "_", "1", &m);
            b.right(&m, "0", &next).right(&m, "1", &next);
        }
        b.left("end", "_", "back");
        b.left("back", "0", "back").left("back", "1", "back");
        b.right("back", "_", &first);
        b.start("g0", 0);
    } else {
        b.start(&first, 0);
    }

    for (ci, clause) in cnf.clauses.iter().enumerate() {
        let c = ci + 1;
        for ok in [true, false] {
            for sat in [false, true] {
                for i in 0..v {
                    let here = sweep(c, i, sat, ok);
                    for (bit, value) in [("0", false), ("1", true)] {
                        let var = i as i32 + 1;
                        let hit = clause.iter().any(|&l| (l == var && value) || (l == -var && !value));
                        b.right(&here, bit, &sweep(c, i + 1, sat || hit, ok));
                    }
                }
                b.left(&sweep(c, v, sat, ok), "_", &rewind(c, ok && sat));
            }
            let r = rewind(c, ok);
            b.left(&r, "0", &r).left(&r, "1", &r);
            let next = if c == k { (if ok { ACCEPT } else { REJECT }).to_owned() } else { sweep(c + 1, 0, false, ok) };
            b.right(&r, "_", &next);
        }
    }
    b.accept(ACCEPT).reject(REJECT);

    if parts.amplify {
        for s in SYMBOLS {
            let id = b.symbol(s);
            b.add(ACCEPT, true, s, false, Action::Write(id), ACCEPT);
        }
        for s in SYMBOLS {
            let id = b.symbol(s);
            b.add(REJECT, true, s, false, Action::Write(id), ACCEPT);
        }
    }
    b.build().expect("compiled CNF machine is well formed")
}

/// Guess, evaluation and amplification; run it on the empty input.
pub fn csat_compile(cnf: &Cnf) -> Machine {
    build(cnf, Parts { guess: true, amplify: true }, "csat")
}

/// Guess and evaluation only: an ordinary nondeterministic machine.
pub fn csat_core(cnf: &Cnf) -> Machine {
    build(cnf, Parts { guess: true, amplify: false }, "csat_core")
}

/// Evaluation only: deterministic, reads an assignment from cells `0..v`.
pub fn csat_evaluator(cnf: &Cnf) -> Machine {
    build(cnf, Parts { guess: false, amplify: false }, "csat_eval")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsatOutcome {
    pub fraction: Fraction,
    pub accepted: bool,
    /// First step at which every configuration is in a verdict state.
    pub verdict_time: Option<usize>,
    /// Every configuration reached the verdict at that step on cell 0, and
    /// none earlier.
    pub uniform: bool,
    /// Steps taken after `verdict_time`.
    pub amplification_steps: usize,
    pub trace: EParTrace,
}

impl CsatOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": if self.accepted { "accept" } else { "reject" },
            "probability": self.fraction.to_string(),
            "verdict_time": self.verdict_time,
            "uniform": self.uniform,
            "amplification_steps": self.amplification_steps,
            "halted": self.trace.halted,
        })
    }
}

/// Compiles, runs under the entangled semantics and reads the verdict.
pub fn run_csat(cnf: &Cnf, max_steps: usize) -> CsatOutcome {
    let m = csat_compile(cnf);
    let trace = epartm_run(&m, &[], max_steps);
    let y = m.state_id(ACCEPT).expect("declared");
    let n = m.state_id(REJECT).expect("declared");
    let in_verdict = |q| q == y || q == n;
    let verdict_time = trace.snapshots.iter().position(|sp| sp.distinct().all(|c| in_verdict(c.state)));
    let uniform = match verdict_time {
        Some(t) => {
            trace.snapshots[t].distinct().all(|c| c.position == 0)
                && trace.snapshots[..t].iter().all(|sp| sp.distinct().all(|c| !in_verdict(c.state)))
        }
        None => false,
    };
    let amplification_steps = verdict_time.map_or(0, |t| trace.snapshots.len() - 1 - t);
    let fraction = epartm_acceptance(&m, trace.last()).expect("machine declares both verdict states");
    let accepted = trace.halted && fraction.is_unanimous_accept();
    CsatOutcome { fraction, accepted, verdict_time, uniform, amplification_steps, trace }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{dtm_run, ndtm_run_all};
    use crate::machine::validate;

    fn cnf(vars: usize, clauses: Vec<Vec<i32>>) -> Cnf {
        Cnf::new(vars, clauses).unwrap()
    }

    #[test]
    fn satisfiable_example_accepts_with_certainty() {
        let out = run_csat(&cnf(2, vec![vec![1, 2], vec![-1, 2]]), 500);
        assert!(out.trace.halted);
        assert!(out.accepted);
        assert_eq!(out.fraction.accepting, out.fraction.total);
        assert_eq!(out.fraction.total, 4);
        assert!(out.uniform);
        assert!(out.amplification_steps <= 2);
    }

    #[test]
    fn contradictory_units_reject() {
        let out = run_csat(&cnf(1, vec![vec![1], vec![-1]]), 500);
        assert!(out.trace.halted);
        assert!(!out.accepted);
        assert_eq!(out.fraction.accepting, 0);
        assert!(out.uniform);
        assert_eq!(out.amplification_steps, 0);
    }

    #[test]
    fn evaluator_agrees_with_direct_evaluation() {
        let f = cnf(3, vec![vec![1, -2], vec![2, 3], vec![-1, -3]]);
        let m = csat_evaluator(&f);
        assert!(validate(&m).deterministic);
        for bits in 0..8u32 {
            let a: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
            let input: String = a.iter().map(|&x| if x { '1' } else { '0' }).collect();
            let t = dtm_run(&m, &m.parse_input(&input).unwrap(), 1000).unwrap();
            assert!(t.halted);
            let state = m.state_name(t.last().state);
            assert_eq!(state == ACCEPT, f.eval(&a), "{input}");
        }
    }

    #[test]
    fn core_paths_have_uniform_depth() {
        let f = cnf(3, vec![vec![1, 2, 3], vec![-2]]);
        let tree = ndtm_run_all(&csat_core(&f), &[], 1000).unwrap();
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 8);
        assert!(leaves.iter().all(|c| c.position == 0));
        let depths: std::collections::BTreeSet<usize> =
            tree.nodes.iter().filter(|n| n.is_halted()).map(|n| n.depth).collect();
        assert_eq!(depths.len(), 1);
    }
}
