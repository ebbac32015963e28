//! Machines bundled with the crate, each paired with a default input.

use std::collections::BTreeSet;

use rand::Rng;

use crate::dsl::parse_machine;
use crate::machine::{Action, Machine, MachineBuilder, SymbolId};

const SOURCES: &[(&str, &str, &str)] = &[
    ("example1", include_str!("../fixtures/example1.ptm"), "0"),
    ("example1_unmarked", include_str!("../fixtures/example1_unmarked.ptm"), "0"),
    ("anomaly", include_str!("../fixtures/anomaly.ptm"), "0"),
    ("flipper", include_str!("../fixtures/flipper.ptm"), "0110"),
    ("counter", include_str!("../fixtures/counter.ptm"), "1101"),
    ("empty", include_str!("../fixtures/empty.ptm"), ""),
    ("walker", include_str!("../fixtures/walker.ptm"), ""),
    ("forked", include_str!("../fixtures/forked.ptm"), "0"),
];

fn load(name: &str) -> Machine {
    let (_, src, _) = SOURCES.iter().find(|(n, _, _)| *n == name).expect("known fixture");
    parse_machine(src).expect("bundled fixture parses")
}

/// Source text of a bundled fixture.
pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _, _)| *n == name).map(|(_, s, _)| *s)
}

/// Default input string for a bundled fixture.
pub fn default_input(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _, _)| *n == name).map(|(_, _, i)| *i)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _, _)| *n)
}

/// Every fixture, by name, in a stable order.
pub fn all() -> Vec<(&'static str, Machine)> {
    names().map(|n| (n, load(n))).collect()
}

/// The nine-instruction machine with the `(q1, 0)` ambiguity and the
/// multiplicity-guarded write `q4 1^ -> write *, q5`.
pub fn example1() -> Machine {
    load("example1")
}

pub fn example1_unmarked() -> Machine {
    load("example1_unmarked")
}

/// The deterministic machine that computes the constant 1 classically but
/// yields both bits when started on a superposed cell.
pub fn anomaly() -> Machine {
    load("anomaly")
}

pub fn flipper() -> Machine {
    load("flipper")
}

pub fn counter() -> Machine {
    load("counter")
}

pub fn empty() -> Machine {
    load("empty")
}

pub fn walker() -> Machine {
    load("walker")
}

pub fn forked() -> Machine {
    load("forked")
}

/// Shape of a [`random_machine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomShape {
    pub states: usize,
    /// Alphabet size including the blank `_`; the others are `a`, `b`, ...
    pub symbols: usize,
    pub instructions: usize,
    /// Use each head pair at most once.
    pub deterministic: bool,
    /// Probability of an inconsistency mark on each side of an instruction.
    pub mark_rate: f64,
}

/// A random machine over states `q0..` and symbols `_ a b ...`, started in
/// `q0` at cell 0. Deterministic shapes may come out with fewer
/// instructions than asked when head pairs run out.
pub fn random_machine(rng: &mut impl Rng, shape: RandomShape) -> Machine {
    assert!(shape.states >= 1 && (1..=27).contains(&shape.symbols));
    let state = |k: usize| format!("q{k}");
    let symbol = |k: usize| if k == 0 { "_".to_owned() } else { char::from(b'a' + k as u8 - 1).to_string() };
    let mut b = MachineBuilder::new("random");
    for k in 0..shape.symbols {
        b.symbol(&symbol(k));
    }
    b.blank("_");
    for k in 0..shape.states {
        b.state(&state(k));
    }
    b.start("q0", 0);
    let mut used = BTreeSet::new();
    for _ in 0..shape.instructions {
        let (q, s) = (rng.gen_range(0..shape.states), rng.gen_range(0..shape.symbols));
        if shape.deterministic && !used.insert((q, s)) {
            continue;
        }
        let action = match rng.gen_range(0..3) {
            0 => Action::Left,
            1 => Action::Right,
            _ => Action::Write(SymbolId(rng.gen_range(0..shape.symbols))),
        };
        let next = rng.gen_range(0..shape.states);
        let (hm, sm) = (rng.gen_bool(shape.mark_rate), rng.gen_bool(shape.mark_rate));
        b.add(&state(q), hm, &symbol(s), sm, action, &state(next));
    }
    b.build().expect("random machines are well formed")
}

/// A random input of up to `max_len` non-blank symbols of `m`.
pub fn random_input(rng: &mut impl Rng, m: &Machine, max_len: usize) -> Vec<SymbolId> {
    let non_blank: Vec<SymbolId> = (0..m.alphabet().len()).map(SymbolId).filter(|&s| s != m.blank()).collect();
    if non_blank.is_empty() {
        return Vec::new();
    }
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| non_blank[rng.gen_range(0..non_blank.len())]).collect()
}
