//! Entangled semantics: a multiset of classical configurations evolving in
//! lock step. Ambiguity splits a configuration into copies, one per
//! instruction; copies never exchange tape contents.

use std::collections::{BTreeMap, BTreeSet};

use crate::classical::ClassicalConfig;
use crate::machine::{Machine, StateId, SymbolId};
use crate::paraconsistent::{distinguished, AcceptanceError, Fraction};

/// Multiset of configurations sharing one time stamp.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Superposition {
    pub configs: BTreeMap<ClassicalConfig, usize>,
}

impl Superposition {
    pub fn singleton(c: ClassicalConfig) -> Self {
        Superposition { configs: BTreeMap::from([(c, 1)]) }
    }

    pub fn initial(machine: &Machine, input: &[SymbolId]) -> Self {
        Self::singleton(ClassicalConfig::initial(machine, input))
    }

    /// Multiset cardinality.
    pub fn len(&self) -> usize {
        self.configs.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn insert(&mut self, c: ClassicalConfig, count: usize) {
        *self.configs.entry(c).or_insert(0) += count;
    }

    pub fn distinct(&self) -> impl Iterator<Item = &ClassicalConfig> {
        self.configs.keys()
    }

    /// Multiplicity of states or positions across the configurations.
    pub fn state_incons(&self) -> bool {
        let mut heads = self.configs.keys().map(|c| (c.state, c.position));
        let first = heads.next();
        heads.any(|h| Some(h) != first)
    }

    /// Multiplicity of symbols at `pos` across the configurations.
    pub fn sym_incons(&self, pos: i64, blank: SymbolId) -> bool {
        let mut syms = self.configs.keys().map(|c| c.read(pos, blank));
        let first = syms.next();
        syms.any(|s| Some(s) != first)
    }
}

/// Instructions applicable to `c` inside `sp`, honouring inconsistency marks.
pub fn applicable(machine: &Machine, sp: &Superposition, c: &ClassicalConfig) -> Vec<usize> {
    let state_incons = sp.state_incons();
    let sym_incons = sp.sym_incons(c.position, machine.blank());
    filter_marks(machine, c, state_incons, || sym_incons)
}

fn filter_marks(
    machine: &Machine,
    c: &ClassicalConfig,
    state_incons: bool,
    mut sym_incons: impl FnMut() -> bool,
) -> Vec<usize> {
    c.matching(machine)
        .iter()
        .copied()
        .filter(|&k| {
            let inst = &machine.instructions()[k];
            !(inst.head_incons && !state_incons) && !(inst.scan_incons && !sym_incons())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepOptions {
    /// Collapse identical configurations to multiplicity one after each step.
    pub merge_duplicates: bool,
}

/// One synchronous step. Returns the successor superposition and the
/// instructions that fired, or `None` when every configuration is frozen.
pub fn epartm_step(
    machine: &Machine,
    sp: &Superposition,
    opts: StepOptions,
) -> Option<(Superposition, BTreeSet<usize>)> {
    let state_incons = sp.state_incons();
    let mut sym_cache: BTreeMap<i64, bool> = BTreeMap::new();
    let mut next = Superposition::default();
    let mut fired = BTreeSet::new();
    for (c, &count) in &sp.configs {
        let ks = filter_marks(machine, c, state_incons, || {
            *sym_cache.entry(c.position).or_insert_with(|| sp.sym_incons(c.position, machine.blank()))
        });
        if ks.is_empty() {
            next.insert(c.clone(), count);
            continue;
        }
        for k in ks {
            fired.insert(k);
            next.insert(c.apply(machine, k), count);
        }
    }
    if fired.is_empty() {
        return None;
    }
    if opts.merge_duplicates {
        next.configs.values_mut().for_each(|v| *v = 1);
    }
    Some((next, fired))
}

/// An entangled run; `fired[t]` lists instructions executed between
/// `snapshots[t]` and `snapshots[t + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EParTrace {
    pub snapshots: Vec<Superposition>,
    pub fired: Vec<BTreeSet<usize>>,
    pub halted: bool,
    pub truncated: bool,
}

impl EParTrace {
    pub fn last(&self) -> &Superposition {
        self.snapshots.last().expect("trace holds the initial superposition")
    }
}

pub fn epartm_run(machine: &Machine, input: &[SymbolId], max_steps: usize) -> EParTrace {
    epartm_run_with(machine, Superposition::initial(machine, input), max_steps, StepOptions::default())
}

pub fn epartm_run_with(machine: &Machine, start: Superposition, max_steps: usize, opts: StepOptions) -> EParTrace {
    let mut snapshots = vec![start];
    let mut fired = Vec::new();
    loop {
        let cur = snapshots.last().expect("non-empty");
        match epartm_step(machine, cur, opts) {
            None => return EParTrace { snapshots, fired, halted: true, truncated: false },
            Some(_) if fired.len() == max_steps => {
                return EParTrace { snapshots, fired, halted: false, truncated: true };
            }
            Some((next, ks)) => {
                snapshots.push(next);
                fired.push(ks);
            }
        }
    }
}

/// Configurations in the accepting state over the multiset size.
pub fn epartm_acceptance(machine: &Machine, sp: &Superposition) -> Result<Fraction, AcceptanceError> {
    let y = distinguished(machine)?;
    Ok(Fraction { accepting: sp.configs.iter().filter(|(c, _)| c.state == y).map(|(_, n)| n).sum(), total: sp.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementKind {
    /// The state of a head at `x` against the symbol at `y`.
    StateSymbol,
    /// The symbol at `x` against the symbol at `y`.
    SymbolSymbol,
}

/// Two realized value pairs at `(x, y)` whose cross combination never
/// occurs. Values are state indices or symbol indices depending on `kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntanglementWitness {
    pub kind: EntanglementKind,
    pub x: i64,
    pub y: i64,
    pub present: [(usize, usize); 2],
    pub absent: (usize, usize),
}

/// Looks for entanglement between locations `x` and `y`.
pub fn entangled(
    machine: &Machine,
    sp: &Superposition,
    x: i64,
    y: i64,
    kind: EntanglementKind,
) -> Option<EntanglementWitness> {
    let blank = machine.blank();
    let realized: BTreeSet<(usize, usize)> = sp
        .distinct()
        .filter_map(|c| match kind {
            EntanglementKind::StateSymbol => (c.position == x).then(|| (c.state.0, c.read(y, blank).0)),
            EntanglementKind::SymbolSymbol => Some((c.read(x, blank).0, c.read(y, blank).0)),
        })
        .collect();
    for &(i, j) in &realized {
        for &(k, l) in &realized {
            if i == k || j == l {
                continue;
            }
            for absent in [(i, l), (k, j)] {
                if !realized.contains(&absent) {
                    return Some(EntanglementWitness { kind, x, y, present: [(i, j), (k, l)], absent });
                }
            }
        }
    }
    None
}

/// State ids of configurations whose head sits at `x`.
pub fn states_at(sp: &Superposition, x: i64) -> BTreeSet<StateId> {
    sp.distinct().filter(|c| c.position == x).map(|c| c.state).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{dtm_run, ndtm_run_all};
    use crate::fixtures;
    use crate::machine::MachineBuilder;

    fn cfg(m: &Machine, q: &str, pos: i64, cells: &[(i64, &str)]) -> ClassicalConfig {
        let mut c = ClassicalConfig { state: m.state_id(q).unwrap(), position: pos, tape: BTreeMap::new() };
        for (p, s) in cells {
            c.set(*p, m.symbol_id(s).unwrap(), m.blank());
        }
        c
    }

    #[test]
    fn example1_splits_without_mixing() {
        let m = fixtures::example1();
        let sp = Superposition::initial(&m, &m.parse_input("0").unwrap());
        let (next, fired) = epartm_step(&m, &sp, StepOptions::default()).unwrap();
        assert_eq!(fired, BTreeSet::from([0, 1]));
        let expect: BTreeMap<ClassicalConfig, usize> =
            [(cfg(&m, "q2", 0, &[(0, "0")]), 1), (cfg(&m, "q2", 0, &[(0, "1")]), 1)].into_iter().collect();
        assert_eq!(next.configs, expect);
    }

    #[test]
    fn deterministic_machine_matches_dtm() {
        let m = fixtures::flipper();
        let inp = m.parse_input("011").unwrap();
        let e = epartm_run(&m, &inp, 100);
        let d = dtm_run(&m, &inp, 100).unwrap();
        assert_eq!(e.snapshots.len(), d.configs.len());
        for (s, c) in e.snapshots.iter().zip(&d.configs) {
            assert_eq!(s, &Superposition::singleton(c.clone()));
        }
    }

    fn amplifier() -> Machine {
        let mut b = MachineBuilder::new("amp");
        b.blank("_").start("s", 0).accept("y").reject("n");
        for s in ["_", "0"] {
            let id = b.symbol(s);
            b.add("y", true, s, false, crate::Action::Write(id), "y");
            b.add("n", true, s, false, crate::Action::Write(id), "y");
        }
        b.build().unwrap()
    }

    #[test]
    fn amplification_converges() {
        let m = amplifier();
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "y", 2, &[]), 1);
        sp.insert(cfg(&m, "n", 2, &[]), 1);
        let (s1, _) = epartm_step(&m, &sp, StepOptions::default()).unwrap();
        assert_eq!(epartm_acceptance(&m, &s1).unwrap(), Fraction { accepting: 2, total: 2 });
        assert!(epartm_step(&m, &s1, StepOptions::default()).is_none());
    }

    #[test]
    fn merge_flag_collapses_counts() {
        let m = amplifier();
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "y", 2, &[]), 1);
        sp.insert(cfg(&m, "n", 2, &[]), 1);
        let (s1, _) = epartm_step(&m, &sp, StepOptions { merge_duplicates: true }).unwrap();
        assert_eq!(s1.len(), 1);
    }

    #[test]
    fn acceptance_counts_multiset() {
        let m = amplifier();
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "y", 0, &[]), 2);
        sp.insert(cfg(&m, "n", 0, &[]), 1);
        assert_eq!(epartm_acceptance(&m, &sp).unwrap(), Fraction { accepting: 2, total: 3 });
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "n", 0, &[]), 4);
        assert_eq!(epartm_acceptance(&m, &sp).unwrap(), Fraction { accepting: 0, total: 4 });
    }

    #[test]
    fn leaves_match_ndtm_tree() {
        let m = fixtures::example1_unmarked();
        let inp = m.parse_input("0").unwrap();
        let e = epartm_run(&m, &inp, 50);
        assert!(e.halted);
        let tree = ndtm_run_all(&m, &inp, 50).unwrap();
        let mut leaves = Superposition::default();
        for c in tree.leaves() {
            leaves.insert(c.clone(), 1);
        }
        assert_eq!(e.last(), &leaves);
    }

    fn two_by_two() -> Machine {
        let mut b = MachineBuilder::new("e");
        b.blank("s0").start("q0", 0);
        for q in ["q1", "q2"] {
            b.state(q);
        }
        for s in ["s1", "s2"] {
            b.symbol(s);
        }
        b.build().unwrap()
    }

    #[test]
    fn bell_like_pair_is_entangled() {
        let m = two_by_two();
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "q1", 0, &[(5, "s1")]), 1);
        sp.insert(cfg(&m, "q2", 0, &[(5, "s2")]), 1);
        let w = entangled(&m, &sp, 0, 5, EntanglementKind::StateSymbol).unwrap();
        let q1 = m.state_id("q1").unwrap().0;
        let q2 = m.state_id("q2").unwrap().0;
        let s1 = m.symbol_id("s1").unwrap().0;
        let s2 = m.symbol_id("s2").unwrap().0;
        assert_eq!(w.present, [(q1, s1), (q2, s2)]);
        assert_eq!(w.absent, (q1, s2));
    }

    #[test]
    fn product_and_singleton_are_not_entangled() {
        let m = two_by_two();
        let mut sp = Superposition::default();
        for q in ["q1", "q2"] {
            for s in ["s1", "s2"] {
                sp.insert(cfg(&m, q, 0, &[(5, s)]), 1);
            }
        }
        assert!(entangled(&m, &sp, 0, 5, EntanglementKind::StateSymbol).is_none());
        let single = Superposition::singleton(cfg(&m, "q1", 0, &[(5, "s1")]));
        assert!(entangled(&m, &single, 0, 5, EntanglementKind::StateSymbol).is_none());
        assert!(entangled(&m, &single, 0, 5, EntanglementKind::SymbolSymbol).is_none());
    }

    #[test]
    fn symbol_symbol_entanglement() {
        let m = two_by_two();
        let mut sp = Superposition::default();
        sp.insert(cfg(&m, "q1", 0, &[(1, "s1"), (2, "s1")]), 1);
        sp.insert(cfg(&m, "q1", 0, &[(1, "s2"), (2, "s2")]), 1);
        assert!(entangled(&m, &sp, 1, 2, EntanglementKind::SymbolSymbol).is_some());
    }

    #[test]
    fn frozen_config_can_resume() {
        // `w` is frozen until the other copy reaches a different head pair.
        let mut b = MachineBuilder::new("thaw");
        b.blank("_").start("a", 0);
        b.right("a", "_", "b");
        b.right("a", "_", "w");
        b.right("b", "_", "c");
        b.add("w", true, "_", false, crate::Action::Right, "d");
        let m = b.build().unwrap();
        let e = epartm_run(&m, &[], 10);
        assert!(e.halted);
        let d = m.state_id("d").unwrap();
        assert!(e.last().distinct().any(|c| c.state == d));
    }
}
