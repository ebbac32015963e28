//! Paraconsistent semantics: every applicable instruction fires at once,
//! producing sets of active (state, position) pairs and per-cell symbol sets.
//!
//! A write at cell `x` keeps the symbols already there whenever some other
//! firing of the same step leaves `x` untouched: a move firing anywhere, or a
//! write firing at a different cell. When every firing of the step is a write
//! at `x` itself, the old contents of `x` are replaced by the written symbols.
//! Active pairs that cannot fire are not carried to the next step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::classical::ClassicalConfig;
use crate::machine::{Action, Machine, StateId, SymbolId};

/// A paraconsistent configuration. Cells whose set is exactly `{blank}` are
/// not stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParConfig {
    pub active: BTreeSet<(StateId, i64)>,
    pub tape: BTreeMap<i64, BTreeSet<SymbolId>>,
}

impl ParConfig {
    pub fn initial(machine: &Machine, input: &[SymbolId]) -> Self {
        Self::from_classical(&ClassicalConfig::initial(machine, input))
    }

    pub fn from_classical(c: &ClassicalConfig) -> Self {
        ParConfig {
            active: BTreeSet::from([(c.state, c.position)]),
            tape: c.tape.iter().map(|(&p, &s)| (p, BTreeSet::from([s]))).collect(),
        }
    }

    /// Symbol set of cell `pos`.
    pub fn cell(&self, pos: i64, blank: SymbolId) -> BTreeSet<SymbolId> {
        self.tape.get(&pos).cloned().unwrap_or_else(|| BTreeSet::from([blank]))
    }

    pub fn set_cell(&mut self, pos: i64, syms: BTreeSet<SymbolId>, blank: SymbolId) {
        debug_assert!(!syms.is_empty());
        if syms.len() == 1 && syms.contains(&blank) {
            self.tape.remove(&pos);
        } else {
            self.tape.insert(pos, syms);
        }
    }

    /// Leftmost and rightmost cell that is stored or under an active head.
    pub fn span(&self) -> Option<(i64, i64)> {
        let cells = self.tape.keys().copied().chain(self.active.iter().map(|a| a.1));
        cells.fold(None, |acc, p| match acc {
            None => Some((p, p)),
            Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
        })
    }

    /// True when `c` can be read off this configuration by choosing one
    /// active pair and one symbol per cell.
    pub fn admits(&self, c: &ClassicalConfig, blank: SymbolId) -> bool {
        if !self.active.contains(&(c.state, c.position)) {
            return false;
        }
        let cells: BTreeSet<i64> = self.tape.keys().chain(c.tape.keys()).copied().collect();
        cells.into_iter().all(|p| self.cell(p, blank).contains(&c.read(p, blank)))
    }

    /// The unique classical configuration when there is no multiplicity.
    pub fn as_classical(&self) -> Option<ClassicalConfig> {
        if self.active.len() != 1 || self.tape.values().any(|s| s.len() != 1) {
            return None;
        }
        let &(state, position) = self.active.iter().next()?;
        Some(ClassicalConfig {
            state,
            position,
            tape: self.tape.iter().map(|(&p, s)| (p, *s.iter().next().expect("non-empty"))).collect(),
        })
    }
}

/// One instruction execution within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringRecord {
    pub inst: usize,
    pub state: StateId,
    pub position: i64,
    pub symbol: SymbolId,
}

/// Every firing from `config`, ordered by instruction, then position.
pub fn firing_set(machine: &Machine, config: &ParConfig) -> Vec<FiringRecord> {
    let multi_state = config.active.len() > 1;
    let mut out = Vec::new();
    for &(state, position) in &config.active {
        let cell = config.cell(position, machine.blank());
        for &symbol in &cell {
            for &k in machine.matching(state, symbol) {
                let inst = &machine.instructions()[k];
                if inst.head_incons && !multi_state {
                    continue;
                }
                if inst.scan_incons && cell.len() < 2 {
                    continue;
                }
                out.push(FiringRecord { inst: k, state, position, symbol });
            }
        }
    }
    out.sort();
    out
}

/// Applies a non-empty firing set to `config`.
pub fn apply_firings(machine: &Machine, config: &ParConfig, fired: &[FiringRecord]) -> ParConfig {
    let mut next = ParConfig { active: BTreeSet::new(), tape: config.tape.clone() };
    let mut writes: BTreeMap<i64, BTreeSet<SymbolId>> = BTreeMap::new();
    let mut moved = false;
    for f in fired {
        let inst = &machine.instructions()[f.inst];
        next.active.insert((inst.next_state, inst.target(f.position)));
        match inst.action {
            Action::Write(s) => {
                writes.entry(f.position).or_default().insert(s);
            }
            Action::Right | Action::Left => moved = true,
        }
    }
    let several_cells = writes.len() > 1;
    for (pos, mut syms) in writes {
        if moved || several_cells {
            syms.extend(config.cell(pos, machine.blank()));
        }
        next.set_cell(pos, syms, machine.blank());
    }
    next
}

/// One step; `None` when nothing fires.
pub fn partm_step(machine: &Machine, config: &ParConfig) -> Option<(ParConfig, Vec<FiringRecord>)> {
    let fired = firing_set(machine, config);
    if fired.is_empty() {
        return None;
    }
    Some((apply_firings(machine, config, &fired), fired))
}

/// A paraconsistent run; `firings[t]` produced `configs[t + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParTrace {
    pub configs: Vec<ParConfig>,
    pub firings: Vec<Vec<FiringRecord>>,
    pub halted: bool,
    pub truncated: bool,
}

impl ParTrace {
    pub fn last(&self) -> &ParConfig {
        self.configs.last().expect("trace holds the initial configuration")
    }
}

pub fn partm_run(machine: &Machine, input: &[SymbolId], max_steps: usize) -> ParTrace {
    partm_run_from(machine, ParConfig::initial(machine, input), max_steps)
}

pub fn partm_run_from(machine: &Machine, start: ParConfig, max_steps: usize) -> ParTrace {
    let mut configs = vec![start];
    let mut firings = Vec::new();
    loop {
        let cur = configs.last().expect("non-empty");
        let fired = firing_set(machine, cur);
        if fired.is_empty() {
            return ParTrace { configs, firings, halted: true, truncated: false };
        }
        if firings.len() == max_steps {
            return ParTrace { configs, firings, halted: false, truncated: true };
        }
        let next = apply_firings(machine, cur, &fired);
        configs.push(next);
        firings.push(fired);
    }
}

/// Classical tapes obtainable from a final configuration by choosing one
/// symbol per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    /// Cells considered, in increasing order.
    pub cells: Vec<i64>,
    /// Enumerated choices; blanks are omitted from each tape.
    pub results: Vec<BTreeMap<i64, SymbolId>>,
    /// Exact number of choice functions, even when enumeration stopped early.
    pub total: BigUint,
    pub truncated: bool,
}

/// Enumerates up to `max_choices` result tapes over the stored cells of
/// `config`, optionally restricted to the inclusive range `window`.
pub fn partm_results(
    machine: &Machine,
    config: &ParConfig,
    window: Option<(i64, i64)>,
    max_choices: usize,
) -> ResultSet {
    let blank = machine.blank();
    let cells: Vec<i64> = match window {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => config.tape.keys().copied().collect(),
    };
    let options: Vec<Vec<SymbolId>> = cells.iter().map(|&p| config.cell(p, blank).into_iter().collect()).collect();
    let total = options.iter().fold(BigUint::from(1u32), |acc, o| acc * BigUint::from(o.len()));
    let mut results = Vec::new();
    let mut digits = vec![0usize; options.len()];
    'outer: while results.len() < max_choices {
        let mut tape = BTreeMap::new();
        for (k, &p) in cells.iter().enumerate() {
            let s = options[k][digits[k]];
            if s != blank {
                tape.insert(p, s);
            }
        }
        results.push(tape);
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < options[k].len() {
                continue 'outer;
            }
            digits[k] = 0;
        }
        break;
    }
    let truncated = BigUint::from(results.len()) < total;
    ResultSet { cells, results, total, truncated }
}

/// An unreduced acceptance ratio `accepting / total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub accepting: usize,
    pub total: usize,
}

impl Fraction {
    pub fn is_unanimous_accept(&self) -> bool {
        self.total > 0 && self.accepting == self.total
    }

    pub fn is_unanimous_reject(&self) -> bool {
        self.accepting == 0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.accepting, self.total)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AcceptanceError {
    #[error("machine declares no accepting state")]
    NoAccept,
    #[error("machine declares no rejecting state")]
    NoReject,
}

pub(crate) fn distinguished(machine: &Machine) -> Result<StateId, AcceptanceError> {
    let y = machine.accept_state().ok_or(AcceptanceError::NoAccept)?;
    machine.reject_state().ok_or(AcceptanceError::NoReject)?;
    Ok(y)
}

/// Accepting active pairs over all active pairs.
pub fn partm_acceptance(machine: &Machine, config: &ParConfig) -> Result<Fraction, AcceptanceError> {
    let y = distinguished(machine)?;
    Ok(Fraction { accepting: config.active.iter().filter(|(q, _)| *q == y).count(), total: config.active.len() })
}
