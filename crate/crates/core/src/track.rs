//! Compilation of a paraconsistent machine into a deterministic machine over
//! tuple symbols.
//!
//! The deterministic machine sees its tape as `2n + m` parallel tracks for a
//! source machine with `n` states and `m` symbols:
//!
//! * tracks `1..=n` hold a 1 where a state is active at that cell,
//! * tracks `n+1..=n+m` hold the symbol set of the cell,
//! * tracks `n+m+1..=2n+m` are scratch space for the next active states.
//!
//! The live window is bracketed by two delimiter cells whose first track
//! shows `$`. One source step takes one cycle of four sweeps: right moves
//! (left to right), left moves (right to left), writes (left to right), and
//! copying scratch into the state tracks (right to left). A move that lands
//! on a delimiter pushes that delimiter one cell outwards.
//!
//! Control states are generated on demand while the machine runs, so only
//! the reachable part of the (exponential) state space is ever built.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::classical::{dtm_run_from, ClassicalConfig};
use crate::machine::{Action, Machine, MachineBuilder, StateId, SymbolId};
use crate::paraconsistent::{partm_run, ParConfig};

/// One tape cell of the compiled machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    /// Delimiter flag, shown as `$` on track 1.
    pub delim: bool,
    pub states: u64,
    pub syms: u64,
    pub scratch: u64,
}

impl Tuple {
    fn blank_cell(blank: SymbolId) -> Tuple {
        Tuple { delim: false, states: 0, syms: 1 << blank.0, scratch: 0 }
    }

    fn delimiter(blank: SymbolId) -> Tuple {
        Tuple { delim: true, ..Tuple::blank_cell(blank) }
    }

    /// Renders the tuple as `<b1b2…bk>`.
    pub fn render(&self, n: usize, m: usize) -> String {
        let bit = |word: u64, k: usize| if word >> k & 1 == 1 { '1' } else { '0' };
        let mut s = String::with_capacity(2 * n + m + 2);
        s.push('<');
        for k in 0..n {
            s.push(if k == 0 && self.delim { '$' } else { bit(self.states, k) });
        }
        for k in 0..m {
            s.push(bit(self.syms, k));
        }
        for k in 0..n {
            s.push(bit(self.scratch, k));
        }
        s.push('>');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Phase {
    Begin,
    Right,
    RightAdv,
    RelocRight,
    MarkRight,
    EnterLeft,
    Left,
    LeftAdv,
    RelocLeft,
    MarkLeft,
    EnterWrite,
    Write,
    WriteAdv,
    Copy,
    CopyAdv,
    Search,
    Accept,
    Reject,
}

impl Phase {
    fn tag(self) -> &'static str {
        match self {
            Phase::Begin => "begin",
            Phase::Right => "s1",
            Phase::RightAdv => "s1w",
            Phase::RelocRight => "s1r",
            Phase::MarkRight => "s1d",
            Phase::EnterLeft => "s2e",
            Phase::Left => "s2",
            Phase::LeftAdv => "s2w",
            Phase::RelocLeft => "s2r",
            Phase::MarkLeft => "s2d",
            Phase::EnterWrite => "s3e",
            Phase::Write => "s3",
            Phase::WriteAdv => "s3w",
            Phase::Copy => "s4",
            Phase::CopyAdv => "s4w",
            Phase::Search => "s5",
            Phase::Accept => "accept",
            Phase::Reject => "reject",
        }
    }

    /// Sweep number (1–5) this phase belongs to; 0 for terminal states.
    pub fn scan(self) -> u8 {
        match self {
            Phase::Begin | Phase::Right | Phase::RightAdv | Phase::RelocRight | Phase::MarkRight => 1,
            Phase::EnterLeft | Phase::Left | Phase::LeftAdv | Phase::RelocLeft | Phase::MarkLeft => 2,
            Phase::EnterWrite | Phase::Write | Phase::WriteAdv => 3,
            Phase::Copy | Phase::CopyAdv => 4,
            Phase::Search => 5,
            Phase::Accept | Phase::Reject => 0,
        }
    }
}

/// Finite control of the compiled machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Control {
    phase: Phase,
    /// States travelling with the head to the next cell.
    carry: u64,
    /// More than one active pair in the current source configuration.
    multi: bool,
    /// Some move fires this step.
    moved: bool,
    /// Number of cells with a write firing, saturated at 2; reused as the
    /// active pair counter during the copy sweep.
    count: u8,
}

impl Control {
    fn begin(multi: bool) -> Control {
        Control { phase: Phase::Begin, carry: 0, multi, moved: false, count: 0 }
    }

    fn with(self, phase: Phase) -> Control {
        Control { phase, ..self }
    }

    fn name(&self, n: usize) -> String {
        let bits: String = (0..n).map(|k| if self.carry >> k & 1 == 1 { '1' } else { '0' }).collect();
        format!("{}.c{}.m{}.v{}.w{}", self.phase.tag(), bits, u8::from(self.multi), u8::from(self.moved), self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Write(Tuple),
    Right,
    Left,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("source machine has {0} states or symbols; at most 64 are supported")]
    TooLarge(usize),
    #[error("control state cap of {0} exceeded")]
    StateCap(usize),
    #[error("malformed snapshot: {0}")]
    Malformed(String),
    #[error("cycle {cycle} did not finish within {limit} steps")]
    Runaway { cycle: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Add the final sweep that looks for the accepting state after halting.
    pub acceptance_scan: bool,
    pub max_control_states: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { acceptance_scan: false, max_control_states: 100_000 }
    }
}

/// A lazily generated deterministic machine simulating `source`.
#[derive(Debug, Clone)]
pub struct TrackDtm {
    source: Machine,
    opts: CompileOptions,
    n: usize,
    m: usize,
    controls: Vec<Control>,
    control_ids: HashMap<Control, StateId>,
    tuples: Vec<Tuple>,
    tuple_ids: HashMap<Tuple, SymbolId>,
    delta: HashMap<(StateId, SymbolId), Option<(Action, StateId)>>,
}

/// Compiles `machine`; transitions are produced as they are needed.
pub fn compile_partm_to_dtm(machine: &Machine, opts: CompileOptions) -> Result<TrackDtm, CompileError> {
    let n = machine.states().len();
    let m = machine.alphabet().len();
    if n > 64 || m > 64 {
        return Err(CompileError::TooLarge(n.max(m)));
    }
    let mut t = TrackDtm {
        source: machine.clone(),
        opts,
        n,
        m,
        controls: Vec::new(),
        control_ids: HashMap::new(),
        tuples: Vec::new(),
        tuple_ids: HashMap::new(),
        delta: HashMap::new(),
    };
    t.tuple_id(Tuple::blank_cell(machine.blank()));
    t.tuple_id(Tuple::delimiter(machine.blank()));
    t.control_id(Control::begin(false))?;
    Ok(t)
}

impl TrackDtm {
    /// Number of tracks, `2n + m`.
    pub fn width(&self) -> usize {
        2 * self.n + self.m
    }

    pub fn source(&self) -> &Machine {
        &self.source
    }

    pub fn control_states(&self) -> usize {
        self.controls.len()
    }

    pub fn tuple_symbols(&self) -> usize {
        self.tuples.len()
    }

    pub fn tuple(&self, id: SymbolId) -> Tuple {
        self.tuples[id.0]
    }

    /// Sweep number of a control state (see [`Phase::scan`]).
    pub fn scan_of(&self, id: StateId) -> u8 {
        self.controls[id.0].phase.scan()
    }

    pub fn is_cycle_start(&self, id: StateId) -> bool {
        self.controls[id.0].phase == Phase::Begin
    }

    /// The blank tuple: no states, the source blank, no scratch marks.
    pub fn blank(&self) -> SymbolId {
        SymbolId(0)
    }

    fn tuple_id(&mut self, t: Tuple) -> SymbolId {
        if let Some(&id) = self.tuple_ids.get(&t) {
            return id;
        }
        self.tuples.push(t);
        let id = SymbolId(self.tuples.len() - 1);
        self.tuple_ids.insert(t, id);
        id
    }

    fn control_id(&mut self, c: Control) -> Result<StateId, CompileError> {
        if let Some(&id) = self.control_ids.get(&c) {
            return Ok(id);
        }
        if self.controls.len() >= self.opts.max_control_states {
            return Err(CompileError::StateCap(self.opts.max_control_states));
        }
        self.controls.push(c);
        let id = StateId(self.controls.len() - 1);
        self.control_ids.insert(c, id);
        Ok(id)
    }

    /// Encodes a source configuration as a tape of the compiled machine,
    /// with the head on the first cell inside the window.
    pub fn encode(&mut self, config: &ParConfig) -> Result<(StateId, ClassicalConfig), CompileError> {
        let blank = self.source.blank();
        let (lo, hi) = config.span().unwrap_or((0, 0));
        let mut tape = ClassicalConfig { state: StateId(0), position: lo, tape: Default::default() };
        for x in lo..=hi {
            let mut t = Tuple::blank_cell(blank);
            t.syms = config.cell(x, blank).iter().fold(0, |acc, s| acc | 1 << s.0);
            t.states = config.active.iter().filter(|a| a.1 == x).fold(0, |acc, a| acc | 1 << a.0 .0);
            let id = self.tuple_id(t);
            tape.set(x, id, self.blank());
        }
        let d = self.tuple_id(Tuple::delimiter(blank));
        tape.set(lo - 1, d, self.blank());
        tape.set(hi + 1, d, self.blank());
        let start = self.control_id(Control::begin(config.active.len() > 1))?;
        tape.state = start;
        Ok((start, tape))
    }

    /// Reads a source configuration back from a tape taken at a cycle
    /// boundary.
    pub fn decode(&self, tape: &ClassicalConfig) -> Result<ParConfig, CompileError> {
        let delims: Vec<i64> = tape.tape.iter().filter(|(_, s)| self.tuples[s.0].delim).map(|(&p, _)| p).collect();
        let [dl, dr] = delims.as_slice() else {
            return Err(CompileError::Malformed(format!("expected 2 delimiters, found {}", delims.len())));
        };
        let mut out = ParConfig { active: BTreeSet::new(), tape: Default::default() };
        for x in dl + 1..*dr {
            let t = self.tuples[tape.read(x, self.blank()).0];
            if t.scratch != 0 {
                return Err(CompileError::Malformed(format!("scratch tracks set at cell {x}")));
            }
            if t.syms == 0 {
                return Err(CompileError::Malformed(format!("empty symbol set at cell {x}")));
            }
            for k in 0..self.n {
                if t.states >> k & 1 == 1 {
                    out.active.insert((StateId(k), x));
                }
            }
            let syms = (0..self.m).filter(|k| t.syms >> k & 1 == 1).map(SymbolId).collect();
            out.set_cell(x, syms, self.source.blank());
        }
        Ok(out)
    }

    fn firings(&self, t: &Tuple, multi: bool) -> impl Iterator<Item = usize> + '_ {
        let several = t.syms.count_ones() > 1;
        let (states, syms) = (t.states, t.syms);
        self.source.instructions().iter().enumerate().filter_map(move |(k, i)| {
            let on = states >> i.head_state.0 & 1 == 1 && syms >> i.scan_symbol.0 & 1 == 1;
            let ok = (!i.head_incons || multi) && (!i.scan_incons || several);
            (on && ok).then_some(k)
        })
    }

    fn transition(&self, c: Control, t: Tuple) -> Option<(Op, Control)> {
        let blank = self.source.blank();
        let insts = self.source.instructions();
        let normal_with_scratch = |scratch: u64| Tuple { scratch, ..Tuple::blank_cell(blank) };
        let fresh = |phase| Control { phase, carry: 0, multi: c.multi, moved: c.moved, count: c.count };
        let step = |phase_adv: Phase, phase: Phase, new: Tuple, next: Control, dir: Op| {
            if new != t {
                Some((Op::Write(new), next.with(phase_adv)))
            } else {
                Some((dir, next.with(phase)))
            }
        };
        match c.phase {
            Phase::Begin | Phase::Right => {
                if t.delim {
                    if c.carry != 0 {
                        return Some((Op::Write(normal_with_scratch(c.carry)), fresh(Phase::RelocRight)));
                    }
                    if !c.moved && c.count == 0 {
                        let search = self.opts.acceptance_scan && self.source.accept_state().is_some();
                        return search.then_some((Op::Left, Control { phase: Phase::Search, ..Control::begin(false) }));
                    }
                    return Some((Op::Left, fresh(Phase::Left)));
                }
                let mut next = Control { phase: Phase::Right, carry: 0, ..c };
                let mut writes = false;
                for k in self.firings(&t, c.multi) {
                    match insts[k].action {
                        Action::Right => {
                            next.carry |= 1 << insts[k].next_state.0;
                            next.moved = true;
                        }
                        Action::Left => next.moved = true,
                        Action::Write(_) => writes = true,
                    }
                }
                if writes {
                    next.count = (next.count + 1).min(2);
                }
                let new = Tuple { scratch: t.scratch | c.carry, ..t };
                step(Phase::RightAdv, Phase::Right, new, next, Op::Right)
            }
            Phase::RightAdv => Some((Op::Right, c.with(Phase::Right))),
            Phase::RelocRight => Some((Op::Right, c.with(Phase::MarkRight))),
            Phase::MarkRight => Some((Op::Write(Tuple::delimiter(blank)), c.with(Phase::EnterLeft))),
            Phase::EnterLeft => Some((Op::Left, c.with(Phase::Left))),
            Phase::Left => {
                if t.delim {
                    if c.carry != 0 {
                        return Some((Op::Write(normal_with_scratch(c.carry)), fresh(Phase::RelocLeft)));
                    }
                    return Some((Op::Right, fresh(Phase::Write)));
                }
                let mut next = Control { carry: 0, ..c };
                for k in self.firings(&t, c.multi) {
                    if insts[k].action == Action::Left {
                        next.carry |= 1 << insts[k].next_state.0;
                    }
                }
                let new = Tuple { scratch: t.scratch | c.carry, ..t };
                step(Phase::LeftAdv, Phase::Left, new, next, Op::Left)
            }
            Phase::LeftAdv => Some((Op::Left, c.with(Phase::Left))),
            Phase::RelocLeft => Some((Op::Left, c.with(Phase::MarkLeft))),
            Phase::MarkLeft => Some((Op::Write(Tuple::delimiter(blank)), c.with(Phase::EnterWrite))),
            Phase::EnterWrite => Some((Op::Right, c.with(Phase::Write))),
            Phase::Write => {
                if t.delim {
                    let next = Control { phase: Phase::Copy, carry: 0, multi: false, moved: false, count: 0 };
                    return Some((Op::Left, next));
                }
                let mut written = 0u64;
                let mut targets = 0u64;
                for k in self.firings(&t, c.multi) {
                    if let Action::Write(s) = insts[k].action {
                        written |= 1 << s.0;
                        targets |= 1 << insts[k].next_state.0;
                    }
                }
                let mut new = t;
                if written != 0 {
                    let carried = c.moved || c.count >= 2;
                    new.syms = written | if carried { t.syms } else { 0 };
                    new.scratch |= targets;
                }
                step(Phase::WriteAdv, Phase::Write, new, c, Op::Right)
            }
            Phase::WriteAdv => Some((Op::Right, c.with(Phase::Write))),
            Phase::Copy => {
                if t.delim {
                    return Some((Op::Right, Control::begin(c.count >= 2)));
                }
                let count = (u32::from(c.count) + t.scratch.count_ones()).min(2) as u8;
                let next = Control { count, ..c };
                let new = Tuple { states: t.scratch, scratch: 0, ..t };
                step(Phase::CopyAdv, Phase::Copy, new, next, Op::Left)
            }
            Phase::CopyAdv => Some((Op::Left, c.with(Phase::Copy))),
            Phase::Search => {
                let y = self.source.accept_state().map_or(0, |q| 1u64 << q.0);
                if t.delim {
                    Some((Op::Write(t), c.with(Phase::Reject)))
                } else if t.states & y != 0 {
                    Some((Op::Write(t), c.with(Phase::Accept)))
                } else {
                    Some((Op::Left, c))
                }
            }
            Phase::Accept | Phase::Reject => None,
        }
    }

    /// Transition of the compiled machine, generating it if needed.
    pub fn delta(&mut self, state: StateId, symbol: SymbolId) -> Result<Option<(Action, StateId)>, CompileError> {
        if let Some(&d) = self.delta.get(&(state, symbol)) {
            return Ok(d);
        }
        let c = self.controls[state.0];
        let t = self.tuples[symbol.0];
        let out = match self.transition(c, t) {
            None => None,
            Some((op, next)) => {
                let action = match op {
                    Op::Write(w) => Action::Write(self.tuple_id(w)),
                    Op::Right => Action::Right,
                    Op::Left => Action::Left,
                };
                Some((action, self.control_id(next)?))
            }
        };
        self.delta.insert((state, symbol), out);
        Ok(out)
    }

    /// Executes one step on `cfg`, whose `state` is a control state of this
    /// machine. Returns `None` on halting, otherwise whether the step was
    /// spent on a delimiter cell.
    pub fn step(&mut self, cfg: &mut ClassicalConfig) -> Result<Option<bool>, CompileError> {
        let sym = cfg.read(cfg.position, self.blank());
        let Some((action, next)) = self.delta(cfg.state, sym)? else {
            return Ok(None);
        };
        let phase = self.controls[cfg.state.0].phase;
        let on_delim = self.tuples[sym.0].delim
            || matches!(phase, Phase::RelocRight | Phase::MarkRight | Phase::RelocLeft | Phase::MarkLeft);
        if let Action::Write(w) = action {
            cfg.set(cfg.position, w, self.blank());
        }
        cfg.position = match action {
            Action::Right => cfg.position + 1,
            Action::Left => cfg.position - 1,
            Action::Write(_) => cfg.position,
        };
        cfg.state = next;
        Ok(Some(on_delim))
    }

    /// `Some(true)` / `Some(false)` once the acceptance sweep has decided.
    pub fn verdict(&self, state: StateId) -> Option<bool> {
        match self.controls[state.0].phase {
            Phase::Accept => Some(true),
            Phase::Reject => Some(false),
            _ => None,
        }
    }

    /// The explored part of the compiled machine as an ordinary machine.
    /// State and symbol ids coincide with the ones used by this compiler.
    pub fn to_machine(&self) -> Machine {
        let mut b = MachineBuilder::new(format!("{}_dtm", self.source.name()));
        for t in &self.tuples {
            b.symbol(&t.render(self.n, self.m));
        }
        for c in &self.controls {
            b.state(&c.name(self.n));
        }
        b.blank(&self.tuples[0].render(self.n, self.m));
        b.start(&self.controls[0].name(self.n), 0);
        if self.opts.acceptance_scan {
            if let Some(&id) = self.control_ids.get(&Control::begin(false).with(Phase::Accept)) {
                b.accept(&self.controls[id.0].name(self.n));
            }
        }
        let mut keys: Vec<_> = self.delta.iter().filter_map(|(k, v)| v.map(|v| (*k, v))).collect();
        keys.sort();
        for ((q, s), (action, next)) in keys {
            b.push(crate::machine::Instruction {
                head_state: q,
                head_incons: false,
                scan_symbol: s,
                scan_incons: false,
                action,
                next_state: next,
            });
        }
        b.build().expect("generated machine is well formed")
    }
}

/// Outcome of running the compiled machine in lock step with the source.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub tracks: usize,
    /// Decoded configuration at every cycle boundary, starting with the
    /// encoded input.
    pub decoded: Vec<ParConfig>,
    pub matched: Vec<bool>,
    pub first_mismatch: Option<usize>,
    /// Steps of the compiled machine for each simulated source step.
    pub steps_per_cycle: Vec<usize>,
    /// The same counts without steps spent on delimiter cells.
    pub adjusted_steps_per_cycle: Vec<usize>,
    /// Steps of the final sweep that detects halting (0 if the source did
    /// not halt).
    pub halting_steps: usize,
    pub source_halted: bool,
    pub compiled_halted: bool,
    /// Width of the initial window including both delimiters.
    pub initial_width: usize,
    /// Fitted linear bound `steps[t] <= c * t + d` (cycles indexed from 0).
    pub fit_c: usize,
    pub fit_d: usize,
    /// Smallest `c'` with `sum(steps[0..t]) <= c' * t^2` for all `t >= 1`.
    pub quadratic_c: f64,
    /// Every cycle respects `16 t + 8 w0 + 26`, the bound that follows from
    /// four sweeps of at most two steps per cell over a window that grows by
    /// at most two cells per cycle.
    pub analytic_ok: bool,
    pub control_states: usize,
    pub tuple_symbols: usize,
    /// Rerunning the materialized machine with the generic deterministic
    /// engine reproduces the final tape.
    pub materialized_agrees: bool,
    /// Result of the acceptance sweep, when it ran.
    pub verdict: Option<bool>,
}

impl EquivalenceReport {
    pub fn all_matched(&self) -> bool {
        self.first_mismatch.is_none() && self.source_halted == self.compiled_halted
    }

    pub fn total_steps(&self) -> usize {
        self.steps_per_cycle.iter().sum::<usize>() + self.halting_steps
    }
}

fn analytic_bound(t: usize, w0: usize) -> usize {
    16 * t + 8 * w0 + 26
}

/// Simulates `steps` source steps (or until the source halts) on both the
/// paraconsistent engine and the compiled machine and compares them.
pub fn simulate_and_compare(
    machine: &Machine,
    input: &[SymbolId],
    steps: usize,
    opts: CompileOptions,
) -> Result<EquivalenceReport, CompileError> {
    let par = partm_run(machine, input, steps);
    let mut dtm = compile_partm_to_dtm(machine, opts)?;
    let (_, mut cfg) = dtm.encode(&par.configs[0])?;
    let initial = cfg.clone();
    let (lo, hi) = par.configs[0].span().unwrap_or((0, 0));
    let w0 = (hi - lo + 3) as usize;

    let mut decoded = vec![dtm.decode(&cfg)?];
    let mut steps_per_cycle = Vec::new();
    let mut adjusted = Vec::new();
    let mut halting_steps = 0;
    let mut compiled_halted = false;
    let mut total = 0usize;
    while steps_per_cycle.len() < par.firings.len() + usize::from(par.halted) {
        let cycle = steps_per_cycle.len();
        let limit = analytic_bound(cycle, w0) * 4 + 64;
        let (mut raw, mut delim) = (0usize, 0usize);
        loop {
            let Some(on_delim) = dtm.step(&mut cfg)? else {
                compiled_halted = true;
                break;
            };
            delim += usize::from(on_delim);
            raw += 1;
            total += 1;
            if dtm.is_cycle_start(cfg.state) {
                break;
            }
            if raw > limit {
                return Err(CompileError::Runaway { cycle, limit });
            }
        }
        if compiled_halted {
            halting_steps = raw;
            break;
        }
        steps_per_cycle.push(raw);
        adjusted.push(raw - delim);
        decoded.push(dtm.decode(&cfg)?);
    }

    let matched: Vec<bool> = decoded.iter().zip(&par.configs).map(|(d, p)| d == p).collect();
    let mut first_mismatch = matched.iter().position(|m| !m);
    if first_mismatch.is_none() && decoded.len() != par.configs.len() {
        first_mismatch = Some(decoded.len().min(par.configs.len()));
    }

    let fit_d = steps_per_cycle.first().copied().unwrap_or(0);
    let fit_c = steps_per_cycle
        .iter()
        .enumerate()
        .skip(1)
        .map(|(t, &s)| s.saturating_sub(fit_d).div_ceil(t))
        .max()
        .unwrap_or(0);
    let mut acc = 0usize;
    let mut quadratic_c = 0f64;
    for (t, &s) in steps_per_cycle.iter().enumerate() {
        acc += s;
        let tt = (t + 1) as f64;
        quadratic_c = quadratic_c.max(acc as f64 / (tt * tt));
    }
    let analytic_ok = steps_per_cycle.iter().enumerate().all(|(t, &s)| s <= analytic_bound(t, w0));

    let materialized = dtm.to_machine();
    let materialized_agrees = match dtm_run_from(&materialized, initial, total) {
        Ok(run) => run.last() == &cfg && run.halted == compiled_halted,
        Err(_) => false,
    };

    Ok(EquivalenceReport {
        tracks: dtm.width(),
        decoded,
        matched,
        first_mismatch,
        steps_per_cycle,
        adjusted_steps_per_cycle: adjusted,
        halting_steps,
        source_halted: par.halted,
        compiled_halted,
        initial_width: w0,
        fit_c,
        fit_d,
        quadratic_c,
        analytic_ok,
        control_states: dtm.control_states(),
        tuple_symbols: dtm.tuple_symbols(),
        materialized_agrees,
        verdict: dtm.verdict(cfg.state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example1_has_fourteen_tracks() {
        let t = compile_partm_to_dtm(&fixtures::example1(), CompileOptions::default()).unwrap();
        assert_eq!(t.width(), 14);
    }

    #[test]
    fn example1_matches_every_cycle() {
        let m = fixtures::example1();
        let r = simulate_and_compare(&m, &m.parse_input("0").unwrap(), 20, CompileOptions::default()).unwrap();
        assert!(r.all_matched(), "{r:?}");
        assert_eq!(r.steps_per_cycle.len(), 4);
        assert!(r.source_halted && r.compiled_halted);
        assert!(r.analytic_ok);
        assert!(r.materialized_agrees);
    }

    #[test]
    fn zero_steps_is_trivial() {
        let m = fixtures::example1();
        let r = simulate_and_compare(&m, &m.parse_input("0").unwrap(), 0, CompileOptions::default()).unwrap();
        assert_eq!(r.matched, vec![true]);
        assert_eq!(r.total_steps(), 0);
    }

    #[test]
    fn decode_of_direct_tuple() {
        let m = fixtures::example1();
        let mut t = compile_partm_to_dtm(&m, CompileOptions::default()).unwrap();
        let tuple = Tuple { delim: false, states: 1 << 2, syms: 1 << 1, scratch: 0 };
        let id = t.tuple_id(tuple);
        let d = t.tuple_id(Tuple::delimiter(m.blank()));
        let mut tape = ClassicalConfig { state: StateId(0), position: 0, tape: Default::default() };
        tape.set(-1, d, SymbolId(0));
        tape.set(0, id, SymbolId(0));
        tape.set(1, d, SymbolId(0));
        let c = t.decode(&tape).unwrap();
        assert_eq!(c.active, BTreeSet::from([(StateId(2), 0)]));
        assert_eq!(c.cell(0, m.blank()), BTreeSet::from([SymbolId(1)]));
    }

    #[test]
    fn decode_rejects_dirty_scratch() {
        let m = fixtures::example1();
        let mut t = compile_partm_to_dtm(&m, CompileOptions::default()).unwrap();
        let id = t.tuple_id(Tuple { delim: false, states: 0, syms: 1, scratch: 1 });
        let d = t.tuple_id(Tuple::delimiter(m.blank()));
        let mut tape = ClassicalConfig { state: StateId(0), position: 0, tape: Default::default() };
        tape.set(-1, d, SymbolId(0));
        tape.set(0, id, SymbolId(0));
        tape.set(1, d, SymbolId(0));
        assert!(matches!(t.decode(&tape), Err(CompileError::Malformed(_))));
    }

    #[test]
    fn single_writer_halts_next_cycle() {
        let mut b = MachineBuilder::new("w");
        b.blank("_").start("q", 0);
        b.write("q", "_", "1", "q");
        let m = b.build().unwrap();
        let r = simulate_and_compare(&m, &[], 10, CompileOptions::default()).unwrap();
        assert!(r.all_matched());
        assert_eq!(r.steps_per_cycle.len(), 1);
        assert!(r.compiled_halted && r.halting_steps > 0);
    }

    #[test]
    fn rendered_machine_parses_back() {
        let m = fixtures::example1();
        let mut t = compile_partm_to_dtm(&m, CompileOptions::default()).unwrap();
        let (s, cfg) = t.encode(&ParConfig::initial(&m, &m.parse_input("0").unwrap())).unwrap();
        t.delta(s, cfg.read(cfg.position, SymbolId(0))).unwrap();
        let dm = t.to_machine();
        let text = crate::dsl::serialize(&dm);
        assert!(text.contains("<$"));
        assert_eq!(crate::dsl::parse_machine(&text).unwrap(), dm);
    }

    fn compile_and_explore(m: &Machine, opts: CompileOptions) -> Machine {
        let mut t = compile_partm_to_dtm(m, opts).unwrap();
        let (_, mut cfg) = t.encode(&ParConfig::initial(m, &[])).unwrap();
        while t.step(&mut cfg).unwrap().is_some() {}
        t.to_machine()
    }

    #[test]
    fn acceptance_scan_finds_accepting_state() {
        let mut b = MachineBuilder::new("acc");
        b.blank("_").start("s", 0).accept("y").reject("n");
        b.right("s", "_", "y");
        b.right("s", "_", "n");
        let m = b.build().unwrap();
        let opts = CompileOptions { acceptance_scan: true, ..Default::default() };
        let r = simulate_and_compare(&m, &[], 5, opts).unwrap();
        assert!(r.all_matched());
        assert_eq!(r.verdict, Some(true));
        assert!(r.materialized_agrees);
        let dm = compile_and_explore(&m, opts);
        assert!(dm.accept_state().is_some());

        let mut b = MachineBuilder::new("rej");
        b.blank("_").start("s", 0).accept("y").reject("n");
        b.right("s", "_", "n");
        let m = b.build().unwrap();
        let r = simulate_and_compare(&m, &[], 5, opts).unwrap();
        assert_eq!(r.verdict, Some(false));
    }
}
