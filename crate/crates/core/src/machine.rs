//! Machine data model: states, symbols, quadruple instructions and the
//! static determinism/ambiguity analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Index of a state in its machine's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of a symbol in its machine's alphabet declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Write(SymbolId),
    Right,
    Left,
}

impl Action {
    pub fn is_move(&self) -> bool {
        !matches!(self, Action::Write(_))
    }
}

/// A quadruple `q s op q'`, optionally carrying inconsistency marks on the
/// head state (`q^`) or on the scanned symbol (`s^`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instruction {
    pub head_state: StateId,
    pub head_incons: bool,
    pub scan_symbol: SymbolId,
    pub scan_incons: bool,
    pub action: Action,
    pub next_state: StateId,
}

impl Instruction {
    pub fn has_marks(&self) -> bool {
        self.head_incons || self.scan_incons
    }

    /// Position reached after executing this instruction from `pos`.
    pub fn target(&self, pos: i64) -> i64 {
        match self.action {
            Action::Write(_) => pos,
            Action::Right => pos + 1,
            Action::Left => pos - 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate state `{name}`")]
    DuplicateState { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate symbol `{name}`")]
    DuplicateSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undeclared state `{name}`")]
    UndeclaredState { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undeclared symbol `{name}`")]
    UndeclaredSymbol { line: usize, col: usize, name: String },
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("accept and reject state are both `{0}`")]
    AcceptIsReject(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("input symbol `{0}` is not in the alphabet")]
    InputSymbol(String),
}

/// Returns true when `tok` may be used as a state or symbol name.
pub fn is_identifier(tok: &str) -> bool {
    !tok.is_empty()
        && tok != "->"
        && !tok
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '#' | '^' | ',' | '(' | ')' | '@' | ':'))
}

/// An immutable machine description. Construct one with [`MachineBuilder`]
/// or by parsing the text format (see [`crate::dsl`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    name: String,
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: SymbolId,
    instructions: Vec<Instruction>,
    start_state: StateId,
    start_position: i64,
    accept_state: Option<StateId>,
    reject_state: Option<StateId>,
    by_head: BTreeMap<(StateId, SymbolId), Vec<usize>>,
}

impl Machine {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn start_state(&self) -> StateId {
        self.start_state
    }

    pub fn start_position(&self) -> i64 {
        self.start_position
    }

    pub fn accept_state(&self) -> Option<StateId> {
        self.accept_state
    }

    pub fn reject_state(&self) -> Option<StateId> {
        self.reject_state
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.0]
    }

    pub fn symbol_name(&self, id: SymbolId) -> &str {
        &self.alphabet[id.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.alphabet.iter().position(|s| s == name).map(SymbolId)
    }

    pub fn has_marks(&self) -> bool {
        self.instructions.iter().any(Instruction::has_marks)
    }

    /// Instructions whose head is `(state, symbol)`, in declaration order,
    /// regardless of inconsistency marks.
    pub fn matching(&self, state: StateId, symbol: SymbolId) -> &[usize] {
        self.by_head.get(&(state, symbol)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Head pairs `(q, s)` that appear in some instruction, deduplicated, in
    /// first-occurrence order.
    pub fn head_pairs(&self) -> Vec<(StateId, SymbolId)> {
        let mut seen = BTreeSet::new();
        self.instructions.iter().map(|i| (i.head_state, i.scan_symbol)).filter(|p| seen.insert(*p)).collect()
    }

    /// Splits an input string into symbols. Whitespace-separated tokens are
    /// used when the string contains whitespace; otherwise every character is
    /// one symbol.
    pub fn parse_input(&self, input: &str) -> Result<Vec<SymbolId>, MachineError> {
        let tokens: Vec<String> = if input.chars().any(char::is_whitespace) {
            input.split_whitespace().map(str::to_owned).collect()
        } else {
            input.chars().map(String::from).collect()
        };
        tokens.into_iter().map(|t| self.symbol_id(&t).ok_or(MachineError::InputSymbol(t))).collect()
    }

    /// Copy of this machine with a different start state and position.
    pub fn with_start(&self, state: StateId, position: i64) -> Machine {
        let mut m = self.clone();
        m.start_state = state;
        m.start_position = position;
        m
    }

    /// Copy of this machine with every inconsistency mark removed.
    pub fn without_marks(&self) -> Machine {
        let mut b = MachineBuilder::from_machine(self);
        for inst in &mut b.instructions {
            inst.head_incons = false;
            inst.scan_incons = false;
        }
        b.build().expect("unmarking preserves well-formedness")
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::serialize(self))
    }
}

/// Incremental construction of a [`Machine`]; states and symbols are
/// declared on first use.
#[derive(Debug, Clone)]
pub struct MachineBuilder {
    name: String,
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: Option<SymbolId>,
    instructions: Vec<Instruction>,
    start: Option<(StateId, i64)>,
    accept: Option<StateId>,
    reject: Option<StateId>,
}

impl MachineBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        MachineBuilder {
            name: name.into(),
            states: Vec::new(),
            alphabet: Vec::new(),
            blank: None,
            instructions: Vec::new(),
            start: None,
            accept: None,
            reject: None,
        }
    }

    pub fn from_machine(m: &Machine) -> Self {
        MachineBuilder {
            name: m.name.clone(),
            states: m.states.clone(),
            alphabet: m.alphabet.clone(),
            blank: Some(m.blank),
            instructions: m.instructions.clone(),
            start: Some((m.start_state, m.start_position)),
            accept: m.accept_state,
            reject: m.reject_state,
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        match self.states.iter().position(|s| s == name) {
            Some(i) => StateId(i),
            None => {
                self.states.push(name.to_owned());
                StateId(self.states.len() - 1)
            }
        }
    }

    pub fn symbol(&mut self, name: &str) -> SymbolId {
        match self.alphabet.iter().position(|s| s == name) {
            Some(i) => SymbolId(i),
            None => {
                self.alphabet.push(name.to_owned());
                SymbolId(self.alphabet.len() - 1)
            }
        }
    }

    pub fn blank(&mut self, name: &str) -> &mut Self {
        let id = self.symbol(name);
        self.blank = Some(id);
        self
    }

    pub fn start(&mut self, state: &str, position: i64) -> &mut Self {
        let id = self.state(state);
        self.start = Some((id, position));
        self
    }

    pub fn accept(&mut self, state: &str) -> &mut Self {
        let id = self.state(state);
        self.accept = Some(id);
        self
    }

    pub fn reject(&mut self, state: &str) -> &mut Self {
        let id = self.state(state);
        self.reject = Some(id);
        self
    }

    pub fn push(&mut self, inst: Instruction) -> &mut Self {
        self.instructions.push(inst);
        self
    }

    /// Adds `head scan -> write sym, next`.
    pub fn write(&mut self, head: &str, scan: &str, sym: &str, next: &str) -> &mut Self {
        let w = self.symbol(sym);
        self.add(head, false, scan, false, Action::Write(w), next)
    }

    pub fn right(&mut self, head: &str, scan: &str, next: &str) -> &mut Self {
        self.add(head, false, scan, false, Action::Right, next)
    }

    pub fn left(&mut self, head: &str, scan: &str, next: &str) -> &mut Self {
        self.add(head, false, scan, false, Action::Left, next)
    }

    pub fn add(
        &mut self,
        head: &str,
        head_incons: bool,
        scan: &str,
        scan_incons: bool,
        action: Action,
        next: &str,
    ) -> &mut Self {
        let head_state = self.state(head);
        let scan_symbol = self.symbol(scan);
        let next_state = self.state(next);
        self.instructions.push(Instruction { head_state, head_incons, scan_symbol, scan_incons, action, next_state });
        self
    }

    pub fn build(&self) -> Result<Machine, MachineError> {
        for name in self.states.iter().chain(&self.alphabet) {
            if !is_identifier(name) {
                return Err(MachineError::BadIdentifier(name.clone()));
            }
        }
        let blank = self.blank.ok_or(MachineError::MissingDirective("blank"))?;
        let (start_state, start_position) = self.start.ok_or(MachineError::MissingDirective("start"))?;
        if let (Some(a), Some(r)) = (self.accept, self.reject) {
            if a == r {
                return Err(MachineError::AcceptIsReject(self.states[a.0].clone()));
            }
        }
        let mut by_head: BTreeMap<(StateId, SymbolId), Vec<usize>> = BTreeMap::new();
        for (k, inst) in self.instructions.iter().enumerate() {
            by_head.entry((inst.head_state, inst.scan_symbol)).or_default().push(k);
        }
        Ok(Machine {
            name: self.name.clone(),
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            blank,
            instructions: self.instructions.clone(),
            start_state,
            start_position,
            accept_state: self.accept,
            reject_state: self.reject,
            by_head,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub deterministic: bool,
    /// Maximal groups (0-based instruction indices) sharing a head pair,
    /// ignoring marks.
    pub ambiguous_groups: Vec<Vec<usize>>,
    pub uses_incons_marks: bool,
    pub undeclared_refs: Vec<String>,
}

/// Static determinism analysis. A machine is deterministic when no two
/// instructions share their two initial symbols and no instruction carries
/// an inconsistency mark.
pub fn validate(machine: &Machine) -> ValidationReport {
    let n_states = machine.states.len();
    let n_syms = machine.alphabet.len();
    let mut undeclared_refs = Vec::new();
    for (k, inst) in machine.instructions.iter().enumerate() {
        if inst.head_state.0 >= n_states || inst.next_state.0 >= n_states {
            undeclared_refs.push(format!("i{}: state out of range", k + 1));
        }
        let written = match inst.action {
            Action::Write(s) => Some(s),
            _ => None,
        };
        if inst.scan_symbol.0 >= n_syms || written.is_some_and(|s| s.0 >= n_syms) {
            undeclared_refs.push(format!("i{}: symbol out of range", k + 1));
        }
    }
    let mut ambiguous_groups: Vec<Vec<usize>> = machine.by_head.values().filter(|g| g.len() > 1).cloned().collect();
    ambiguous_groups.sort();
    let uses_incons_marks = machine.has_marks();
    ValidationReport {
        deterministic: ambiguous_groups.is_empty() && !uses_incons_marks,
        ambiguous_groups,
        uses_incons_marks,
        undeclared_refs,
    }
}
